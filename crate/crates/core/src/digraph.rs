//! Elements of A_{n,d}: n x n 0-1 matrices with every row and column sum d.
//!
//! Vertices are 0-based in memory and 1-based in every serialized form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Axis, Error, Result};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RegularDigraph {
    n: usize,
    d: usize,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

/// Comparison used by [`RegularDigraph::threshold_neighborhood`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Threshold {
    /// `1 <= count <= r`
    AtMost,
    AtLeast,
    Below,
    Above,
}

impl RegularDigraph {
    /// Builds from out-neighbour lists (0-based, any order), checking every
    /// invariant.
    pub fn from_out_adj(n: usize, d: usize, mut out_adj: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 || d == 0 || d > n {
            return Err(Error::BadDegree { n, d });
        }
        if out_adj.len() != n {
            return Err(Error::DimensionMismatch(format!("{} adjacency rows for n={n}", out_adj.len())));
        }
        let mut in_adj = vec![Vec::with_capacity(d); n];
        for (i, row) in out_adj.iter_mut().enumerate() {
            row.sort_unstable();
            row.dedup();
            if let Some(&j) = row.iter().find(|&&j| j >= n) {
                return Err(Error::IndexOutOfRange { index: j, n });
            }
            if row.len() != d {
                return Err(Error::NotRegular {
                    axis: Axis::Row,
                    index: i,
                    sum: row.len(),
                    expected: d,
                });
            }
            for &j in row.iter() {
                in_adj[j].push(i);
            }
        }
        if let Some((j, col)) = in_adj.iter().enumerate().find(|(_, c)| c.len() != d) {
            return Err(Error::NotRegular {
                axis: Axis::Column,
                index: j,
                sum: col.len(),
                expected: d,
            });
        }
        Ok(Self { n, d, out_adj, in_adj })
    }

    /// Trusted constructor for callers that maintain regularity themselves.
    pub(crate) fn from_parts_unchecked(n: usize, d: usize, out_adj: Vec<Vec<usize>>) -> Self {
        let mut in_adj = vec![Vec::with_capacity(d); n];
        for (i, row) in out_adj.iter().enumerate() {
            for &j in row {
                in_adj[j].push(i);
            }
        }
        Self { n, d, out_adj, in_adj }
    }

    pub fn from_dense(m: &DenseMatrix, d: usize) -> Result<Self> {
        let n = m.require_square()?;
        let mut out_adj = vec![Vec::new(); n];
        for (i, row) in out_adj.iter_mut().enumerate() {
            for j in 0..n {
                let z = m.get(i, j);
                if z == Complex64::new(1.0, 0.0) {
                    row.push(j);
                } else if z != Complex64::new(0.0, 0.0) {
                    return Err(Error::NotZeroOne { row: i, col: j });
                }
            }
        }
        Self::from_out_adj(n, d, out_adj)
    }

    /// The circulant with out-neighbours `{i, i+1, ..., i+d-1} mod n`.
    pub fn circulant(n: usize, d: usize) -> Result<Self> {
        if n == 0 || d == 0 || d > n {
            return Err(Error::BadDegree { n, d });
        }
        Self::from_out_adj(n, d, (0..n).map(|i| (0..d).map(|k| (i + k) % n).collect()).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Sorted out-neighbours N_A(i).
    pub fn out_neighbors(&self, i: usize) -> &[usize] {
        &self.out_adj[i]
    }

    /// Sorted in-neighbours N_{A^T}(j).
    pub fn in_neighbors(&self, j: usize) -> &[usize] {
        &self.in_adj[j]
    }

    pub fn out_adj(&self) -> &[Vec<usize>] {
        &self.out_adj
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.out_adj[i].binary_search(&j).is_ok()
    }

    pub fn transpose(&self) -> Self {
        Self {
            n: self.n,
            d: self.d,
            out_adj: self.in_adj.clone(),
            in_adj: self.out_adj.clone(),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n, self.n);
        for (i, row) in self.out_adj.iter().enumerate() {
            for &j in row {
                m.set(i, j, Complex64::new(1.0, 0.0));
            }
        }
        m
    }

    /// Row bitmasks, bit j set iff i -> j. Requires n <= 64.
    pub fn row_masks(&self) -> Vec<u64> {
        assert!(self.n <= 64, "row_masks needs n <= 64");
        self.out_adj.iter().map(|row| row.iter().fold(0u64, |m, &j| m | (1 << j))).collect()
    }

    pub fn from_row_masks(n: usize, d: usize, masks: &[u64]) -> Result<Self> {
        let out = masks
            .iter()
            .map(|&m| (0..n).filter(|&j| m >> j & 1 == 1).collect())
            .collect();
        Self::from_out_adj(n, d, out)
    }

    /// The (n-d)-regular digraph with dense form 11^T - A.
    pub fn complement(&self) -> Result<Self> {
        if self.d == self.n {
            return Err(Error::DegreeOverflow { n: self.n });
        }
        let out = self
            .out_adj
            .iter()
            .map(|row| {
                let mut k = 0;
                (0..self.n)
                    .filter(|&j| {
                        if k < row.len() && row[k] == j {
                            k += 1;
                            false
                        } else {
                            true
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Self::from_parts_unchecked(self.n, self.n - self.d, out))
    }

    /// A / sqrt(d (1 - d/n)).
    pub fn normalized(&self) -> Result<DenseMatrix> {
        let scale = normalization_scale(self.n, self.d)?;
        Ok(self.to_dense().scale(1.0 / scale))
    }

    /// |N_A(i1) ∩ N_A(i2)|.
    pub fn codegree(&self, i1: usize, i2: usize) -> Result<usize> {
        self.check_index(i1)?;
        self.check_index(i2)?;
        if i1 == i2 {
            return Err(Error::SameVertex(i1));
        }
        Ok(sorted_intersection_len(&self.out_adj[i1], &self.out_adj[i2]))
    }

    /// e_A(I, J) = number of edges from I to J.
    pub fn edge_count(&self, rows: &[usize], cols: &[usize]) -> Result<usize> {
        for &x in rows.iter().chain(cols) {
            self.check_index(x)?;
        }
        let mut in_cols = vec![false; self.n];
        for &j in cols {
            in_cols[j] = true;
        }
        Ok(rows
            .iter()
            .map(|&i| self.out_adj[i].iter().filter(|&&j| in_cols[j]).count())
            .sum())
    }

    /// Vertices i whose out-neighbourhood meets `cols` in a number of
    /// vertices related to `r` by `mode`.
    pub fn threshold_neighborhood(&self, cols: &[usize], r: usize, mode: Threshold) -> Result<Vec<usize>> {
        for &x in cols {
            self.check_index(x)?;
        }
        if r == 0 && matches!(mode, Threshold::AtMost | Threshold::AtLeast) {
            return Err(Error::BadParams("threshold r must be >= 1".into()));
        }
        if cols.is_empty() {
            return Ok(Vec::new());
        }
        let counts = self.neighbor_counts(cols);
        Ok((0..self.n)
            .filter(|&i| {
                let c = counts[i];
                match mode {
                    Threshold::AtMost => c >= 1 && c <= r,
                    Threshold::AtLeast => c >= r,
                    Threshold::Below => c < r,
                    Threshold::Above => c > r,
                }
            })
            .collect())
    }

    /// `counts[i] = |N_A(i) ∩ cols|`, computed through the in-lists.
    pub fn neighbor_counts(&self, cols: &[usize]) -> Vec<usize> {
        let mut counts = vec![0usize; self.n];
        let mut seen = vec![false; self.n];
        for &j in cols {
            if std::mem::replace(&mut seen[j], true) {
                continue;
            }
            for &i in &self.in_adj[j] {
                counts[i] += 1;
            }
        }
        counts
    }

    /// N_{A^T}(J): the union of in-neighbourhoods of J.
    pub fn in_neighborhood(&self, cols: &[usize]) -> Vec<usize> {
        let counts = self.neighbor_counts(cols);
        (0..self.n).filter(|&i| counts[i] > 0).collect()
    }

    /// Full cross-scan of both adjacency views.
    pub fn check_invariants(&self) -> Result<()> {
        for (i, row) in self.out_adj.iter().enumerate() {
            if row.len() != self.d || row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::NotRegular {
                    axis: Axis::Row,
                    index: i,
                    sum: row.len(),
                    expected: self.d,
                });
            }
            for &j in row {
                if j >= self.n || self.in_adj[j].binary_search(&i).is_err() {
                    return Err(Error::InvalidSpec(format!("edge {}->{} missing from in-view", i + 1, j + 1)));
                }
            }
        }
        for (j, col) in self.in_adj.iter().enumerate() {
            if col.len() != self.d || col.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::NotRegular {
                    axis: Axis::Column,
                    index: j,
                    sum: col.len(),
                    expected: self.d,
                });
            }
        }
        Ok(())
    }

    fn check_index(&self, x: usize) -> Result<()> {
        if x >= self.n {
            Err(Error::IndexOutOfRange { index: x, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn to_json(&self) -> DigraphJson {
        DigraphJson {
            n: self.n,
            d: self.d,
            out_adj: self.out_adj.iter().map(|r| r.iter().map(|j| j + 1).collect()).collect(),
        }
    }

    pub fn from_json(j: &DigraphJson) -> Result<Self> {
        let out = j
            .out_adj
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&v| {
                        if v == 0 || v > j.n {
                            Err(Error::Parse(format!("vertex {v} outside 1..={}", j.n)))
                        } else {
                            Ok(v - 1)
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_out_adj(j.n, j.d, out)
    }
}

/// Serialized form `{n, d, out_adj}` with 1-based vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigraphJson {
    pub n: usize,
    pub d: usize,
    pub out_adj: Vec<Vec<usize>>,
}

impl Serialize for RegularDigraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RegularDigraph {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let j = DigraphJson::deserialize(de)?;
        RegularDigraph::from_json(&j).map_err(serde::de::Error::custom)
    }
}

/// sqrt(d (1 - d/n)), defined for 1 <= d <= n-1.
pub fn normalization_scale(n: usize, d: usize) -> Result<f64> {
    if d == 0 || d >= n {
        return Err(Error::DegenerateScale { n, d });
    }
    let (nf, df) = (n as f64, d as f64);
    Ok((df * (1.0 - df / nf)).sqrt())
}

pub(crate) fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut x, mut y, mut c) = (0, 0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                x += 1;
                y += 1;
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(n: usize, bits: &[u8]) -> DenseMatrix {
        DenseMatrix::from_real(n, n, &bits.iter().map(|&b| b as f64).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_is_one_regular() {
        let a = RegularDigraph::from_dense(&DenseMatrix::identity(3), 1).unwrap();
        assert_eq!(a.out_neighbors(2), &[2]);
        a.check_invariants().unwrap();
    }

    #[test]
    fn all_ones_two_by_two() {
        let a = RegularDigraph::from_dense(&DenseMatrix::ones(2, 2), 2).unwrap();
        assert_eq!(a.in_neighbors(0), &[0, 1]);
        assert!(matches!(a.complement(), Err(Error::DegreeOverflow { n: 2 })));
    }

    #[test]
    fn irregular_row_is_reported() {
        #[rustfmt::skip]
        let m = dense(4, &[
            1, 1, 0, 0,
            0, 1, 1, 0,
            0, 0, 1, 0,
            1, 1, 1, 0,
        ]);
        match RegularDigraph::from_dense(&m, 2) {
            Err(e @ Error::NotRegular { axis: Axis::Row, index: 2, .. }) => {
                assert!(e.to_string().starts_with("row 3"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_binary_entry() {
        let m = DenseMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 2.0]).unwrap();
        assert!(matches!(RegularDigraph::from_dense(&m, 1), Err(Error::NotZeroOne { row: 1, col: 1 })));
    }

    #[test]
    fn complement_of_identity() {
        let a = RegularDigraph::from_dense(&DenseMatrix::identity(4), 1).unwrap();
        let c = a.complement().unwrap();
        assert_eq!(c.d(), 3);
        assert_eq!(c.to_dense(), DenseMatrix::ones(4, 4).sub(&DenseMatrix::identity(4)).unwrap());
        c.check_invariants().unwrap();
        assert_eq!(c.complement().unwrap(), a);
    }

    #[test]
    fn normalized_two_by_two() {
        let id = RegularDigraph::from_dense(&DenseMatrix::identity(2), 1).unwrap();
        let m = id.normalized().unwrap();
        assert!((m.get(0, 0).re - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(m.get(0, 1).re, 0.0);
        let anti = RegularDigraph::from_out_adj(2, 1, vec![vec![1], vec![0]]).unwrap();
        assert!((anti.normalized().unwrap().get(1, 0).re - 2f64.sqrt()).abs() < 1e-15);
        let full = RegularDigraph::from_dense(&DenseMatrix::ones(2, 2), 2).unwrap();
        assert!(matches!(full.normalized(), Err(Error::DegenerateScale { .. })));
    }

    #[test]
    fn codegree_examples() {
        let id = RegularDigraph::from_dense(&DenseMatrix::identity(3), 1).unwrap();
        assert_eq!(id.codegree(0, 2).unwrap(), 0);
        let full = RegularDigraph::from_dense(&DenseMatrix::ones(3, 3), 3).unwrap();
        assert_eq!(full.codegree(0, 1).unwrap(), 3);
        assert!(matches!(full.codegree(1, 1), Err(Error::SameVertex(1))));
        // circulant {i, i+1} on 4 vertices; rows 1 and 2 (1-based) share column 2
        let c = RegularDigraph::circulant(4, 2).unwrap();
        assert_eq!(c.codegree(0, 1).unwrap(), 1);
    }

    #[test]
    fn edge_count_examples() {
        let c = RegularDigraph::circulant(4, 2).unwrap();
        let all: Vec<usize> = (0..4).collect();
        assert_eq!(c.edge_count(&all, &all).unwrap(), 8);
        assert_eq!(c.edge_count(&[], &[1, 2]).unwrap(), 0);
        assert_eq!(c.edge_count(&[0, 1], &[1, 2]).unwrap(), 3);
        assert!(matches!(c.edge_count(&[4], &[0]), Err(Error::IndexOutOfRange { index: 4, n: 4 })));
    }

    #[test]
    fn threshold_neighborhood_examples() {
        let c = RegularDigraph::circulant(4, 2).unwrap();
        let all: Vec<usize> = (0..4).collect();
        assert_eq!(c.threshold_neighborhood(&all, 2, Threshold::AtLeast).unwrap(), all);
        for mode in [Threshold::AtMost, Threshold::AtLeast, Threshold::Below, Threshold::Above] {
            assert!(c.threshold_neighborhood(&[], 1, mode).unwrap().is_empty());
        }
        // vertex 1 (1-based) has in-neighbours 4 and 1
        assert_eq!(c.threshold_neighborhood(&[0], 1, Threshold::AtMost).unwrap(), vec![0, 3]);
        assert_eq!(c.in_neighbors(0), &[0, 3]);
    }

    #[test]
    fn json_is_one_based_and_roundtrips() {
        let c = RegularDigraph::circulant(3, 1).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"n":3,"d":1,"out_adj":[[1],[2],[3]]}"#);
        let back: RegularDigraph = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<RegularDigraph>(r#"{"n":2,"d":1,"out_adj":[[0],[1]]}"#).is_err());
    }

    #[test]
    fn row_masks_roundtrip() {
        let c = RegularDigraph::circulant(6, 2).unwrap();
        let m = c.row_masks();
        assert_eq!(m[5], 0b100001);
        assert_eq!(RegularDigraph::from_row_masks(6, 2, &m).unwrap(), c);
    }
}
