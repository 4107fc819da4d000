//! Regular factors of 0-1 matrices: the Ore-Ryser criterion and max-flow.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::digraph::RegularDigraph;
use crate::ensembles::sample_bernoulli;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::regularity::one_based;
use crate::rng::RngStream;
use crate::sampler::{enumerate_row_masks, ENUMERATION_MAX_N};
use crate::stats::mean_and_se;

/// Largest n accepted by [`ore_ryser_exhaustive`].
pub const ORE_RYSER_MAX_N: usize = 20;

/// A column set T with X_T < d |T|.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(with = "one_based")]
    pub columns: Vec<usize>,
    /// sum_i min(d, deg_T(i)).
    pub x_t: usize,
    /// d |T|.
    pub required: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorResult {
    pub exists: bool,
    pub factor: Option<RegularDigraph>,
    pub certificate: Option<Certificate>,
}

/// Rows of a square 0-1 matrix as sorted column lists.
fn support_rows(b: &DenseMatrix) -> Result<Vec<Vec<usize>>> {
    let n = b.require_square()?;
    let mut rows = vec![Vec::new(); n];
    for (i, row) in rows.iter_mut().enumerate() {
        for j in 0..n {
            let v = b.get(i, j);
            if v.im != 0.0 || (v.re != 0.0 && v.re != 1.0) {
                return Err(Error::NotZeroOne { row: i, col: j });
            }
            if v.re == 1.0 {
                row.push(j);
            }
        }
    }
    Ok(rows)
}

fn check_d(n: usize, d: usize) -> Result<()> {
    if d == 0 || d > n {
        return Err(Error::BadDegree { n, d });
    }
    Ok(())
}

/// X_T = sum_i min(d, deg_T(i)).
pub fn ore_ryser_sum(b: &DenseMatrix, d: usize, columns: &[usize]) -> Result<usize> {
    let rows = support_rows(b)?;
    let mut in_t = vec![false; rows.len()];
    for &j in columns {
        if j >= rows.len() {
            return Err(Error::IndexOutOfRange { index: j, n: rows.len() });
        }
        in_t[j] = true;
    }
    Ok(rows.iter().map(|r| r.iter().filter(|&&j| in_t[j]).count().min(d)).sum())
}

/// Checks X_T >= d |T| over all column sets. Sets are visited in
/// decreasing lexicographic order of their indicator vectors
/// (1_T(0), ..., 1_T(n-1)), so the full set comes first.
pub fn ore_ryser_exhaustive(b: &DenseMatrix, d: usize) -> Result<FactorResult> {
    let rows = support_rows(b)?;
    let n = rows.len();
    check_d(n, d)?;
    if n > ORE_RYSER_MAX_N {
        return Err(Error::TooLarge(format!("exhaustive Ore-Ryser check needs n <= {ORE_RYSER_MAX_N}, got {n}")));
    }
    // column j is bit n-1-j so that numeric order is lexicographic order
    let masks: Vec<u32> = rows
        .iter()
        .map(|r| r.iter().map(|&j| 1u32 << (n - 1 - j)).fold(0, |a, b| a | b))
        .collect();
    for t in (1u32..1 << n).rev() {
        let x_t: usize = masks.iter().map(|&m| ((m & t).count_ones() as usize).min(d)).sum();
        let required = d * t.count_ones() as usize;
        if x_t < required {
            let columns = (0..n).filter(|&j| t >> (n - 1 - j) & 1 == 1).collect();
            return Ok(FactorResult {
                exists: false,
                factor: None,
                certificate: Some(Certificate { columns, x_t, required }),
            });
        }
    }
    Ok(FactorResult {
        exists: true,
        factor: None,
        certificate: None,
    })
}

struct Edge {
    to: usize,
    cap: usize,
}

/// Dinic's algorithm; adjacency lists are scanned in insertion order so
/// the flow found is a function of the input alone.
struct FlowNetwork {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        Self {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: usize) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap });
        self.edges.push(Edge { to: from, cap: 0 });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    fn levels(&self, source: usize) -> Vec<Option<usize>> {
        let mut level = vec![None; self.adj.len()];
        level[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.edges[e].to;
                if self.edges[e].cap > 0 && level[v].is_none() {
                    level[v] = Some(level[u].expect("visited") + 1);
                    queue.push_back(v);
                }
            }
        }
        level
    }

    fn push(&mut self, u: usize, sink: usize, limit: usize, level: &[Option<usize>], next: &mut [usize]) -> usize {
        if u == sink {
            return limit;
        }
        while next[u] < self.adj[u].len() {
            let e = self.adj[u][next[u]];
            let v = self.edges[e].to;
            if self.edges[e].cap > 0 && level[v] == level[u].map(|l| l + 1) {
                let got = self.push(v, sink, limit.min(self.edges[e].cap), level, next);
                if got > 0 {
                    self.edges[e].cap -= got;
                    self.edges[e ^ 1].cap += got;
                    return got;
                }
            }
            next[u] += 1;
        }
        0
    }

    fn max_flow(&mut self, source: usize, sink: usize) -> usize {
        let mut total = 0;
        loop {
            let level = self.levels(source);
            if level[sink].is_none() {
                return total;
            }
            let mut next = vec![0; self.adj.len()];
            loop {
                let got = self.push(source, sink, usize::MAX, &level, &mut next);
                if got == 0 {
                    break;
                }
                total += got;
            }
        }
    }
}

/// A d-regular factor of `b` via max-flow on source -> rows (capacity d),
/// row i -> column j for b_ij = 1 (capacity 1), columns -> sink
/// (capacity d). On failure the columns on the sink side of the minimum
/// cut violate the Ore-Ryser condition.
pub fn find_regular_factor(b: &DenseMatrix, d: usize) -> Result<FactorResult> {
    let rows = support_rows(b)?;
    let n = rows.len();
    check_d(n, d)?;
    let (source, sink) = (2 * n, 2 * n + 1);
    let mut net = FlowNetwork::new(2 * n + 2);
    for i in 0..n {
        net.add_edge(source, i, d);
    }
    let mut middle = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        for &j in row {
            middle.push((i, j, net.add_edge(i, n + j, 1)));
        }
    }
    for j in 0..n {
        net.add_edge(n + j, sink, d);
    }
    let flow = net.max_flow(source, sink);
    if flow == n * d {
        let mut out = vec![Vec::with_capacity(d); n];
        for &(i, j, e) in &middle {
            if net.edges[e].cap == 0 {
                out[i].push(j);
            }
        }
        return Ok(FactorResult {
            exists: true,
            factor: Some(RegularDigraph::from_out_adj(n, d, out)?),
            certificate: None,
        });
    }
    let level = net.levels(source);
    let columns: Vec<usize> = (0..n).filter(|&j| level[n + j].is_none()).collect();
    let x_t = ore_ryser_sum(b, d, &columns)?;
    Ok(FactorResult {
        exists: false,
        factor: None,
        certificate: Some(Certificate {
            required: d * columns.len(),
            columns,
            x_t,
        }),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorProbabilityReport {
    pub n: usize,
    pub p: f64,
    pub delta: f64,
    pub d: usize,
    pub samples: usize,
    pub seed: RngStream,
    pub successes: usize,
    pub estimate: f64,
    pub std_error: f64,
    /// c with 1 - estimate = exp(-c delta^2 p n); absent when no sample failed.
    pub fitted_constant: Option<f64>,
    /// Lower bound on c implied by observing no failure, ln(samples)/(delta^2 p n).
    pub constant_lower_bound: Option<f64>,
}

/// How often a Bernoulli(p) matrix contains a d-regular factor,
/// d = (1 - delta) p n.
pub fn factor_probability(n: usize, p: f64, delta: f64, samples: usize, rng: RngStream) -> Result<FactorProbabilityReport> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::BadP(p));
    }
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::BadParams(format!("delta must lie in (0, 1/2], got {delta}")));
    }
    if samples == 0 {
        return Err(Error::BadParams("need at least one sample".into()));
    }
    let target = (1.0 - delta) * p * n as f64;
    let d = target.round();
    if (target - d).abs() > 1e-9 * target.max(1.0) || d < 1.0 {
        return Err(Error::NonIntegralD(target));
    }
    let d = d as usize;
    let hits: Vec<f64> = crate::ensembles::per_sample(samples, rng, |s| {
        Ok(if find_regular_factor(&sample_bernoulli(n, p, s), d)?.exists { 1.0 } else { 0.0 })
    })?;
    let successes = hits.iter().filter(|&&h| h == 1.0).count();
    let (estimate, se) = mean_and_se(&hits);
    let exponent = delta * delta * p * n as f64;
    let failures = samples - successes;
    Ok(FactorProbabilityReport {
        n,
        p,
        delta,
        d,
        samples,
        seed: rng,
        successes,
        estimate,
        std_error: if samples > 1 { se } else { 0.0 },
        fitted_constant: (failures > 0).then(|| -(failures as f64 / samples as f64).ln() / exponent),
        constant_lower_bound: (failures == 0).then(|| (samples as f64).ln() / exponent),
    })
}

/// |A_{n,d}| p^{nd} (1 - p)^{n^2 - nd}, the chance that an n x n
/// Bernoulli(p) matrix is d-regular.
pub fn membership_probability_exact(n: usize, d: usize, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadP(p));
    }
    if n > ENUMERATION_MAX_N {
        return Err(Error::TooLarge(format!("enumeration capped at n <= {ENUMERATION_MAX_N}")));
    }
    let count = enumerate_row_masks(n, d, ENUMERATION_MAX_N)?.len() as f64;
    let ones = (n * d) as i32;
    let zeros = (n * n - n * d) as i32;
    Ok(count * p.powi(ones) * (1.0 - p).powi(zeros))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn examples() {
        let ones = DenseMatrix::ones(3, 3);
        assert!(ore_ryser_exhaustive(&ones, 2).unwrap().exists);
        assert!(ore_ryser_exhaustive(&ones, 3).unwrap().exists);
        let id = DenseMatrix::identity(3);
        let r = ore_ryser_exhaustive(&id, 2).unwrap();
        let c = r.certificate.unwrap();
        assert_eq!(c.columns, vec![0, 1, 2]);
        assert_eq!((c.x_t, c.required), (3, 6));
        let a = RegularDigraph::circulant(5, 2).unwrap();
        let f = find_regular_factor(&a.to_dense(), 2).unwrap();
        assert_eq!(f.factor.unwrap(), a);
    }

    #[test]
    fn flow_matches_exhaustive() {
        let mut g = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let n = g.random_range(1..=8);
            let d = g.random_range(1..=n);
            let dens = g.random_range(0.2..1.0);
            let b = DenseMatrix::from_fn(n, n, |_, _| {
                num_complex::Complex64::new(if g.random::<f64>() < dens { 1.0 } else { 0.0 }, 0.0)
            });
            let ex = ore_ryser_exhaustive(&b, d).unwrap();
            let fl = find_regular_factor(&b, d).unwrap();
            assert_eq!(ex.exists, fl.exists);
            if let Some(f) = &fl.factor {
                f.check_invariants().unwrap();
                assert!((0..n).all(|i| f.out_neighbors(i).iter().all(|&j| b.get(i, j).re == 1.0)));
            }
            if let Some(c) = &fl.certificate {
                assert!(c.x_t < c.required);
                assert_eq!(ore_ryser_sum(&b, d, &c.columns).unwrap(), c.x_t);
            }
        }
    }

    #[test]
    fn membership_probabilities() {
        assert!((membership_probability_exact(2, 1, 0.5).unwrap() - 0.125).abs() < 1e-15);
        assert!((membership_probability_exact(4, 2, 0.5).unwrap() - 90.0 / 65536.0).abs() < 1e-15);
        assert!((membership_probability_exact(3, 3, 0.7).unwrap() - 0.7f64.powi(9)).abs() < 1e-15);
    }

    #[test]
    fn probability_report() {
        let r = factor_probability(20, 1.0, 0.5, 3, RngStream::new(1, 0)).unwrap();
        assert_eq!(r.estimate, 1.0);
        assert!(matches!(factor_probability(20, 0.3, 0.3, 3, RngStream::new(1, 0)), Err(Error::NonIntegralD(_))));
    }
}
