//! Codegree, discrepancy and expansion checks, with certified (exhaustive)
//! and sampled verdicts.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::digraph::{RegularDigraph, Threshold};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::sampler::random_subset;

/// Exhaustive modes never enumerate more than 2^20 row sets.
pub const MAX_EXHAUSTIVE_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Codegree,
    Discrepancy,
    Expansion,
    ExpansionConsequences,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CertifiedPass,
    CertifiedFail,
    SampledPass,
    SampledFail,
}

impl Verdict {
    fn new(certified: bool, pass: bool) -> Self {
        match (certified, pass) {
            (true, true) => Verdict::CertifiedPass,
            (true, false) => Verdict::CertifiedFail,
            (false, true) => Verdict::SampledPass,
            (false, false) => Verdict::SampledFail,
        }
    }

    pub fn is_pass(self) -> bool {
        matches!(self, Verdict::CertifiedPass | Verdict::SampledPass)
    }

    pub fn is_certified(self) -> bool {
        matches!(self, Verdict::CertifiedPass | Verdict::CertifiedFail)
    }
}

/// Which bound of the expansion consequences a witness violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConsequenceBound {
    /// |N^{<=r}(J)| >= (kappa - 1/(r+1)) d |J| for small J.
    SmallSets,
    /// |N^{>r}(J)| > n/8 for large J.
    LargeSets,
}

/// Violating configuration. Vertex indices are 0-based in memory and
/// 1-based when serialized.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Witness {
    Pair {
        #[serde(with = "one_based_pair")]
        pair: (usize, usize),
        codegree: usize,
    },
    Sets {
        #[serde(with = "one_based")]
        rows: Vec<usize>,
        #[serde(with = "one_based")]
        cols: Vec<usize>,
        edges: usize,
    },
    Set {
        #[serde(with = "one_based")]
        cols: Vec<usize>,
        neighborhood: usize,
    },
    Consequence {
        bound: ConsequenceBound,
        #[serde(with = "one_based")]
        cols: Vec<usize>,
        r: usize,
        count: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub property: Property,
    pub parameters: Parameters,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    /// Number of quantifier instances evaluated. Exhaustive discrepancy
    /// counts (I, |J|) pairs, each of which covers every J of that size.
    pub trials: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub codegree: Option<CodegreeStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Parameters {
    Codegree { tail_k: f64 },
    Discrepancy { n0: usize, delta: f64 },
    Expansion { kappa: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodegreeStats {
    pub max_codegree: usize,
    #[serde(with = "one_based_pair")]
    pub argmax: (usize, usize),
    /// (1 + K) d^2 / n.
    pub tail_threshold: f64,
    /// Pairs whose codegree is at least `tail_threshold`.
    pub pairs_at_or_above_tail: usize,
}

/// Exhaustive codegree check against the d/4 threshold, with the
/// (1+K)d^2/n tail count at K = 1.
pub fn check_codegree(a: &RegularDigraph) -> RegularityReport {
    check_codegree_with_tail(a, 1.0)
}

pub fn check_codegree_with_tail(a: &RegularDigraph, tail_k: f64) -> RegularityReport {
    let (n, d) = (a.n(), a.d());
    let tail = (1.0 + tail_k) * (d * d) as f64 / n as f64;
    let mut best = (0usize, (0usize, 1usize.min(n.saturating_sub(1))));
    let mut above = 0;
    let mut trials = 0u64;
    for i1 in 0..n {
        for i2 in i1 + 1..n {
            let c = a.codegree(i1, i2).expect("distinct in-range pair");
            trials += 1;
            if c > best.0 || trials == 1 {
                best = (c, (i1, i2));
            }
            if c as f64 >= tail {
                above += 1;
            }
        }
    }
    let pass = best.0 as f64 <= d as f64 / 4.0;
    RegularityReport {
        property: Property::Codegree,
        parameters: Parameters::Codegree { tail_k },
        verdict: Verdict::new(true, pass),
        witness: (!pass).then_some(Witness::Pair {
            pair: best.1,
            codegree: best.0,
        }),
        trials,
        codegree: Some(CodegreeStats {
            max_codegree: best.0,
            argmax: best.1,
            tail_threshold: tail,
            pairs_at_or_above_tail: above,
        }),
    }
}

/// |e(I,J) - (d/n)|I||J|| >= delta (d/n)|I||J|.
pub fn discrepancy_violated(a: &RegularDigraph, edges: usize, rows: usize, cols: usize, delta: f64) -> bool {
    let mean = a.d() as f64 / a.n() as f64 * rows as f64 * cols as f64;
    (edges as f64 - mean).abs() >= delta * mean
}

fn check_discrepancy_params(a: &RegularDigraph, n0: usize, delta: f64) -> Result<()> {
    if n0 < 1 || n0 > a.n() || !(delta > 0.0) {
        return Err(Error::BadParams(format!("need 1 <= n0 <= n and delta > 0 (n0={n0}, delta={delta})")));
    }
    Ok(())
}

/// Discrepancy over all |I|, |J| > n0. Certified when 2^n <= budget and
/// n <= 20: every I is enumerated and, for each |J|, the extreme values of
/// e(I, J) are attained by the top and bottom column counts. Otherwise
/// `budget` random pairs are drawn with log-uniform sizes.
pub fn check_discrepancy(
    a: &RegularDigraph,
    n0: usize,
    delta: f64,
    budget: u64,
    rng: RngStream,
) -> Result<RegularityReport> {
    check_discrepancy_params(a, n0, delta)?;
    let n = a.n();
    let parameters = Parameters::Discrepancy { n0, delta };
    if n <= MAX_EXHAUSTIVE_N && (1u64 << n) <= budget {
        let (witness, trials) = discrepancy_exhaustive(a, n0, delta);
        return Ok(RegularityReport {
            property: Property::Discrepancy,
            parameters,
            verdict: Verdict::new(true, witness.is_none()),
            witness,
            trials,
            codegree: None,
        });
    }
    let mut g = rng.rng();
    let pairs = (0..budget).map(|_| {
        let r = log_uniform_size(&mut g, n0, n);
        let c = log_uniform_size(&mut g, n0, n);
        (random_subset(&mut g, n, r), random_subset(&mut g, n, c))
    });
    let (witness, trials) = discrepancy_on_pairs(a, n0, delta, pairs);
    Ok(RegularityReport {
        property: Property::Discrepancy,
        parameters,
        verdict: Verdict::new(false, witness.is_none()),
        witness,
        trials,
        codegree: None,
    })
}

/// Checks a caller-supplied list of (I, J); pairs with a side of size
/// <= n0 are skipped.
pub fn check_discrepancy_pairs(
    a: &RegularDigraph,
    n0: usize,
    delta: f64,
    pairs: &[(Vec<usize>, Vec<usize>)],
) -> Result<RegularityReport> {
    check_discrepancy_params(a, n0, delta)?;
    let (witness, trials) = discrepancy_on_pairs(a, n0, delta, pairs.iter().cloned());
    Ok(RegularityReport {
        property: Property::Discrepancy,
        parameters: Parameters::Discrepancy { n0, delta },
        verdict: Verdict::new(false, witness.is_none()),
        witness,
        trials,
        codegree: None,
    })
}

fn discrepancy_on_pairs(
    a: &RegularDigraph,
    n0: usize,
    delta: f64,
    pairs: impl Iterator<Item = (Vec<usize>, Vec<usize>)>,
) -> (Option<Witness>, u64) {
    let mut trials = 0;
    for (rows, cols) in pairs {
        if rows.len() <= n0 || cols.len() <= n0 {
            continue;
        }
        trials += 1;
        let e = a.edge_count(&rows, &cols).expect("sampled indices are in range");
        if discrepancy_violated(a, e, rows.len(), cols.len(), delta) {
            return (Some(Witness::Sets { rows, cols, edges: e }), trials);
        }
    }
    (None, trials)
}

fn discrepancy_exhaustive(a: &RegularDigraph, n0: usize, delta: f64) -> (Option<Witness>, u64) {
    let n = a.n();
    let mut trials = 0;
    let mut counts = vec![0usize; n];
    let mut order: Vec<usize> = (0..n).collect();
    for mask in 1u64..(1 << n) {
        let size = mask.count_ones() as usize;
        if size <= n0 {
            continue;
        }
        counts.iter_mut().for_each(|c| *c = 0);
        let rows = bits_to_vec(mask, n);
        for &i in &rows {
            for &j in a.out_neighbors(i) {
                counts[j] += 1;
            }
        }
        order.sort_by(|&x, &y| counts[y].cmp(&counts[x]).then(x.cmp(&y)));
        let total: usize = counts.iter().sum();
        let mut top = 0;
        for k in 1..=n {
            top += counts[order[k - 1]];
            if k <= n0 {
                continue;
            }
            trials += 1;
            // bottom k = total minus top (n - k)
            let bottom = total - order[..n - k].iter().map(|&j| counts[j]).sum::<usize>();
            for (edges, cols) in [
                (top, order[..k].to_vec()),
                (bottom, order[n - k..].to_vec()),
            ] {
                if discrepancy_violated(a, edges, size, k, delta) {
                    let mut cols = cols;
                    cols.sort_unstable();
                    return (Some(Witness::Sets { rows, cols, edges }), trials);
                }
            }
        }
    }
    (None, trials)
}

fn log_uniform_size<R: Rng + ?Sized>(g: &mut R, above: usize, max: usize) -> usize {
    if above >= max {
        return max;
    }
    let lo = (above as f64).max(1.0).ln();
    let hi = (max as f64).ln();
    let s = (lo + g.random::<f64>() * (hi - lo)).exp().ceil() as usize;
    s.clamp(above + 1, max)
}

/// Largest |J| quantified over in the expansion property: floor(n / (2 kappa d)).
pub fn expansion_size_limit(n: usize, d: usize, kappa: f64) -> usize {
    let lim = n as f64 / (2.0 * kappa * d as f64);
    (lim.floor() as usize).min(n)
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::BadParams(format!("kappa={kappa} outside (0,1)")));
    }
    Ok(())
}

/// |N_{A^T}(J)| > kappa d |J| for all J with |J| <= n/(2 kappa d).
pub fn check_expansion(a: &RegularDigraph, kappa: f64, budget: u64, rng: RngStream) -> Result<RegularityReport> {
    check_kappa(kappa)?;
    let (n, d) = (a.n(), a.d());
    let smax = expansion_size_limit(n, d, kappa);
    let total = subsets_up_to(n, smax);
    let masks = ColumnMasks::new(a);
    let violates = |cols: &[usize]| {
        let nb = masks.neighborhood_size(cols);
        (nb as f64 <= kappa * d as f64 * cols.len() as f64).then_some(nb)
    };
    let parameters = Parameters::Expansion { kappa };
    if total.is_some_and(|t| t <= budget) {
        let mut trials = 0;
        let mut witness = None;
        for k in 1..=smax {
            for_each_combination(n, k, &mut |cols| {
                trials += 1;
                if let Some(nb) = violates(cols) {
                    witness = Some(Witness::Set {
                        cols: cols.to_vec(),
                        neighborhood: nb,
                    });
                    return false;
                }
                true
            });
            if witness.is_some() {
                break;
            }
        }
        return Ok(RegularityReport {
            property: Property::Expansion,
            parameters,
            verdict: Verdict::new(true, witness.is_none()),
            witness,
            trials,
            codegree: None,
        });
    }
    let mut g = rng.rng();
    let mut witness = None;
    let mut trials = 0;
    if smax >= 1 {
        for _ in 0..budget {
            // log-uniform sizes on [1, smax] favour small J
            let k = if smax == 1 {
                1
            } else {
                ((g.random::<f64>() * ((smax + 1) as f64).ln()).exp().floor() as usize).clamp(1, smax)
            };
            let cols = random_subset(&mut g, n, k);
            trials += 1;
            if let Some(nb) = violates(&cols) {
                witness = Some(Witness::Set { cols, neighborhood: nb });
                break;
            }
        }
    }
    Ok(RegularityReport {
        property: Property::Expansion,
        parameters,
        verdict: Verdict::new(false, witness.is_none()),
        witness,
        trials,
        codegree: None,
    })
}

/// Checks both bounds that membership in A^exp(kappa) implies, given an
/// expansion report for the same digraph that passed.
pub fn verify_expansion_consequences(
    a: &RegularDigraph,
    expansion: &RegularityReport,
    budget: u64,
    rng: RngStream,
) -> Result<RegularityReport> {
    let kappa = match (&expansion.property, &expansion.parameters) {
        (Property::Expansion, Parameters::Expansion { kappa }) if expansion.verdict.is_pass() => *kappa,
        _ => {
            return Err(Error::PrerequisiteMissing(
                "an expansion report with a pass verdict is required".into(),
            ))
        }
    };
    check_kappa(kappa)?;
    let (n, d) = (a.n(), a.d());
    let limit = n as f64 / (2.0 * kappa * d as f64);
    let r_small = (2.0 / kappa).ceil() as usize;
    let mut trials = 0u64;
    let mut check = |cols: &[usize]| -> Option<Witness> {
        let k = cols.len();
        if k == 0 {
            return None;
        }
        let counts = a.neighbor_counts(cols);
        if (k as f64) <= limit {
            for r in 1..=r_small {
                let bound = (kappa - 1.0 / (r + 1) as f64) * (d * k) as f64;
                if bound <= 0.0 {
                    continue;
                }
                trials += 1;
                let count = counts.iter().filter(|&&c| c >= 1 && c <= r).count();
                if (count as f64) < bound {
                    return Some(Witness::Consequence {
                        bound: ConsequenceBound::SmallSets,
                        cols: cols.to_vec(),
                        r,
                        count,
                    });
                }
            }
        } else {
            let rmax = (kappa * (d * k) as f64 / (4.0 * n as f64)).floor() as usize;
            for r in 1..=rmax {
                trials += 1;
                let count = counts.iter().filter(|&&c| c > r).count();
                if count as f64 <= n as f64 / 8.0 {
                    return Some(Witness::Consequence {
                        bound: ConsequenceBound::LargeSets,
                        cols: cols.to_vec(),
                        r,
                        count,
                    });
                }
            }
        }
        None
    };
    let certified = n <= MAX_EXHAUSTIVE_N && (1u64 << n) <= budget;
    let mut witness = None;
    if certified {
        for mask in 1u64..(1 << n) {
            if let Some(w) = check(&bits_to_vec(mask, n)) {
                witness = Some(w);
                break;
            }
        }
    } else {
        let mut g = rng.rng();
        for _ in 0..budget {
            let k = g.random_range(1..=n);
            if let Some(w) = check(&random_subset(&mut g, n, k)) {
                witness = Some(w);
                break;
            }
        }
    }
    Ok(RegularityReport {
        property: Property::ExpansionConsequences,
        parameters: Parameters::Expansion { kappa },
        verdict: Verdict::new(certified, witness.is_none()),
        witness,
        trials,
        codegree: None,
    })
}

/// Re-evaluates a witness with the digraph primitives; true iff it is a
/// genuine violation of the report's property.
pub fn witness_is_violation(a: &RegularDigraph, report: &RegularityReport) -> bool {
    let Some(w) = &report.witness else { return false };
    let d = a.d() as f64;
    match (w, &report.parameters) {
        (Witness::Pair { pair, .. }, Parameters::Codegree { .. }) => {
            a.codegree(pair.0, pair.1).is_ok_and(|c| c as f64 > d / 4.0)
        }
        (Witness::Sets { rows, cols, .. }, Parameters::Discrepancy { n0, delta }) => {
            rows.len() > *n0
                && cols.len() > *n0
                && a.edge_count(rows, cols)
                    .is_ok_and(|e| discrepancy_violated(a, e, rows.len(), cols.len(), *delta))
        }
        (Witness::Set { cols, .. }, Parameters::Expansion { kappa }) => {
            cols.len() <= expansion_size_limit(a.n(), a.d(), *kappa)
                && (a.in_neighborhood(cols).len() as f64) <= kappa * d * cols.len() as f64
        }
        (Witness::Consequence { bound, cols, r, .. }, Parameters::Expansion { kappa }) => {
            let k = cols.len() as f64;
            let n = a.n() as f64;
            match bound {
                ConsequenceBound::SmallSets => a
                    .threshold_neighborhood(cols, *r, Threshold::AtMost)
                    .is_ok_and(|s| (s.len() as f64) < (kappa - 1.0 / (*r as f64 + 1.0)) * d * k),
                ConsequenceBound::LargeSets => a
                    .threshold_neighborhood(cols, *r, Threshold::Above)
                    .is_ok_and(|s| s.len() as f64 <= n / 8.0),
            }
        }
        _ => false,
    }
}

/// Sum of C(n, k) for k = 1..=kmax, or None on overflow.
fn subsets_up_to(n: usize, kmax: usize) -> Option<u64> {
    let mut total: u64 = 0;
    let mut c: u128 = 1;
    for k in 1..=kmax.min(n) {
        c = c * (n - k + 1) as u128 / k as u128;
        total = total.checked_add(u64::try_from(c).ok()?)?;
    }
    Some(total)
}

/// Visits k-subsets of 0..n in lexicographic order until `f` returns false.
pub(crate) fn for_each_combination(n: usize, k: usize, f: &mut impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !f(&idx) {
            return;
        }
        let mut p = k;
        while p > 0 && idx[p - 1] == n - k + p - 1 {
            p -= 1;
        }
        if p == 0 {
            return;
        }
        idx[p - 1] += 1;
        for q in p..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

pub(crate) fn bits_to_vec(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&j| mask >> j & 1 == 1).collect()
}

/// In-neighbourhood bitsets per column.
struct ColumnMasks {
    words: usize,
    masks: Vec<u64>,
}

impl ColumnMasks {
    fn new(a: &RegularDigraph) -> Self {
        let n = a.n();
        let words = n.div_ceil(64);
        let mut masks = vec![0u64; n * words];
        for j in 0..n {
            for &i in a.in_neighbors(j) {
                masks[j * words + i / 64] |= 1 << (i % 64);
            }
        }
        Self { words, masks }
    }

    fn neighborhood_size(&self, cols: &[usize]) -> usize {
        let mut acc = vec![0u64; self.words];
        for &j in cols {
            for (a, m) in acc.iter_mut().zip(&self.masks[j * self.words..(j + 1) * self.words]) {
                *a |= m;
            }
        }
        acc.iter().map(|w| w.count_ones() as usize).sum()
    }
}

pub(crate) mod one_based {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[usize], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|x| x + 1).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<usize>, D::Error> {
        let v = Vec::<usize>::deserialize(de)?;
        v.into_iter()
            .map(|x| x.checked_sub(1).ok_or_else(|| serde::de::Error::custom("vertex 0 in 1-based list")))
            .collect()
    }
}

mod one_based_pair {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &(usize, usize), s: S) -> Result<S::Ok, S::Error> {
        (v.0 + 1, v.1 + 1).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<(usize, usize), D::Error> {
        let (a, b) = <(usize, usize)>::deserialize(de)?;
        match (a.checked_sub(1), b.checked_sub(1)) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(serde::de::Error::custom("vertex 0 in 1-based pair")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::DenseMatrix;
    use crate::sampler::{chain_sample, enumerate_regular};

    #[test]
    fn identity_codegree_passes() {
        let a = RegularDigraph::circulant(8, 1).unwrap();
        let r = check_codegree(&a);
        assert_eq!(r.verdict, Verdict::CertifiedPass);
        assert_eq!(r.codegree.unwrap().max_codegree, 0);
        assert_eq!(r.trials, 28);
    }

    #[test]
    fn complete_codegree_fails_with_witness() {
        let a = RegularDigraph::from_dense(&DenseMatrix::ones(4, 4), 4).unwrap();
        let r = check_codegree(&a);
        assert_eq!(r.verdict, Verdict::CertifiedFail);
        assert!(matches!(r.witness, Some(Witness::Pair { codegree: 4, .. })));
        assert!(witness_is_violation(&a, &r));
    }

    #[test]
    fn discrepancy_vacuous_and_full() {
        let a = chain_sample(10, 3, 2000, RngStream::new(2, 0)).unwrap();
        // delta so large that |e - mean| < delta * mean always
        let r = check_discrepancy(&a, 1, 100.0, 1 << 10, RngStream::new(0, 0)).unwrap();
        assert_eq!(r.verdict, Verdict::CertifiedPass);
        let all: Vec<usize> = (0..10).collect();
        let r = check_discrepancy_pairs(&a, 9, 1e-9, &[(all.clone(), all)]).unwrap();
        assert!(r.verdict.is_pass());
        assert_eq!(r.trials, 1);
    }

    #[test]
    fn exhaustive_discrepancy_agrees_with_brute_force() {
        let a = chain_sample(7, 3, 3000, RngStream::new(9, 0)).unwrap();
        for (n0, delta) in [(1, 0.3), (2, 0.5), (3, 0.2), (4, 0.1)] {
            let r = check_discrepancy(&a, n0, delta, 1 << 7, RngStream::new(0, 0)).unwrap();
            let mut brute = false;
            for rm in 1u64..128 {
                for cm in 1u64..128 {
                    let (rows, cols) = (bits_to_vec(rm, 7), bits_to_vec(cm, 7));
                    if rows.len() > n0 && cols.len() > n0 {
                        let e = a.edge_count(&rows, &cols).unwrap();
                        brute |= discrepancy_violated(&a, e, rows.len(), cols.len(), delta);
                    }
                }
            }
            assert_eq!(r.verdict.is_pass(), !brute, "n0={n0} delta={delta}");
            if !brute {
                continue;
            }
            assert!(witness_is_violation(&a, &r));
        }
    }

    #[test]
    fn discrepancy_bad_params() {
        let a = RegularDigraph::circulant(5, 2).unwrap();
        assert!(check_discrepancy(&a, 0, 0.5, 10, RngStream::new(0, 0)).is_err());
        assert!(check_discrepancy(&a, 2, 0.0, 10, RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn identity_expands_at_half() {
        let a = RegularDigraph::circulant(6, 1).unwrap();
        let r = check_expansion(&a, 0.5, 1 << 20, RngStream::new(0, 0)).unwrap();
        assert_eq!(r.verdict, Verdict::CertifiedPass);
    }

    #[test]
    fn expansion_failure_has_real_witness() {
        // three disjoint complete blocks of size 3: a block J has only 3
        // in-neighbours
        let out = (0..9).map(|i| (3 * (i / 3)..3 * (i / 3) + 3).collect()).collect();
        let a = RegularDigraph::from_out_adj(9, 3, out).unwrap();
        let r = check_expansion(&a, 0.4, 1 << 20, RngStream::new(0, 0)).unwrap();
        assert_eq!(r.verdict, Verdict::CertifiedFail);
        assert!(witness_is_violation(&a, &r));
    }

    #[test]
    fn consequences_need_a_passing_report() {
        let a = RegularDigraph::circulant(6, 2).unwrap();
        let fake = check_codegree(&a);
        assert!(matches!(
            verify_expansion_consequences(&a, &fake, 100, RngStream::new(0, 0)),
            Err(Error::PrerequisiteMissing(_))
        ));
    }

    #[test]
    fn consequences_hold_on_all_of_a62() {
        for a in enumerate_regular(6, 2).unwrap().iter().step_by(97) {
            let e = check_expansion(a, 0.4, 1 << 20, RngStream::new(0, 0)).unwrap();
            assert_eq!(e.verdict, Verdict::CertifiedPass);
            let c = verify_expansion_consequences(a, &e, 1 << 20, RngStream::new(0, 0)).unwrap();
            assert_eq!(c.verdict, Verdict::CertifiedPass);
        }
    }

    #[test]
    fn large_set_bound_is_exercised() {
        // n=10, d=5, kappa=0.9: the large-set bound is live for |J| >= 9
        let a = chain_sample(10, 5, 5000, RngStream::new(4, 0)).unwrap();
        let e = check_expansion(&a, 0.9, 1 << 20, RngStream::new(0, 0)).unwrap();
        assert_eq!(e.verdict, Verdict::CertifiedPass);
        let c = verify_expansion_consequences(&a, &e, 1 << 20, RngStream::new(0, 0)).unwrap();
        assert_eq!(c.verdict, Verdict::CertifiedPass);
        assert!(c.trials > 0);
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, &mut |c| {
            seen.push(c.to_vec());
            true
        });
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(subsets_up_to(5, 2), Some(15));
    }

    #[test]
    fn witness_json_is_one_based() {
        let w = Witness::Set {
            cols: vec![0, 4],
            neighborhood: 1,
        };
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"kind":"set","cols":[1,5],"neighborhood":1}"#);
        assert_eq!(serde_json::from_str::<Witness>(&s).unwrap(), w);
    }
}
