//! Samplers for A_{n,d}, simple and neighbourhood switchings, and the
//! switching coupling F_{L,L'}.

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::digraph::RegularDigraph;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Largest n accepted by [`rejection_sample`] unless a cap is passed.
pub const REJECTION_MAX_N: usize = 16;
/// Largest n accepted by [`enumerate_regular`] unless a cap is passed.
pub const ENUMERATION_MAX_N: usize = 6;

fn check_degree(n: usize, d: usize) -> Result<()> {
    if n < 2 || d == 0 || d >= n {
        return Err(Error::BadDegree { n, d });
    }
    Ok(())
}

/// Swaps the 2x2 pattern at rows (i1, i2), columns (j1, j2) when it is a
/// permutation pattern; otherwise returns `a` unchanged.
pub fn simple_switch(a: &RegularDigraph, i1: usize, i2: usize, j1: usize, j2: usize) -> Result<RegularDigraph> {
    let n = a.n();
    for x in [i1, i2, j1, j2] {
        if x >= n {
            return Err(Error::IndexOutOfRange { index: x, n });
        }
    }
    if i1 == i2 || j1 == j2 {
        return Err(Error::InvalidSpec("simple switch needs i1 != i2 and j1 != j2".into()));
    }
    let (p, q, r, s) = (a.has_edge(i1, j1), a.has_edge(i1, j2), a.has_edge(i2, j1), a.has_edge(i2, j2));
    let (drop1, add1, drop2, add2) = if p && s && !q && !r {
        (j1, j2, j2, j1)
    } else if q && r && !p && !s {
        (j2, j1, j1, j2)
    } else {
        return Ok(a.clone());
    };
    let mut out = a.out_adj().to_vec();
    replace_sorted(&mut out[i1], drop1, add1);
    replace_sorted(&mut out[i2], drop2, add2);
    Ok(RegularDigraph::from_parts_unchecked(n, a.d(), out))
}

fn replace_sorted(row: &mut Vec<usize>, drop: usize, add: usize) {
    let k = row.binary_search(&drop).expect("switch drops a present edge");
    row.remove(k);
    let k = row.binary_search(&add).expect_err("switch adds an absent edge");
    row.insert(k, add);
}

/// Default number of chain proposals: 10 n d ceil(ln(nd + 1)).
pub fn default_chain_steps(n: usize, d: usize) -> u64 {
    let nd = (n * d) as f64;
    10 * (n * d) as u64 * (nd + 1.0).ln().ceil() as u64
}

/// How the switch chain proposes a move. Both are symmetric, so both have
/// the uniform law on A_{n,d} as stationary distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainProposal {
    /// Uniform ordered (i1, i2, j1, j2) with i1 != i2, j1 != j2.
    #[default]
    Vertex,
    /// Two uniform ordered edges (i1, j1), (i2, j2); the move rewires them to
    /// (i1, j2), (i2, j1). Far fewer rejected proposals when d/n is small.
    Edge,
}

/// Runs the lazy switch chain from the circulant for `steps` proposals.
pub fn chain_sample(n: usize, d: usize, steps: u64, rng: RngStream) -> Result<RegularDigraph> {
    chain_sample_with(n, d, steps, ChainProposal::Vertex, rng)
}

pub fn chain_sample_with(
    n: usize,
    d: usize,
    steps: u64,
    proposal: ChainProposal,
    rng: RngStream,
) -> Result<RegularDigraph> {
    check_degree(n, d)?;
    let mut g = rng.rng();
    let mut state = ChainState::circulant(n, d);
    match proposal {
        ChainProposal::Vertex => {
            for _ in 0..steps {
                let i1 = g.random_range(0..n);
                let mut i2 = g.random_range(0..n - 1);
                if i2 >= i1 {
                    i2 += 1;
                }
                let j1 = g.random_range(0..n);
                let mut j2 = g.random_range(0..n - 1);
                if j2 >= j1 {
                    j2 += 1;
                }
                state.try_vertex_switch(i1, i2, j1, j2);
            }
        }
        ChainProposal::Edge => {
            for _ in 0..steps {
                let (i1, k1) = (g.random_range(0..n), g.random_range(0..d));
                let (i2, k2) = (g.random_range(0..n), g.random_range(0..d));
                state.try_edge_switch(i1, k1, i2, k2);
            }
        }
    }
    Ok(state.into_digraph())
}

/// Bitset plus unsorted out-lists; the out-lists are kept in sync so that
/// edge proposals are O(1).
struct ChainState {
    n: usize,
    d: usize,
    words: usize,
    bits: Vec<u64>,
    out: Vec<Vec<usize>>,
}

impl ChainState {
    fn circulant(n: usize, d: usize) -> Self {
        let words = n.div_ceil(64);
        let mut s = Self {
            n,
            d,
            words,
            bits: vec![0; n * words],
            out: (0..n).map(|i| (0..d).map(|k| (i + k) % n).collect()).collect(),
        };
        for i in 0..n {
            for k in 0..d {
                s.set(i, (i + k) % n, true);
            }
        }
        s
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: bool) {
        let w = &mut self.bits[i * self.words + j / 64];
        if v {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    fn rewire(&mut self, i: usize, from: usize, to: usize) {
        self.set(i, from, false);
        self.set(i, to, true);
        let k = self.out[i].iter().position(|&j| j == from).expect("edge present");
        self.out[i][k] = to;
    }

    fn try_vertex_switch(&mut self, i1: usize, i2: usize, j1: usize, j2: usize) {
        let (p, q, r, s) = (self.get(i1, j1), self.get(i1, j2), self.get(i2, j1), self.get(i2, j2));
        if p && s && !q && !r {
            self.rewire(i1, j1, j2);
            self.rewire(i2, j2, j1);
        } else if q && r && !p && !s {
            self.rewire(i1, j2, j1);
            self.rewire(i2, j1, j2);
        }
    }

    fn try_edge_switch(&mut self, i1: usize, k1: usize, i2: usize, k2: usize) {
        if i1 == i2 {
            return;
        }
        let (j1, j2) = (self.out[i1][k1], self.out[i2][k2]);
        if j1 == j2 || self.get(i1, j2) || self.get(i2, j1) {
            return;
        }
        self.set(i1, j1, false);
        self.set(i1, j2, true);
        self.set(i2, j2, false);
        self.set(i2, j1, true);
        self.out[i1][k1] = j2;
        self.out[i2][k2] = j1;
    }

    fn into_digraph(self) -> RegularDigraph {
        let n = self.n;
        let out = (0..n).map(|i| (0..n).filter(|&j| self.get(i, j)).collect()).collect();
        RegularDigraph::from_parts_unchecked(n, self.d, out)
    }
}

/// Outcome of a rejection run, with the number of Bernoulli matrices drawn.
#[derive(Debug, Clone)]
pub struct RejectionOutcome {
    pub digraph: RegularDigraph,
    pub tries: u64,
}

/// Draws iid Bernoulli(d/n) matrices until one is d-regular.
pub fn rejection_sample(n: usize, d: usize, rng: RngStream, max_tries: u64) -> Result<RegularDigraph> {
    rejection_sample_counted(n, d, rng, max_tries, REJECTION_MAX_N).map(|o| o.digraph)
}

pub fn rejection_sample_counted(
    n: usize,
    d: usize,
    rng: RngStream,
    max_tries: u64,
    max_n: usize,
) -> Result<RejectionOutcome> {
    if n == 0 || d == 0 || d > n {
        return Err(Error::BadDegree { n, d });
    }
    if n > max_n {
        return Err(Error::TooLarge(format!("rejection sampling capped at n <= {max_n}")));
    }
    let p = d as f64 / n as f64;
    let mut g = rng.rng();
    let mut out = vec![Vec::with_capacity(n); n];
    let mut col = vec![0usize; n];
    for tries in 1..=max_tries {
        // Every entry is drawn even after a row fails, so the number of
        // draws per try is fixed.
        let mut ok = true;
        col.iter_mut().for_each(|c| *c = 0);
        for row in out.iter_mut() {
            row.clear();
            for (j, c) in col.iter_mut().enumerate() {
                if g.random_bool(p) {
                    row.push(j);
                    *c += 1;
                }
            }
            ok &= row.len() == d;
        }
        if ok && col.iter().all(|&c| c == d) {
            return Ok(RejectionOutcome {
                digraph: RegularDigraph::from_parts_unchecked(n, d, out),
                tries,
            });
        }
    }
    Err(Error::Exhausted { tries: max_tries })
}

/// All of A_{n,d} in lexicographic order of the row-major 0-1 string.
pub fn enumerate_regular(n: usize, d: usize) -> Result<Vec<RegularDigraph>> {
    enumerate_regular_capped(n, d, ENUMERATION_MAX_N)
}

pub fn enumerate_regular_capped(n: usize, d: usize, max_n: usize) -> Result<Vec<RegularDigraph>> {
    Ok(enumerate_row_masks(n, d, max_n)?
        .into_iter()
        .map(|m| {
            let out = m.iter().map(|&r| (0..n).filter(|&j| r >> j & 1 == 1).collect()).collect();
            RegularDigraph::from_parts_unchecked(n, d, out)
        })
        .collect())
}

/// Same enumeration as row bitmasks (bit j = column j).
pub fn enumerate_row_masks(n: usize, d: usize, max_n: usize) -> Result<Vec<Vec<u64>>> {
    if n == 0 || d == 0 || d > n {
        return Err(Error::BadDegree { n, d });
    }
    if n > max_n || n > 63 {
        return Err(Error::TooLarge(format!("enumeration capped at n <= {max_n}")));
    }
    // Row patterns in lexicographic order of the string (b_0, ..., b_{n-1}).
    let mut patterns: Vec<u64> = (0u64..1 << n).filter(|m| m.count_ones() as usize == d).collect();
    patterns.sort_by_key(|m| std::cmp::Reverse(m.reverse_bits()));
    patterns.reverse();
    let mut out = Vec::new();
    let mut rows = Vec::with_capacity(n);
    let mut col = vec![0usize; n];
    backtrack(n, d, &patterns, &mut rows, &mut col, &mut out);
    Ok(out)
}

fn backtrack(n: usize, d: usize, patterns: &[u64], rows: &mut Vec<u64>, col: &mut [usize], out: &mut Vec<Vec<u64>>) {
    let i = rows.len();
    if i == n {
        out.push(rows.clone());
        return;
    }
    let remaining = n - i - 1;
    'pat: for &p in patterns {
        for (j, c) in col.iter().enumerate() {
            let c2 = c + (p >> j & 1) as usize;
            if c2 > d || c2 + remaining < d {
                continue 'pat;
            }
        }
        for (j, c) in col.iter_mut().enumerate() {
            *c += (p >> j & 1) as usize;
        }
        rows.push(p);
        backtrack(n, d, patterns, rows, col, out);
        rows.pop();
        for (j, c) in col.iter_mut().enumerate() {
            *c -= (p >> j & 1) as usize;
        }
    }
}

/// (pair {i, i'}, J, J') for a neighbourhood switching.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchSpec {
    first: usize,
    second: usize,
    give: Vec<usize>,
    take: Vec<usize>,
}

impl SwitchSpec {
    pub fn new(pair: (usize, usize), mut give: Vec<usize>, mut take: Vec<usize>) -> Result<Self> {
        give.sort_unstable();
        give.dedup();
        take.sort_unstable();
        take.dedup();
        if pair.0 == pair.1 {
            return Err(Error::InvalidSpec("switch pair must be two distinct vertices".into()));
        }
        if give.is_empty() || give.len() != take.len() {
            return Err(Error::InvalidSpec(format!(
                "|J| = {} and |J'| = {} must be equal and positive",
                give.len(),
                take.len()
            )));
        }
        if crate::digraph::sorted_intersection_len(&give, &take) > 0 {
            return Err(Error::InvalidSpec("J and J' overlap".into()));
        }
        Ok(Self {
            first: pair.0,
            second: pair.1,
            give,
            take,
        })
    }

    pub fn pair(&self) -> (usize, usize) {
        (self.first, self.second)
    }

    /// J.
    pub fn give(&self) -> &[usize] {
        &self.give
    }

    /// J'.
    pub fn take(&self) -> &[usize] {
        &self.take
    }
}

/// Which of the two switchable configurations a digraph is in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchOrientation {
    /// J ⊆ N(i) \ N(i'), J' ⊆ N(i') \ N(i).
    Forward,
    /// J ⊆ N(i') \ N(i), J' ⊆ N(i) \ N(i').
    Mirrored,
}

pub fn switch_orientation(a: &RegularDigraph, spec: &SwitchSpec) -> Result<Option<SwitchOrientation>> {
    let n = a.n();
    for &x in [spec.first, spec.second].iter().chain(&spec.give).chain(&spec.take) {
        if x >= n {
            return Err(Error::IndexOutOfRange { index: x, n });
        }
    }
    let only = |set: &[usize], yes: usize, no: usize| set.iter().all(|&j| a.has_edge(yes, j) && !a.has_edge(no, j));
    let (i, ip) = (spec.first, spec.second);
    Ok(if only(&spec.give, i, ip) && only(&spec.take, ip, i) {
        Some(SwitchOrientation::Forward)
    } else if only(&spec.give, ip, i) && only(&spec.take, i, ip) {
        Some(SwitchOrientation::Mirrored)
    } else {
        None
    })
}

/// Switch_{{i,i'},J,J'}(A).
pub fn neighborhood_switch(a: &RegularDigraph, spec: &SwitchSpec) -> Result<RegularDigraph> {
    let Some(orientation) = switch_orientation(a, spec)? else {
        return Ok(a.clone());
    };
    let (holder_of_give, holder_of_take) = match orientation {
        SwitchOrientation::Forward => (spec.first, spec.second),
        SwitchOrientation::Mirrored => (spec.second, spec.first),
    };
    let mut out = a.out_adj().to_vec();
    exchange(&mut out[holder_of_give], &spec.give, &spec.take);
    exchange(&mut out[holder_of_take], &spec.take, &spec.give);
    Ok(RegularDigraph::from_parts_unchecked(a.n(), a.d(), out))
}

fn exchange(row: &mut Vec<usize>, remove: &[usize], add: &[usize]) {
    row.retain(|j| remove.binary_search(j).is_err());
    row.extend_from_slice(add);
    row.sort_unstable();
}

/// The pairing pi: I -> I' with I = [0, h), I' = [h, 2h), h = floor(n/2).
/// `targets[i] = pi(i)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    targets: Vec<usize>,
}

impl Pairing {
    pub fn new(n: usize, targets: Vec<usize>) -> Result<Self> {
        let h = n / 2;
        if targets.len() != h {
            return Err(Error::BadParams(format!("pairing needs {h} targets, got {}", targets.len())));
        }
        let mut seen = vec![false; h];
        for &t in &targets {
            if t < h || t >= 2 * h || std::mem::replace(&mut seen[t - h], true) {
                return Err(Error::BadParams("pairing is not a bijection onto the second half".into()));
            }
        }
        Ok(Self { targets })
    }

    /// The lexicographically minimal choice i -> i + floor(n/2).
    pub fn identity(n: usize) -> Self {
        let h = n / 2;
        Self {
            targets: (h..2 * h).collect(),
        }
    }

    pub fn target(&self, i: usize) -> usize {
        self.targets[i]
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

/// One planned switching of the coupling, for a row i of the first half.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannedSwitch {
    pub row: usize,
    /// true for I^+, false for I^-.
    pub plus: bool,
    pub spec: SwitchSpec,
    pub active: bool,
}

/// Everything F_{L,L'} needs beyond A: the good rows, J_i, J'_i and xi.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingPlan {
    pub n: usize,
    pub l: Vec<usize>,
    pub l_prime: Vec<usize>,
    pub pairing: Pairing,
    pub switches: Vec<PlannedSwitch>,
    pub xi: Vec<bool>,
}

impl CouplingPlan {
    pub fn i_plus(&self) -> Vec<usize> {
        self.switches.iter().filter(|s| s.plus).map(|s| s.row).collect()
    }

    pub fn i_minus(&self) -> Vec<usize> {
        self.switches.iter().filter(|s| !s.plus).map(|s| s.row).collect()
    }
}

fn restrict(row: &[usize], set: &[usize]) -> Vec<usize> {
    row.iter().copied().filter(|j| set.binary_search(j).is_ok()).collect()
}

/// Whether A is in good_{L,L'}(i, i'): L_A(i') = ∅ and
/// |L'_A(i') \ N_A(i)| >= |L_A(i)| >= 1. Sets must be sorted.
pub fn is_good(a: &RegularDigraph, l: &[usize], l_prime: &[usize], i: usize, ip: usize) -> bool {
    let li = restrict(a.out_neighbors(i), l);
    if li.is_empty() || !restrict(a.out_neighbors(ip), l).is_empty() {
        return false;
    }
    let free = restrict(a.out_neighbors(ip), l_prime)
        .into_iter()
        .filter(|&j| !a.has_edge(i, j))
        .count();
    free >= li.len()
}

pub fn build_coupling(
    a: &RegularDigraph,
    l: &[usize],
    l_prime: &[usize],
    pairing: &Pairing,
    rng: RngStream,
) -> Result<CouplingPlan> {
    let n = a.n();
    let mut l = l.to_vec();
    let mut lp = l_prime.to_vec();
    l.sort_unstable();
    l.dedup();
    lp.sort_unstable();
    lp.dedup();
    if l.is_empty() || lp.is_empty() {
        return Err(Error::BadParams("L and L' must be nonempty".into()));
    }
    if crate::digraph::sorted_intersection_len(&l, &lp) > 0 {
        return Err(Error::BadParams("L and L' must be disjoint".into()));
    }
    if let Some(&x) = l.iter().chain(&lp).find(|&&x| x >= n) {
        return Err(Error::IndexOutOfRange { index: x, n });
    }
    if pairing.len() != n / 2 {
        return Err(Error::BadParams("pairing built for a different n".into()));
    }
    let mut g = rng.rng();
    let mut switches = Vec::new();
    for i in 0..pairing.len() {
        let ip = pairing.target(i);
        // (holder of J, holder of J')
        let (plus, from, to) = if is_good(a, &l, &lp, i, ip) {
            (true, i, ip)
        } else if is_good(a, &l, &lp, ip, i) {
            (false, ip, i)
        } else {
            continue;
        };
        let give = restrict(a.out_neighbors(from), &l);
        let pool: Vec<usize> = restrict(a.out_neighbors(to), &lp)
            .into_iter()
            .filter(|&j| !a.has_edge(from, j))
            .collect();
        let mut take: Vec<usize> = sample_indices(&mut g, pool.len(), give.len())
            .into_iter()
            .map(|k| pool[k])
            .collect();
        take.sort_unstable();
        switches.push(PlannedSwitch {
            row: i,
            plus,
            spec: SwitchSpec::new((i, ip), give, take)?,
            active: false,
        });
    }
    let xi: Vec<bool> = (0..n).map(|_| g.random_bool(0.5)).collect();
    for s in &mut switches {
        s.active = xi[s.row];
    }
    Ok(CouplingPlan {
        n,
        l,
        l_prime: lp,
        pairing: pairing.clone(),
        switches,
        xi,
    })
}

/// F_{L,L'}(A): applies every active planned switching. Each active
/// switching must be switchable on the current state.
pub fn apply_coupling(a: &RegularDigraph, plan: &CouplingPlan) -> Result<RegularDigraph> {
    if a.n() != plan.n {
        return Err(Error::PlanMismatch(format!("plan is for n={}, digraph has n={}", plan.n, a.n())));
    }
    let mut cur = a.clone();
    for s in plan.switches.iter().filter(|s| s.active) {
        if switch_orientation(&cur, &s.spec)?.is_none() {
            return Err(Error::PlanMismatch(format!("row {} is not switchable", s.row + 1)));
        }
        cur = neighborhood_switch(&cur, &s.spec)?;
    }
    Ok(cur)
}

/// Draws `k` distinct indices of `0..n` uniformly, sorted.
pub(crate) fn random_subset<R: Rng + ?Sized>(g: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut v = sample_indices(g, n, k).into_vec();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id4() -> RegularDigraph {
        RegularDigraph::circulant(4, 1).unwrap()
    }

    #[test]
    fn simple_switch_flips_identity_pattern() {
        let a = id4();
        let b = simple_switch(&a, 0, 1, 0, 1).unwrap();
        assert_eq!(b.out_neighbors(0), &[1]);
        assert_eq!(b.out_neighbors(1), &[0]);
        b.check_invariants().unwrap();
        assert_eq!(simple_switch(&b, 0, 1, 0, 1).unwrap(), a);
    }

    #[test]
    fn simple_switch_leaves_other_patterns() {
        let a = RegularDigraph::circulant(4, 2).unwrap();
        // rows 0 and 1 both contain column 1
        assert_eq!(simple_switch(&a, 0, 1, 0, 1).unwrap(), a);
    }

    #[test]
    fn zero_steps_is_circulant() {
        let a = chain_sample(5, 2, 0, RngStream::new(1, 0)).unwrap();
        assert_eq!(a, RegularDigraph::circulant(5, 2).unwrap());
    }

    #[test]
    fn chain_outputs_are_regular() {
        for proposal in [ChainProposal::Vertex, ChainProposal::Edge] {
            let a = chain_sample_with(30, 7, 5000, proposal, RngStream::new(3, 1)).unwrap();
            a.check_invariants().unwrap();
            assert_ne!(a, RegularDigraph::circulant(30, 7).unwrap());
        }
    }

    #[test]
    fn two_by_two_chain_alternates() {
        // every proposal on A_{2,1} is a permutation pattern, so the chain flips each step
        let mut first = 0;
        for steps in 0..1000 {
            let a = chain_sample(2, 1, steps, RngStream::new(5, 0)).unwrap();
            assert_eq!(a.has_edge(0, 0), steps % 2 == 0);
            first += a.has_edge(0, 0) as usize;
        }
        assert_eq!(first, 500);
    }

    #[test]
    fn bad_degree() {
        assert!(matches!(chain_sample(4, 0, 1, RngStream::new(0, 0)), Err(Error::BadDegree { .. })));
        assert!(matches!(chain_sample(4, 4, 1, RngStream::new(0, 0)), Err(Error::BadDegree { .. })));
    }

    #[test]
    fn enumeration_counts_and_order() {
        assert_eq!(enumerate_regular(2, 1).unwrap().len(), 2);
        assert_eq!(enumerate_regular(3, 1).unwrap().len(), 6);
        let all = enumerate_regular(4, 2).unwrap();
        assert_eq!(all.len(), 90);
        let keys: Vec<Vec<bool>> = all
            .iter()
            .map(|a| (0..16).map(|k| a.has_edge(k / 4, k % 4)).collect())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(matches!(enumerate_regular(7, 2), Err(Error::TooLarge(_))));
    }

    #[test]
    fn rejection_zero_tries_exhausts() {
        assert!(matches!(rejection_sample(3, 1, RngStream::new(0, 0), 0), Err(Error::Exhausted { tries: 0 })));
        let a = rejection_sample(3, 1, RngStream::new(0, 0), 100_000).unwrap();
        a.check_invariants().unwrap();
    }

    #[test]
    fn switch_spec_validation() {
        assert!(SwitchSpec::new((0, 0), vec![1], vec![2]).is_err());
        assert!(SwitchSpec::new((0, 1), vec![1], vec![1]).is_err());
        assert!(SwitchSpec::new((0, 1), vec![1, 2], vec![3]).is_err());
        assert!(SwitchSpec::new((0, 1), vec![], vec![]).is_err());
    }

    #[test]
    fn neighborhood_switch_exchanges_blocks() {
        // rows: 0 -> {0,1}, 1 -> {2,3}, 2 -> {0,1}, 3 -> {2,3}
        let a = RegularDigraph::from_out_adj(4, 2, vec![vec![0, 1], vec![2, 3], vec![0, 1], vec![2, 3]]).unwrap();
        let spec = SwitchSpec::new((0, 1), vec![0, 1], vec![2, 3]).unwrap();
        let b = neighborhood_switch(&a, &spec).unwrap();
        assert_eq!(b.out_neighbors(0), &[2, 3]);
        assert_eq!(b.out_neighbors(1), &[0, 1]);
        b.check_invariants().unwrap();
        assert_eq!(switch_orientation(&b, &spec).unwrap(), Some(SwitchOrientation::Mirrored));
        assert_eq!(neighborhood_switch(&b, &spec).unwrap(), a);
        let stuck = SwitchSpec::new((0, 2), vec![0], vec![2]).unwrap();
        assert_eq!(neighborhood_switch(&a, &stuck).unwrap(), a);
    }

    #[test]
    fn coupling_with_no_good_rows_is_trivial() {
        let a = RegularDigraph::circulant(4, 4 - 1).unwrap();
        // every row meets L, so L_A(i') is never empty
        let plan = build_coupling(&a, &[0, 1], &[2], &Pairing::identity(4), RngStream::new(0, 0)).unwrap();
        assert!(plan.switches.is_empty());
        assert_eq!(apply_coupling(&a, &plan).unwrap(), a);
    }

    #[test]
    fn coupling_good_row_and_inverse() {
        // 0 -> {0,1}, pi(0)=2 -> {2,3}; L = {0}, L' = {2,3}
        let a = RegularDigraph::from_out_adj(4, 2, vec![vec![0, 1], vec![2, 3], vec![2, 3], vec![0, 1]]).unwrap();
        assert!(is_good(&a, &[0], &[2, 3], 0, 2));
        for seed in 0..20 {
            let plan = build_coupling(&a, &[0], &[2, 3], &Pairing::identity(4), RngStream::new(seed, 0)).unwrap();
            assert_eq!(plan.i_plus(), vec![0]);
            let s = &plan.switches[0];
            assert_eq!(s.spec.give(), &[0]);
            assert_eq!(s.spec.take().len(), 1);
            let b = apply_coupling(&a, &plan).unwrap();
            b.check_invariants().unwrap();
            assert_eq!(b == a, plan.switches.iter().all(|s| !s.active));
            assert_eq!(apply_coupling(&b, &plan).unwrap(), a);
        }
    }

    #[test]
    fn zero_xi_is_identity() {
        let a = RegularDigraph::from_out_adj(4, 2, vec![vec![0, 1], vec![2, 3], vec![2, 3], vec![0, 1]]).unwrap();
        let mut plan = build_coupling(&a, &[0], &[2, 3], &Pairing::identity(4), RngStream::new(1, 0)).unwrap();
        plan.xi.iter_mut().for_each(|x| *x = false);
        plan.switches.iter_mut().for_each(|s| s.active = false);
        assert_eq!(apply_coupling(&a, &plan).unwrap(), a);
    }

    #[test]
    fn plan_mismatch_detected() {
        let a = RegularDigraph::from_out_adj(4, 2, vec![vec![0, 1], vec![2, 3], vec![2, 3], vec![0, 1]]).unwrap();
        let mut plan = build_coupling(&a, &[0], &[2, 3], &Pairing::identity(4), RngStream::new(1, 0)).unwrap();
        plan.switches[0].active = true;
        let other = RegularDigraph::from_out_adj(4, 2, vec![vec![0, 1], vec![2, 3], vec![0, 1], vec![2, 3]]).unwrap();
        assert!(matches!(apply_coupling(&other, &plan), Err(Error::PlanMismatch(_))));
        assert!(matches!(apply_coupling(&RegularDigraph::circulant(6, 2).unwrap(), &plan), Err(Error::PlanMismatch(_))));
    }

    #[test]
    fn pairing_validation() {
        assert!(Pairing::new(5, vec![3, 2]).is_ok());
        assert!(Pairing::new(5, vec![2, 2]).is_err());
        assert!(Pairing::new(5, vec![1, 2]).is_err());
        assert_eq!(Pairing::identity(5).target(1), 3);
    }
}
