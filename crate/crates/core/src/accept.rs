//! The acceptance suite. Each criterion runs a seeded experiment and
//! compares it with a fixed tolerance; failures are reported as data.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::digraph::RegularDigraph;
use crate::ensembles::{
    circular_law_experiment, compare_stieltjes, gaussian_order_stats, kesten_mckay_experiment, sample_bernoulli,
    singular_law_agreement, ssv_tail, wegner_profile, ComparisonReport, ZMode,
};
use crate::error::{Error, Result};
use crate::factor::{factor_probability, find_regular_factor, ore_ryser_exhaustive, ore_ryser_sum};
use crate::matrix::DenseMatrix;
use crate::netgeom::{bimodal_sets, build_flat_net, min_gap, UnitVector};
use crate::regularity::{check_expansion, verify_expansion_consequences};
use crate::rng::RngStream;
use crate::sampler::{
    apply_coupling, build_coupling, chain_sample, default_chain_steps, enumerate_regular, enumerate_row_masks,
    neighborhood_switch, rejection_sample_counted, simple_switch, switch_orientation, Pairing, SwitchSpec,
};
use crate::spectral::{
    eigenvalue_list, eigenvalues, hermitize, log_potential, log_potential_from_singular, resolvent_derivative_check,
    shifted_singular_values, singular_values, stieltjes_g, unmatched_eigenvalues, StieltjesRoute,
};
use crate::stats::chi_square_uniform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Fast,
    Full,
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            _ => Err(Error::Parse(format!("unknown level {s:?}, expected fast or full"))),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Fast => "fast",
            Level::Full => "full",
        })
    }
}

/// Static description of one criterion.
#[derive(Debug, Clone, Copy)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub level: Level,
    /// Non-binding criteria are reported but never fail the suite.
    pub binding: bool,
}

pub const CRITERIA: [Criterion; 20] = [
    crit(1, "hermitization identity", Level::Fast, true),
    crit(2, "resolvent contract", Level::Fast, true),
    crit(3, "resolvent derivative identity", Level::Fast, true),
    crit(4, "log-potential identity", Level::Fast, true),
    crit(5, "enumeration oracle", Level::Fast, true),
    crit(6, "sampler uniformity", Level::Fast, true),
    crit(7, "coupling uniformity", Level::Fast, true),
    crit(8, "switching algebra and expansion stability", Level::Fast, true),
    crit(9, "expansion consequences", Level::Fast, true),
    crit(10, "reflection trick", Level::Fast, true),
    crit(11, "circular law", Level::Full, true),
    crit(12, "oriented Kesten-McKay (informational)", Level::Full, false),
    crit(13, "smallest singular value", Level::Full, true),
    crit(14, "Wegner profile", Level::Full, true),
    crit(15, "ensemble agreement", Level::Full, true),
    crit(16, "Stieltjes comparison", Level::Full, true),
    crit(17, "Gaussian order statistics", Level::Fast, true),
    crit(18, "interlacing", Level::Full, true),
    crit(19, "net machinery", Level::Fast, true),
    crit(20, "factor module", Level::Fast, true),
];

const fn crit(id: u8, title: &'static str, level: Level, binding: bool) -> Criterion {
    Criterion {
        id,
        title,
        level,
        binding,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: String,
    pub level: Level,
    pub binding: bool,
    pub pass: bool,
    pub detail: String,
    /// Wall time; left out of serialized output so reruns compare equal.
    #[serde(skip_serializing, default)]
    pub seconds: f64,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match (self.pass, self.binding) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "FAIL (non-binding)",
        };
        write!(
            f,
            "criterion {:02} {verdict}: {}: {} [{:.1} s]",
            self.id, self.title, self.detail, self.seconds
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceSummary {
    pub level: Level,
    pub seed: u64,
    pub outcomes: Vec<CriterionOutcome>,
    pub passed: usize,
    pub failed: usize,
    /// Ids of binding criteria that failed.
    pub binding_failures: Vec<u8>,
}

impl AcceptanceSummary {
    pub fn all_binding_pass(&self) -> bool {
        self.binding_failures.is_empty()
    }
}

pub const DEFAULT_ACCEPT_SEED: u64 = 20_240_601;

/// Runs every criterion at or below `level`.
pub fn acceptance_suite(level: Level, seed: u64) -> AcceptanceSummary {
    acceptance_suite_with(level, seed, |_| {})
}

/// As [`acceptance_suite`], calling `report` after each criterion.
pub fn acceptance_suite_with(level: Level, seed: u64, mut report: impl FnMut(&CriterionOutcome)) -> AcceptanceSummary {
    let mut suite = Suite {
        seed,
        interlacing: Vec::new(),
    };
    let mut outcomes = Vec::new();
    for c in CRITERIA.iter().filter(|c| c.level <= level) {
        let start = Instant::now();
        let (pass, detail) = match suite.run(c.id) {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        let outcome = CriterionOutcome {
            id: c.id,
            title: c.title.into(),
            level: c.level,
            binding: c.binding,
            pass,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        };
        report(&outcome);
        outcomes.push(outcome);
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    let binding_failures = outcomes.iter().filter(|o| o.binding && !o.pass).map(|o| o.id).collect();
    AcceptanceSummary {
        level,
        seed,
        failed: outcomes.len() - passed,
        passed,
        outcomes,
        binding_failures,
    }
}

type Verdict = Result<(bool, String)>;

struct Suite {
    seed: u64,
    /// (criterion, n, per-sample interlacing KS) gathered from 11 to 15.
    interlacing: Vec<(u8, usize, Vec<f64>)>,
}

impl Suite {
    fn stream(&self, id: u8) -> RngStream {
        RngStream::new(self.seed, id as u64)
    }

    fn run(&mut self, id: u8) -> Verdict {
        let rng = self.stream(id);
        match id {
            1 => hermitization_identity(rng),
            2 => resolvent_contract(rng),
            3 => resolvent_derivative(rng),
            4 => log_potential_identity(rng),
            5 => enumeration_oracle(),
            6 => sampler_uniformity(rng),
            7 => coupling_uniformity(rng),
            8 => switching_algebra(rng),
            9 => expansion_consequences(rng),
            10 => reflection_trick(rng),
            11 => {
                let (report, _) = circular_law_experiment(2000, 200, 1, rng)?;
                self.keep(11, &report);
                let radial = report.metric("radial_ks_max").unwrap_or(f64::NAN);
                let angular = report.metric("angular_ks_max").unwrap_or(f64::NAN);
                Ok((
                    radial <= 0.05 && angular <= 0.05,
                    format!("radial KS {radial:.4}, angular KS {angular:.4} (tol 0.05)"),
                ))
            }
            12 => {
                let report = kesten_mckay_experiment(1000, 3, 5, rng)?;
                self.keep(12, &report);
                let radial = report.column("radial_ks").unwrap_or_default();
                let worst = radial.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mean = radial.iter().sum::<f64>() / radial.len() as f64;
                Ok((worst <= 0.08, format!("radial KS max {worst:.4}, mean {mean:.4} (tol 0.08)")))
            }
            13 => {
                let report = ssv_tail(1000, 100, Complex64::new(1.0, 1.0), &ZMode::ScalarShift, 50, rng)?;
                self.keep(13, &report);
                let sn_a = report.metric("sn_a_min").unwrap_or(f64::NAN);
                let sn_shift = report.metric("sn_abar_minus_z_min").unwrap_or(f64::NAN);
                let floor = 1e-6;
                Ok((
                    sn_a > 1e-10 && sn_shift >= floor,
                    format!("min s_n(A) {sn_a:.3e} (> 1e-10), min s_n(Abar - z) {sn_shift:.3e} (>= n^-2 = {floor:.0e})"),
                ))
            }
            14 => {
                let etas: Vec<f64> = (1..=50).map(|k| 0.02 * k as f64).collect();
                let report = wegner_profile(1000, 100, Complex64::new(1.0, 1.0), &etas, 20, rng)?;
                self.keep(14, &report);
                let frac = report.metric("pass_fraction").unwrap_or(0.0);
                let fitted = report.fitted_constant.unwrap_or(f64::NAN);
                Ok((
                    frac >= 0.95,
                    format!("bound holds in {:.0}% of samples (need 95%), fitted constant {fitted:.3}", 100.0 * frac),
                ))
            }
            15 => {
                let mut worst = 0.0f64;
                let mut parts = Vec::new();
                for (k, z) in [0.0, 1.0].into_iter().enumerate() {
                    let report = singular_law_agreement(1000, 200, Complex64::new(z, 0.0), 20, rng.child(k as u64))?;
                    self.keep(15, &report);
                    let ks = report.metric("ks_mean_laws").unwrap_or(f64::NAN);
                    worst = worst.max(ks);
                    parts.push(format!("z={z}: {ks:.4}"));
                }
                Ok((worst <= 0.05, format!("KS {} (tol 0.05)", parts.join(", "))))
            }
            16 => stieltjes_comparison(rng),
            17 => order_statistics(rng),
            18 => Ok(self.interlacing_verdict()),
            19 => net_machinery(rng),
            20 => factor_module(rng),
            _ => Err(Error::BadParams(format!("no criterion {id}"))),
        }
    }

    fn keep(&mut self, id: u8, report: &ComparisonReport) {
        if let Some(col) = report.column("interlacing_ks") {
            self.interlacing.push((id, report.n, col));
        }
    }

    fn interlacing_verdict(&self) -> (bool, String) {
        let sources: Vec<u8> = {
            let mut s: Vec<u8> = self.interlacing.iter().map(|x| x.0).collect();
            s.dedup();
            s
        };
        if !(11..=15).all(|id| sources.contains(&id)) {
            return (false, format!("interlacing data only from criteria {sources:?}"));
        }
        let mut samples = 0;
        let mut worst_ratio = 0.0f64;
        for (_, n, col) in &self.interlacing {
            samples += col.len();
            for v in col {
                worst_ratio = worst_ratio.max(v * *n as f64);
            }
        }
        (
            worst_ratio <= 1.0 + 1e-12,
            format!("{samples} samples, max n * KS = {worst_ratio:.3} (tol 1)"),
        )
    }
}

fn complex_gaussian(n: usize, rng: RngStream) -> DenseMatrix {
    let mut g = rng.rng();
    DenseMatrix::from_fn(n, n, |_, _| Complex64::new(g.sample(StandardNormal), g.sample(StandardNormal)))
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn hermitization_identity(rng: RngStream) -> Verdict {
    let mut worst = 0.0f64;
    for k in 0..20 {
        let m = complex_gaussian(50, rng.child(k));
        for z in [Complex64::new(0.0, 0.0), Complex64::new(1.0, 1.0)] {
            let eig = sorted(hermitize(&m, z)?.eigenvalues()?);
            let sv = shifted_singular_values(&m, z)?;
            let expected = sorted(sv.descending.iter().flat_map(|&s| [s, -s]).collect());
            for (a, b) in eig.iter().zip(&expected) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    Ok((worst <= 1e-8, format!("max deviation {worst:.3e} (tol 1e-8)")))
}

fn resolvent_contract(rng: RngStream) -> Verdict {
    let ws = [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.1), Complex64::new(1.0, 1.0)];
    let mut norm_excess = f64::NEG_INFINITY;
    let mut route_gap = 0.0f64;
    for k in 0..20 {
        let m = complex_gaussian(40, rng.child(k));
        let z = Complex64::new(0.5, -0.25);
        let mut view = hermitize(&m, z)?;
        for w in ws {
            let r = view.resolvent(w)?;
            let norm = singular_values(&r)?.largest();
            norm_excess = norm_excess.max(norm - 1.0 / w.im);
            let direct = stieltjes_g(&m, z, w, StieltjesRoute::Direct)?;
            let via_sv = stieltjes_g(&m, z, w, StieltjesRoute::Sv)?;
            route_gap = route_gap.max((direct - via_sv).norm());
        }
    }
    Ok((
        norm_excess <= 1e-10 && route_gap <= 1e-8,
        format!("max ||R|| - 1/Im w = {norm_excess:.3e} (tol 1e-10), route gap {route_gap:.3e} (tol 1e-8)"),
    ))
}

fn resolvent_derivative(rng: RngStream) -> Verdict {
    let mut worst = 0.0f64;
    for k in 0..10 {
        let s = rng.child(k);
        let m = complex_gaussian(20, s);
        let mut g = s.child(0).rng();
        let entry = (g.random_range(0..20), g.random_range(0..20));
        let report = resolvent_derivative_check(&m, Complex64::new(1.0, 0.5), Complex64::new(0.2, 1.0), entry, 1e-6)?;
        worst = worst.max(report.max_deviation);
    }
    Ok((worst <= 1e-4, format!("max deviation {worst:.3e} (tol 1e-4)")))
}

fn log_potential_identity(rng: RngStream) -> Verdict {
    let z = Complex64::new(2.0, 1.0);
    let mut worst = 0.0f64;
    for k in 0..20 {
        let m = complex_gaussian(30, rng.child(k)).scale(1.0 / 30f64.sqrt());
        let from_eigs = log_potential(&eigenvalues(&m)?, z);
        let from_svs = log_potential_from_singular(&singular_values(&m.shift_diagonal(z))?.measure());
        worst = worst.max((from_eigs - from_svs).abs() / from_svs.abs().max(1e-300));
    }
    Ok((worst <= 1e-6, format!("max relative gap {worst:.3e} (tol 1e-6)")))
}

/// Number of 4x4 0-1 matrices with all line sums 2, by scanning all 2^16.
fn brute_force_a42() -> usize {
    (0u32..1 << 16)
        .filter(|&mask| {
            let bit = |i: u32, j: u32| (mask >> (4 * i + j)) & 1;
            (0..4).all(|i| (0..4).map(|j| bit(i, j)).sum::<u32>() == 2)
                && (0..4).all(|j| (0..4).map(|i| bit(i, j)).sum::<u32>() == 2)
        })
        .count()
}

fn enumeration_oracle() -> Verdict {
    let c21 = enumerate_regular(2, 1)?.len();
    let c31 = enumerate_regular(3, 1)?.len();
    let c42 = enumerate_regular(4, 2)?.len();
    let brute = brute_force_a42();
    Ok((
        c21 == 2 && c31 == 6 && c42 == 90 && brute == 90,
        format!("|A_2,1| = {c21}, |A_3,1| = {c31}, |A_4,2| = {c42}, brute force {brute}"),
    ))
}

/// Class index of each element of A_{4,2}, keyed by row masks.
fn a42_index() -> Result<HashMap<Vec<u64>, usize>> {
    Ok(enumerate_regular(4, 2)?
        .into_iter()
        .enumerate()
        .map(|(k, a)| (a.row_masks(), k))
        .collect())
}

fn chi_square_verdict(classes: &HashMap<Vec<u64>, usize>, draws: &[Vec<u64>]) -> Verdict {
    let mut counts = vec![0u64; classes.len()];
    for key in draws {
        let k = classes
            .get(key)
            .ok_or_else(|| Error::NumericalFailure("draw outside A_4,2".into()))?;
        counts[*k] += 1;
    }
    let (stat, p) = chi_square_uniform(&counts);
    Ok((p > 0.001, format!("chi-square {stat:.1} on 89 dof, p = {p:.4} (need > 0.001)")))
}

fn sampler_uniformity(rng: RngStream) -> Verdict {
    let classes = a42_index()?;
    let draws: Vec<Vec<u64>> = (0..100_000u64)
        .into_par_iter()
        .map(|k| chain_sample(4, 2, 200, rng.child(k)).map(|a| a.row_masks()))
        .collect::<Result<_>>()?;
    chi_square_verdict(&classes, &draws)
}

fn coupling_draws(rng: RngStream, all: &[RegularDigraph], l: &[usize], l_prime: &[usize]) -> Result<Vec<Vec<u64>>> {
    let pairing = Pairing::identity(4);
    (0..100_000u64)
        .into_par_iter()
        .map(|k| {
            let s = rng.child(k);
            let a = &all[s.rng().random_range(0..all.len())];
            let plan = build_coupling(a, l, l_prime, &pairing, s.child(0))?;
            Ok(apply_coupling(a, &plan)?.row_masks())
        })
        .collect()
}

/// Uniformity is checked with L = {1, 2}, L' = {3, 4}. The law of F is not
/// uniform for every (L, L'): at (4, 2) it fails whenever |L| = 1 and
/// |L'| = 2, and that case is reported alongside.
fn coupling_uniformity(rng: RngStream) -> Verdict {
    let all = enumerate_regular(4, 2)?;
    let classes = a42_index()?;
    let (pass, detail) = chi_square_verdict(&classes, &coupling_draws(rng.child(0), &all, &[0, 1], &[2, 3])?)?;
    let (_, other) = chi_square_verdict(&classes, &coupling_draws(rng.child(1), &all, &[0], &[2, 3])?)?;
    let other = other.trim_end_matches(" (need > 0.001)");
    Ok((
        pass,
        format!("L={{1,2}}, L'={{3,4}}: {detail}; for comparison L={{1}}, L'={{3,4}}: {other}"),
    ))
}

/// Every switching spec at the pair (i, i') that is switchable on `a`.
fn admissible_specs(a: &RegularDigraph, i: usize, ip: usize) -> Vec<SwitchSpec> {
    let only = |x: usize, y: usize| -> Vec<usize> {
        a.out_neighbors(x).iter().copied().filter(|&j| !a.has_edge(y, j)).collect()
    };
    let (d1, d2) = (only(i, ip), only(ip, i));
    let mut specs = Vec::new();
    for k in 1..=d1.len().min(d2.len()) {
        for give in combinations(&d1, k) {
            for take in combinations(&d2, k) {
                if let Ok(s) = SwitchSpec::new((i, ip), give.clone(), take) {
                    specs.push(s);
                }
            }
        }
    }
    specs
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    crate::regularity::for_each_combination(items.len(), k, &mut |idx| {
        out.push(idx.iter().map(|&t| items[t]).collect());
        true
    });
    out
}

fn involutions(rng: RngStream) -> Result<(usize, usize)> {
    let (n, d) = (8, 3);
    let mut failures = 0;
    let mut checked = 0;
    for k in 0..1000u64 {
        let s = rng.child(k);
        let a = chain_sample(n, d, default_chain_steps(n, d), s)?;
        let mut g = s.child(0).rng();
        // simple switching on a switchable 2x2 pattern
        loop {
            let (i1, i2, j1, j2) = (
                g.random_range(0..n),
                g.random_range(0..n),
                g.random_range(0..n),
                g.random_range(0..n),
            );
            if i1 == i2 || j1 == j2 {
                continue;
            }
            let b = simple_switch(&a, i1, i2, j1, j2)?;
            if b == a {
                continue;
            }
            checked += 1;
            failures += (simple_switch(&b, i1, i2, j1, j2)? != a) as usize;
            break;
        }
        // neighbourhood switching with random J, J'
        loop {
            let i = g.random_range(0..n);
            let ip = g.random_range(0..n);
            if i == ip {
                continue;
            }
            let specs = admissible_specs(&a, i, ip);
            if specs.is_empty() {
                continue;
            }
            let spec = &specs[g.random_range(0..specs.len())];
            let b = neighborhood_switch(&a, spec)?;
            checked += 1;
            failures += (b == a || neighborhood_switch(&b, spec)? != a) as usize;
            break;
        }
    }
    Ok((checked, failures))
}

fn switching_algebra(rng: RngStream) -> Verdict {
    let (checked, inv_failures) = involutions(rng.child(0))?;
    let (n, d, kappa) = (6, 2, 0.4);
    let masks = enumerate_row_masks(n, d, 6)?;
    let budget = 1 << 20;
    let s = rng.child(1);
    // (certified inputs, switched outputs checked, violations)
    let (certified, outputs, violations) = masks
        .par_iter()
        .enumerate()
        .map(|(idx, rows)| -> Result<(usize, usize, usize)> {
            let a = RegularDigraph::from_row_masks(n, d, rows)?;
            let exp = check_expansion(&a, kappa, budget, s)?;
            if !(exp.verdict.is_certified() && exp.verdict.is_pass()) {
                return Ok((0, 0, 0));
            }
            let mut outputs = 0;
            let mut violations = 0;
            let mut check = |b: &RegularDigraph| -> Result<()> {
                let r = check_expansion(b, kappa / 2.0, budget, s)?;
                outputs += 1;
                violations += !(r.verdict.is_certified() && r.verdict.is_pass()) as usize;
                Ok(())
            };
            // every single switching
            for i in 0..n {
                for ip in i + 1..n {
                    for spec in admissible_specs(&a, i, ip) {
                        check(&neighborhood_switch(&a, &spec)?)?;
                    }
                }
            }
            // random compositions over a perfect matching of the rows
            let mut g = s.child(idx as u64).rng();
            for _ in 0..3 {
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut g);
                let mut b = a.clone();
                for pair in order.chunks(2) {
                    let specs = admissible_specs(&a, pair[0], pair[1]);
                    if specs.is_empty() || !g.random_bool(0.5) {
                        continue;
                    }
                    let spec = &specs[g.random_range(0..specs.len())];
                    if switch_orientation(&b, spec)?.is_some() {
                        b = neighborhood_switch(&b, spec)?;
                    }
                }
                check(&b)?;
            }
            Ok((1, outputs, violations))
        })
        .try_reduce(|| (0, 0, 0), |x, y| Ok((x.0 + y.0, x.1 + y.1, x.2 + y.2)))?;
    Ok((
        inv_failures == 0 && violations == 0 && certified > 0,
        format!(
            "{checked} involutions, {inv_failures} failures; {certified}/{} of A_6,2 certified in A^exp(0.4), \
             {outputs} switched outputs, {violations} outside A^exp(0.2)",
            masks.len()
        ),
    ))
}

fn expansion_consequences(rng: RngStream) -> Verdict {
    let (n, d, kappa) = (6, 2, 0.4);
    let masks = enumerate_row_masks(n, d, 6)?;
    let budget = 1 << 20;
    let (certified, violations) = masks
        .par_iter()
        .map(|rows| -> Result<(usize, usize)> {
            let a = RegularDigraph::from_row_masks(n, d, rows)?;
            let exp = check_expansion(&a, kappa, budget, rng)?;
            if !(exp.verdict.is_certified() && exp.verdict.is_pass()) {
                return Ok((0, 0));
            }
            let r = verify_expansion_consequences(&a, &exp, budget, rng)?;
            Ok((1, !(r.verdict.is_certified() && r.verdict.is_pass()) as usize))
        })
        .try_reduce(|| (0, 0), |x, y| Ok((x.0 + y.0, x.1 + y.1)))?;
    Ok((
        violations == 0 && certified > 0,
        format!("{certified} certified instances of A_6,2, {violations} violations"),
    ))
}

fn reflection_trick(rng: RngStream) -> Verdict {
    let (n, d) = (8, 3);
    let mut worst = 0;
    for k in 0..20 {
        let a = chain_sample(n, d, default_chain_steps(n, d), rng.child(k))?.to_dense();
        let neg = eigenvalue_list(&a.scale(-1.0))?;
        let refl = eigenvalue_list(&DenseMatrix::ones(n, n).sub(&a)?)?;
        worst = worst.max(unmatched_eigenvalues(&neg, &refl, 1e-6));
    }
    Ok((worst <= 1, format!("at most {worst} unmatched eigenvalue(s) per sample (tol 1)")))
}

fn stieltjes_comparison(rng: RngStream) -> Verdict {
    let degrees = [50usize, 200, 800];
    let mut diffs = Vec::new();
    let mut ses = Vec::new();
    for (k, &d) in degrees.iter().enumerate() {
        let report = compare_stieltjes(1000, d, Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), 50, rng.child(k as u64))?;
        diffs.push(report.metric("difference").unwrap_or(f64::NAN));
        ses.push(report.metric("difference_se").unwrap_or(f64::NAN));
    }
    let monotone = diffs.windows(2).all(|w| w[1] < w[0]);
    // least squares in log scale for diff = C d^{-1/2}
    let log_c = degrees
        .iter()
        .zip(&diffs)
        .map(|(&d, &x)| x.ln() + 0.5 * (d as f64).ln())
        .sum::<f64>()
        / degrees.len() as f64;
    let c = log_c.exp();
    let within = degrees.iter().zip(&diffs).all(|(&d, &x)| {
        let ratio = x / (c * (d as f64).powf(-0.5));
        (1.0 / 3.0..=3.0).contains(&ratio)
    });
    let listing: Vec<String> = degrees
        .iter()
        .zip(diffs.iter().zip(&ses))
        .map(|(d, (x, s))| format!("d={d}: {x:.2e} (se {s:.1e})"))
        .collect();
    Ok((
        monotone && within,
        format!(
            "{}; monotone {monotone}, within factor 3 of {c:.3e} d^-1/2: {within}",
            listing.join(", ")
        ),
    ))
}

fn order_statistics(rng: RngStream) -> Verdict {
    let n = 500;
    let k = (n as f64).sqrt().ceil() as usize;
    let mut parts = Vec::new();
    let mut ok = true;
    for (idx, (label, m)) in [("0", DenseMatrix::zeros(n, n)), ("-I", DenseMatrix::identity(n).scale(-1.0))]
        .into_iter()
        .enumerate()
    {
        let report = gaussian_order_stats(n, &m, k, 50, rng.child(idx as u64))?;
        let bad = report.metric("samples_with_violations").unwrap_or(f64::NAN);
        ok &= report.pass == Some(true);
        parts.push(format!("M={label}: {bad} samples with violations, fitted c {:.3}", report.fitted_constant.unwrap_or(f64::NAN)));
    }
    Ok((ok, parts.join("; ")))
}

fn random_flat_vector(g: &mut impl Rng, n: usize, m: usize, radius: f64) -> Result<UnitVector> {
    let normal = |g: &mut dyn rand::RngCore| Complex64::new(g.sample(StandardNormal), g.sample(StandardNormal));
    let mut support: Vec<usize> = (0..n).collect();
    support.shuffle(g);
    support.truncate(m);
    let mut sparse = vec![Complex64::new(0.0, 0.0); n];
    for &j in &support {
        sparse[j] = normal(g);
    }
    let x = UnitVector::project_mean_zero(&sparse)?;
    // noise orthogonal to 1 and to P(V_J): project out 1 and the span of
    // P e_j, j in the support
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for &j in &support {
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[j] = Complex64::new(1.0, 0.0);
        let mut v = UnitVector::project_mean_zero(&e)?.components().to_vec();
        for b in &basis {
            let dot: Complex64 = b.iter().zip(&v).map(|(p, q)| p.conj() * q).sum();
            v.iter_mut().zip(b).for_each(|(q, p)| *q -= dot * p);
        }
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        basis.push(v.into_iter().map(|c| c / norm).collect());
    }
    let raw: Vec<Complex64> = (0..n).map(|_| normal(g)).collect();
    let mut y = UnitVector::project_mean_zero(&raw)?.components().to_vec();
    for b in &basis {
        let dot: Complex64 = b.iter().zip(&y).map(|(p, q)| p.conj() * q).sum();
        y.iter_mut().zip(b).for_each(|(q, p)| *q -= dot * p);
    }
    let y = UnitVector::normalized(y)?;
    // distance to the subspace is sin(theta), at most `radius`
    let s = radius * g.random::<f64>().sqrt();
    let c = (1.0 - s * s).sqrt();
    let combined: Vec<Complex64> = x
        .components()
        .iter()
        .zip(y.components())
        .map(|(a, b)| a * c + b * s)
        .collect();
    UnitVector::normalized(combined)
}

fn net_machinery(rng: RngStream) -> Verdict {
    let (n, m, rho) = (8, 2, 0.5);
    let net = build_flat_net(n, m, rho)?;
    let bad_points = (0..net.cardinality())
        .into_par_iter()
        .filter(|&i| {
            let p = net.point(i);
            let cert = net.certificate(i);
            !(p.is_unit() && p.is_mean_zero() && cert.member && cert.recompute_residual(&p) <= rho)
        })
        .count();
    let s_cov = net.coverage_radius();
    let mut g = rng.child(0).rng();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let u = random_flat_vector(&mut g, n, m, s_cov)?;
        worst = worst.max(net.nearest(&u)?.1);
    }
    let bound_ok = (net.cardinality() as f64) <= net.cardinality_bound();

    let (bn, bm, brho) = (64, 4, 0.3);
    let sn = (bn as f64).sqrt();
    let mut g = rng.child(1).rng();
    let mut tested = 0;
    let mut weak_bad = 0;
    let mut strong_bad = 0;
    let mut strong_checks = 0;
    while tested < 100 {
        let raw: Vec<Complex64> = (0..bn)
            .map(|_| Complex64::new(g.sample(StandardNormal), g.sample(StandardNormal)))
            .collect();
        let u = UnitVector::project_mean_zero(&raw)?;
        let b = match bimodal_sets(&u, bm, brho) {
            Ok(b) => b,
            Err(Error::IsFlat { .. }) => continue,
            Err(e) => return Err(e),
        };
        tested += 1;
        if b.j1.len() < bm || min_gap(&u, &b.j1, &b.j2) < brho / (2.0 * sn) {
            weak_bad += 1;
        }
        let c = u.components();
        let rmax = b.j1_prime.len().min(b.j2.len());
        for _ in 0..10 {
            if rmax == 0 {
                strong_bad += 1;
                break;
            }
            let r = g.random_range(1..=rmax);
            let mut f = b.j1_prime.clone();
            let mut h = b.j2.clone();
            f.shuffle(&mut g);
            h.shuffle(&mut g);
            let avg = |set: &[usize]| set.iter().map(|&j| c[j]).sum::<Complex64>() / r as f64;
            strong_checks += 1;
            if (avg(&f[..r]) - avg(&h[..r])).norm() < brho / (4.0 * sn) {
                strong_bad += 1;
            }
        }
    }
    Ok((
        bad_points == 0 && worst <= rho && bound_ok && weak_bad == 0 && strong_bad == 0,
        format!(
            "{} net points, {bad_points} not flat/unit/mean-zero; cardinality within bound {:.3e}: {bound_ok}; \
             1000 vectors of Flat0(m, {s_cov:.4}) covered within {worst:.4} (tol {rho}); \
             bimodal on {tested} vectors: {weak_bad} weak and {strong_bad}/{strong_checks} strong violations",
            net.cardinality(),
            net.cardinality_bound()
        ),
    ))
}

fn factor_module(rng: RngStream) -> Verdict {
    let s = rng.child(0);
    let (disagree, bad_witness) = (0..500u64)
        .into_par_iter()
        .map(|k| -> Result<(usize, usize)> {
            let t = s.child(k);
            let mut g = t.rng();
            let n = g.random_range(2..=10);
            let d = g.random_range(1..=n);
            let p = g.random_range(0.3..0.95);
            let b = sample_bernoulli(n, p, t.child(0));
            let flow = find_regular_factor(&b, d)?;
            let exhaustive = ore_ryser_exhaustive(&b, d)?;
            let mut bad = 0;
            if let Some(f) = &flow.factor {
                let inside = (0..n).all(|i| f.out_neighbors(i).iter().all(|&j| b.get(i, j).re == 1.0));
                bad += !(inside && f.d() == d) as usize;
            }
            for cert in [&flow.certificate, &exhaustive.certificate].into_iter().flatten() {
                bad += (ore_ryser_sum(&b, d, &cert.columns)? >= d * cert.columns.len()) as usize;
            }
            Ok(((flow.exists != exhaustive.exists) as usize, bad))
        })
        .try_reduce(|| (0, 0), |x, y| Ok((x.0 + y.0, x.1 + y.1)))?;

    let accepted = 2000u64;
    let tries: u64 = (0..accepted)
        .into_par_iter()
        .map(|k| rejection_sample_counted(4, 2, rng.child(1).child(k), u64::MAX, 16).map(|o| o.tries))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    let rate = accepted as f64 / tries as f64;
    let expected = 90.0 / 65_536.0;
    let sigma = (expected * (1.0 - expected) / tries as f64).sqrt();
    let z_score = (rate - expected) / sigma;

    let report = factor_probability(200, 0.3, 0.3, 100, rng.child(2))?;
    // a factor needs every line degree >= d; count samples where that fails
    let deficient = (0..100u64)
        .into_par_iter()
        .filter(|&k| {
            let b = sample_bernoulli(200, 0.3, rng.child(2).child(k));
            (0..200).any(|i| {
                let row = (0..200).filter(|&j| b.get(i, j).re == 1.0).count();
                let col = (0..200).filter(|&j| b.get(j, i).re == 1.0).count();
                row < report.d || col < report.d
            })
        })
        .count();
    Ok((
        disagree == 0 && bad_witness == 0 && z_score.abs() <= 3.0 && report.successes >= 99,
        format!(
            "500 instances: {disagree} disagreements, {bad_witness} bad witnesses; acceptance rate {rate:.4e} vs \
             {expected:.4e} ({z_score:+.2} sigma); factor found in {}/100 (need 99) at d={}, \
             {deficient}/100 samples have a line of degree < d",
            report.successes,
            report.d
        ),
    ))
}
