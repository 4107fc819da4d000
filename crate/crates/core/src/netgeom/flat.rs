//! One-sided certificates of (m, rho)-flatness.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::concentration::{concentration_with_center, levy_set, ConcentrationMode, EXACT_MAX_N};
use super::UnitVector;
use crate::error::{Error, Result};

const MAX_ROUNDS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlatnessMethod {
    Alternating,
    ConcentrationImplied,
    NetWitness,
}

/// `u` is within `residual` of `v + lambda * 1`, `v` being `u - lambda * 1`
/// restricted to `support`. `member == false` only means no certificate
/// was found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatnessCertificate {
    pub member: bool,
    pub lambda: Complex64,
    pub support: Vec<usize>,
    pub residual: f64,
    pub method: FlatnessMethod,
}

impl FlatnessCertificate {
    /// The residual recomputed from `u`, `lambda` and `support`.
    pub fn recompute_residual(&self, u: &UnitVector) -> f64 {
        off_support_residual(u.components(), self.lambda, &self.support)
    }
}

pub(crate) fn off_support_residual(u: &[Complex64], lambda: Complex64, support: &[usize]) -> f64 {
    let mut on = vec![false; u.len()];
    for &j in support {
        on[j] = true;
    }
    u.iter()
        .zip(&on)
        .filter(|(_, &s)| !s)
        .map(|(z, _)| (z - lambda).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// The m coordinates farthest from lambda, ties to the lower index.
fn farthest(u: &[Complex64], lambda: Complex64, m: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..u.len()).collect();
    let dist: Vec<f64> = u.iter().map(|z| (z - lambda).norm_sqr()).collect();
    idx.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]).then(a.cmp(&b)));
    idx.truncate(m);
    idx.sort_unstable();
    idx
}

fn mean_off(u: &[Complex64], support: &[usize]) -> Complex64 {
    let mut on = vec![false; u.len()];
    for &j in support {
        on[j] = true;
    }
    let (sum, cnt) = u
        .iter()
        .zip(&on)
        .filter(|(_, &s)| !s)
        .fold((Complex64::new(0.0, 0.0), 0usize), |(s, c), (z, _)| (s + z, c + 1));
    sum / cnt as f64
}

fn alternate(u: &[Complex64], m: usize, start: Complex64) -> (Complex64, Vec<usize>, f64) {
    let mut lambda = start;
    let mut support = farthest(u, lambda, m);
    for _ in 0..MAX_ROUNDS {
        lambda = mean_off(u, &support);
        let next = farthest(u, lambda, m);
        if next == support {
            break;
        }
        support = next;
    }
    let residual = off_support_residual(u, lambda, &support);
    (lambda, support, residual)
}

pub fn flatness_certificate(u: &UnitVector, m: usize, rho: f64) -> Result<FlatnessCertificate> {
    let n = u.len();
    if m == 0 || m >= n {
        return Err(Error::BadParams(format!("need 1 <= m < n, got m={m}, n={n}")));
    }
    if !u.is_unit() {
        return Err(Error::BadParams("u must be a unit vector".into()));
    }
    if !(rho > 0.0) {
        return Err(Error::BadParams(format!("rho must be positive, got {rho}")));
    }
    let pts = u.components();
    let mut best: Option<(Complex64, Vec<usize>, f64)> = None;
    let starts = std::iter::once(Complex64::new(0.0, 0.0)).chain(pts.iter().copied());
    for start in starts {
        let cand = alternate(pts, m, start);
        if best.as_ref().map_or(true, |b| cand.2 < b.2) {
            best = Some(cand);
        }
    }
    let (lambda, support, residual) = best.expect("at least one start");
    if residual <= rho {
        return Ok(FlatnessCertificate {
            member: true,
            lambda,
            support,
            residual,
            method: FlatnessMethod::Alternating,
        });
    }
    let mode = if n <= EXACT_MAX_N {
        ConcentrationMode::Exact
    } else {
        ConcentrationMode::Fast
    };
    let (q, center) = concentration_with_center(u, rho, mode)?;
    if q >= 1.0 - m as f64 / n as f64 {
        let inside = levy_set(u, center, rho);
        let mut on = vec![false; n];
        for &j in &inside {
            on[j] = true;
        }
        let outside: Vec<usize> = (0..n).filter(|&j| !on[j]).collect();
        let lambda = center / (n as f64).sqrt();
        let residual = off_support_residual(pts, lambda, &outside);
        return Ok(FlatnessCertificate {
            member: residual <= rho,
            lambda,
            support: outside,
            residual,
            method: FlatnessMethod::ConcentrationImplied,
        });
    }
    Ok(FlatnessCertificate {
        member: false,
        lambda,
        support,
        residual,
        method: FlatnessMethod::Alternating,
    })
}
