//! Monte Carlo small-ball and tensorization harnesses.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::stats::{binomial_tail_ge, linear_fit};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallBallReport {
    pub estimate: f64,
    pub std_error: f64,
    pub trials: u64,
    /// (r + |v|_inf) / |v|_2.
    pub bound_shape: f64,
    /// estimate / bound_shape, the smallest constant consistent with the run.
    pub fitted_constant: f64,
}

/// Estimates P(|center + sum_j xi_j v_j| <= r) for iid Rademacher xi.
pub fn small_ball_mc(v: &[Complex64], r: f64, center: Complex64, trials: u64, rng: RngStream) -> Result<SmallBallReport> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    if trials == 0 {
        return Err(Error::BadParams("trials must be at least 1".into()));
    }
    let mut g = rng.rng();
    let mut hits = 0u64;
    for _ in 0..trials {
        let mut s = center;
        for chunk in v.chunks(64) {
            let bits: u64 = g.random();
            for (k, z) in chunk.iter().enumerate() {
                if bits >> k & 1 == 1 {
                    s += z;
                } else {
                    s -= z;
                }
            }
        }
        if s.norm() <= r {
            hits += 1;
        }
    }
    let estimate = hits as f64 / trials as f64;
    let sup = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let bound_shape = (r + sup) / norm;
    Ok(SmallBallReport {
        estimate,
        std_error: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
        trials,
        bound_shape,
        fitted_constant: estimate / bound_shape,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorizationReport {
    pub p0: f64,
    pub eps0: f64,
    pub c1: f64,
    pub trials: u64,
    /// Estimated P(sum_{j<=k} zeta_j^2 <= c1 eps0^2 k), k = 1..=n.
    pub probabilities: Vec<f64>,
    /// The same probabilities in closed form for the two-point law.
    pub exact: Vec<f64>,
    pub estimate: f64,
    pub std_error: f64,
    /// Slope of -ln P_k against k over the k with P_k > 0.
    pub decay_rate: Option<f64>,
}

/// Zeta_j takes the value 0 with probability p0 and 2 eps0 otherwise.
pub fn tensorization_check(p0: f64, eps0: f64, n: usize, trials: u64, c1: f64, rng: RngStream) -> Result<TensorizationReport> {
    if !(0.0..1.0).contains(&p0) {
        return Err(Error::BadParams(format!("p0 must lie in [0, 1), got {p0}")));
    }
    if !(eps0 > 0.0) || !(c1 > 0.0) {
        return Err(Error::BadParams("eps0 and c1 must be positive".into()));
    }
    if n == 0 || trials == 0 {
        return Err(Error::BadParams("n and trials must be at least 1".into()));
    }
    let high = 2.0 * eps0;
    let slack = 1.0 + 1e-12;
    let mut hits = vec![0u64; n];
    let mut g = rng.rng();
    for _ in 0..trials {
        let mut sum = 0.0;
        for (k, h) in hits.iter_mut().enumerate() {
            if g.random::<f64>() >= p0 {
                sum += high * high;
            }
            if sum <= c1 * eps0 * eps0 * (k + 1) as f64 * slack {
                *h += 1;
            }
        }
    }
    let probabilities: Vec<f64> = hits.iter().map(|&h| h as f64 / trials as f64).collect();
    let exact: Vec<f64> = (1..=n)
        .map(|k| {
            // at most `nonzero` draws may equal 2 eps0
            let nonzero = (0..=k).take_while(|&z| 4.0 * z as f64 <= c1 * k as f64 * slack).count();
            if nonzero == 0 {
                0.0
            } else {
                binomial_tail_ge(k as u64, p0, (k + 1 - nonzero) as u64)
            }
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = probabilities
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(k, p)| ((k + 1) as f64, -p.ln()))
        .unzip();
    let decay_rate = (xs.len() >= 2).then(|| linear_fit(&xs, &ys).1);
    let estimate = probabilities[n - 1];
    Ok(TensorizationReport {
        p0,
        eps0,
        c1,
        trials,
        estimate,
        std_error: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
        exact,
        probabilities,
        decay_rate,
    })
}
