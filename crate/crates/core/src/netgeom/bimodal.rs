//! Two well-separated level sets of a non-flat vector.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::concentration::{concentration_with_center, levy_set, ConcentrationMode, EXACT_MAX_N};
use super::flat::flatness_certificate;
use super::UnitVector;
use crate::error::{Error, Result};

/// Angular sectors used to pick the aligned part of the far set.
pub const SECTORS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BimodalSets {
    /// Far set: components at distance >= scale/sqrt(n) from the centre.
    pub j1: Vec<usize>,
    /// Near set: components at distance < scale/(2 sqrt(n)).
    pub j2: Vec<usize>,
    /// The part of `j1` in its most populated sector around the centre.
    pub j1_prime: Vec<usize>,
    pub scale: f64,
    /// Centre on the [`levy_set`] scale.
    pub lambda: Complex64,
    /// |j1| / m.
    pub far_ratio: f64,
    /// |j2| / (n - m).
    pub near_ratio: f64,
}

pub fn bimodal_sets(u: &UnitVector, m: usize, rho: f64) -> Result<BimodalSets> {
    let cert = flatness_certificate(u, m, rho)?;
    if cert.member {
        return Err(Error::IsFlat { residual: cert.residual });
    }
    let n = u.len();
    let mode = if n <= EXACT_MAX_N {
        ConcentrationMode::Exact
    } else {
        ConcentrationMode::Fast
    };
    let threshold = 1.0 - m as f64 / n as f64;
    // largest dyadic multiple of rho at which Q is still below threshold;
    // Q reaches 1 once the radius exceeds 2 sqrt(n)
    let mut scale = rho;
    loop {
        let q = concentration_with_center(u, 2.0 * scale, mode)?.0;
        if q >= threshold {
            break;
        }
        scale *= 2.0;
    }
    let (_, lambda) = concentration_with_center(u, scale / 2.0, mode)?;
    let near = levy_set(u, lambda, scale);
    let mut in_near = vec![false; n];
    for &j in &near {
        in_near[j] = true;
    }
    let j1: Vec<usize> = (0..n).filter(|&j| !in_near[j]).collect();
    let j2 = levy_set(u, lambda, scale / 2.0);
    let center = lambda / (n as f64).sqrt();
    let mut sectors: Vec<Vec<usize>> = vec![Vec::new(); SECTORS];
    for &j in &j1 {
        let angle = (u.components()[j] - center).arg().rem_euclid(TAU);
        let s = ((angle / TAU * SECTORS as f64) as usize).min(SECTORS - 1);
        sectors[s].push(j);
    }
    let mut j1_prime = Vec::new();
    for s in sectors {
        if s.len() > j1_prime.len() {
            j1_prime = s;
        }
    }
    Ok(BimodalSets {
        far_ratio: j1.len() as f64 / m as f64,
        near_ratio: j2.len() as f64 / (n - m) as f64,
        j1,
        j2,
        j1_prime,
        scale,
        lambda,
    })
}

/// Smallest |u_a - u_b| over a in `far`, b in `near`.
pub fn min_gap(u: &UnitVector, far: &[usize], near: &[usize]) -> f64 {
    let c = u.components();
    let mut best = f64::INFINITY;
    for &a in far {
        for &b in near {
            best = best.min((c[a] - c[b]).norm());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_distr::StandardNormal;

    fn gaussian_unit(g: &mut impl Rng, n: usize) -> UnitVector {
        let raw: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(g.sample::<f64, _>(StandardNormal), g.sample::<f64, _>(StandardNormal)))
            .collect();
        UnitVector::project_mean_zero(&raw).unwrap()
    }

    #[test]
    fn separation_holds() {
        let mut g = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let (n, m, rho) = (64, 4, 0.3);
        let sn = (n as f64).sqrt();
        for _ in 0..20 {
            let u = gaussian_unit(&mut g, n);
            let b = bimodal_sets(&u, m, rho).unwrap();
            assert!(b.j1.len() >= m);
            assert!(b.j2.len() * 49 >= n - m);
            assert!(b.j1_prime.len() * SECTORS >= b.j1.len());
            assert!(min_gap(&u, &b.j1, &b.j2) >= rho / (2.0 * sn));
        }
    }

    #[test]
    fn flat_input_is_rejected() {
        let u = UnitVector::from_real(&[0.0, 0.6, 0.0, -0.8]);
        assert!(matches!(bimodal_sets(&u, 2, 0.1), Err(Error::IsFlat { .. })));
    }
}
