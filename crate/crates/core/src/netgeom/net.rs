//! Explicit nets for the mean-zero flat vectors.
//!
//! For a support J of size m, the mean-zero vectors within s of
//! span(e_j : j in J) + span(1) are exactly the unit vectors within s of
//! the m-dimensional complex subspace P(V_J), P the projection onto the
//! complement of 1. Each net point is a unit vector of P(V_J), obtained by
//! normalizing a grid point on the surface of the cube [-1, 1]^{2m}
//! written in an orthonormal basis of P(V_J). With K grid steps per side
//! every direction of P(V_J) is within angle asin(sqrt(2m - 1)/K) of a
//! net point.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::flat::{off_support_residual, FlatnessCertificate, FlatnessMethod};
use super::UnitVector;
use crate::error::{Error, Result};
use crate::regularity::for_each_combination;

/// Constant in the cardinality bound (C n / (m rho^2))^m.
pub const NET_CARDINALITY_CONSTANT: f64 = 700.0;
pub const NET_DEFAULT_CAP: u64 = 10_000_000;

/// Grid steps per cube side: K = ceil(3 sqrt(2m - 1) / rho).
pub fn flat_net_grid_steps(m: usize, rho: f64) -> usize {
    (3.0 * ((2 * m - 1) as f64).sqrt() / rho).ceil() as usize
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlatNet {
    n: usize,
    m: usize,
    rho: f64,
    steps: usize,
    supports: Vec<Vec<usize>>,
    /// Per support, m real orthonormal vectors of length n spanning P(V_J).
    bases: Vec<Vec<Vec<f64>>>,
    /// Unit directions in R^{2m}, shared by all supports.
    directions: Vec<Vec<f64>>,
}

/// `(K + 1)^{2m} - (K - 1)^{2m}`, the number of grid points on the cube
/// surface, or None on overflow.
fn surface_count(steps: usize, m: usize) -> Option<u64> {
    let e = 2 * m as u32;
    let hi = (steps as u64 + 1).checked_pow(e)?;
    let lo = (steps as u64).saturating_sub(1).checked_pow(e)?;
    Some(hi - lo)
}

fn binomial(n: usize, k: usize) -> Option<u64> {
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u64)? / (i as u64 + 1);
    }
    Some(acc)
}

pub fn build_flat_net(n: usize, m: usize, rho: f64) -> Result<FlatNet> {
    build_flat_net_capped(n, m, rho, NET_DEFAULT_CAP)
}

impl FlatNet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn grid_steps(&self) -> usize {
        self.steps
    }

    pub fn cardinality(&self) -> usize {
        self.supports.len() * self.directions.len()
    }

    /// (C n / (m rho^2))^m with C = [`NET_CARDINALITY_CONSTANT`].
    pub fn cardinality_bound(&self) -> f64 {
        (NET_CARDINALITY_CONSTANT * self.n as f64 / (self.m as f64 * self.rho * self.rho)).powi(self.m as i32)
    }

    /// Radius s such that every unit mean-zero vector within s of some
    /// sparse-plus-constant vector is within rho of the net.
    pub fn coverage_radius(&self) -> f64 {
        (2.0 * (self.rho / 3.0).asin()).sin()
    }

    pub fn support_of(&self, index: usize) -> &[usize] {
        &self.supports[index / self.directions.len()]
    }

    pub fn point(&self, index: usize) -> UnitVector {
        let s = index / self.directions.len();
        let dir = &self.directions[index % self.directions.len()];
        let basis = &self.bases[s];
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        for (k, b) in basis.iter().enumerate() {
            let coef = Complex64::new(dir[2 * k], dir[2 * k + 1]);
            for (o, &x) in out.iter_mut().zip(b) {
                *o += coef * x;
            }
        }
        UnitVector::new(out)
    }

    pub fn points(&self) -> impl Iterator<Item = UnitVector> + '_ {
        (0..self.cardinality()).map(|i| self.point(i))
    }

    /// Index of and distance to the nearest net point.
    pub fn nearest(&self, u: &UnitVector) -> Result<(usize, f64)> {
        if u.len() != self.n {
            return Err(Error::DimensionMismatch(format!("vector of length {} for a net in dimension {}", u.len(), self.n)));
        }
        let norm_sq: f64 = u.components().iter().map(|z| z.norm_sqr()).sum();
        let per_support: Vec<(usize, f64)> = self
            .bases
            .par_iter()
            .map(|basis| {
                // coordinates of u in the basis; |u - p|^2 = |u|^2 + 1 - 2 Re<u, p>
                let coords: Vec<Complex64> =
                    basis.iter().map(|b| b.iter().zip(u.components()).map(|(x, z)| z * x).sum()).collect();
                let mut best = (0usize, f64::NEG_INFINITY);
                for (i, dir) in self.directions.iter().enumerate() {
                    let dot: f64 = coords
                        .iter()
                        .enumerate()
                        .map(|(k, c)| dir[2 * k] * c.re + dir[2 * k + 1] * c.im)
                        .sum();
                    if dot > best.1 {
                        best = (i, dot);
                    }
                }
                best
            })
            .collect();
        let (s, (i, dot)) = per_support
            .into_iter()
            .enumerate()
            .fold((0, (0, f64::NEG_INFINITY)), |acc, (s, b)| if b.1 > acc.1 .1 { (s, b) } else { acc });
        let dist = (norm_sq + 1.0 - 2.0 * dot).max(0.0).sqrt();
        Ok((s * self.directions.len() + i, dist))
    }

    /// Zero-residual certificate of the flatness of a net point.
    pub fn certificate(&self, index: usize) -> FlatnessCertificate {
        let p = self.point(index);
        let support = self.support_of(index).to_vec();
        let off = (0..self.n).find(|j| support.binary_search(j).is_err()).expect("m < n");
        let lambda = p.components()[off];
        let residual = off_support_residual(p.components(), lambda, &support);
        FlatnessCertificate {
            member: residual <= self.rho,
            lambda,
            support,
            residual,
            method: FlatnessMethod::NetWitness,
        }
    }
}

/// As [`build_flat_net`] with an explicit limit on the number of points.
pub fn build_flat_net_capped(n: usize, m: usize, rho: f64, cap: u64) -> Result<FlatNet> {
    if m == 0 || m >= n {
        return Err(Error::BadParams(format!("need 1 <= m < n, got m={m}, n={n}")));
    }
    if !(rho > 0.0 && rho < 2.0) {
        return Err(Error::BadParams(format!("rho must lie in (0, 2), got {rho}")));
    }
    let steps = flat_net_grid_steps(m, rho);
    let total = binomial(n, m).and_then(|c| surface_count(steps, m).and_then(|s| c.checked_mul(s)));
    match total {
        Some(t) if t <= cap => {}
        _ => {
            return Err(Error::TooLarge(format!(
                "flat net for n={n}, m={m}, rho={rho} exceeds {cap} points"
            )))
        }
    }
    let mut supports = Vec::new();
    for_each_combination(n, m, &mut |j| {
        supports.push(j.to_vec());
        true
    });
    let bases = supports.par_iter().map(|j| projected_basis(n, j)).collect();
    Ok(FlatNet {
        n,
        m,
        rho,
        steps,
        supports,
        bases,
        directions: surface_directions(steps, 2 * m),
    })
}

/// Gram-Schmidt on e_j - 1/n for j in the support.
fn projected_basis(n: usize, support: &[usize]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(support.len());
    for &j in support {
        let mut v = vec![-1.0 / n as f64; n];
        v[j] += 1.0;
        for _ in 0..2 {
            for b in &basis {
                let dot: f64 = b.iter().zip(&v).map(|(x, y)| x * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= dot * bi;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        basis.push(v);
    }
    basis
}

/// Normalized points of {-1, -1 + 2/K, ..., 1}^dim with sup-norm 1.
fn surface_directions(steps: usize, dim: usize) -> Vec<Vec<f64>> {
    let levels: Vec<f64> = (0..=steps).map(|k| -1.0 + 2.0 * k as f64 / steps as f64).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; dim];
    loop {
        if idx.iter().any(|&k| k == 0 || k == steps) {
            let mut g: Vec<f64> = idx.iter().map(|&k| levels[k]).collect();
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            g.iter_mut().for_each(|x| *x /= norm);
            out.push(g);
        }
        let mut p = 0;
        loop {
            if p == dim {
                return out;
            }
            idx[p] += 1;
            if idx[p] <= steps {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}
