//! Finite probability measures and Kolmogorov distances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WEIGHT_TOL: f64 = 1e-12;

/// Atoms with positive weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure<T> {
    atoms: Vec<T>,
    weights: Vec<f64>,
}

impl<T: Copy> EmpiricalMeasure<T> {
    /// Weight 1/len on every atom.
    pub fn uniform(atoms: Vec<T>) -> Self {
        let w = 1.0 / atoms.len() as f64;
        let weights = vec![w; atoms.len()];
        Self { atoms, weights }
    }

    pub fn with_weights(atoms: Vec<T>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!("{} atoms, {} weights", atoms.len(), weights.len())));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::BadParams("weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::BadParams(format!("weights sum to {total}")));
        }
        Ok(Self { atoms, weights })
    }

    pub fn atoms(&self) -> &[T] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, f64)> + '_ {
        self.atoms.iter().copied().zip(self.weights.iter().copied())
    }

    /// Pushforward under `f`.
    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> EmpiricalMeasure<U> {
        EmpiricalMeasure {
            atoms: self.atoms.iter().map(|&a| f(a)).collect(),
            weights: self.weights.clone(),
        }
    }

    /// Average of several measures.
    pub fn mixture(parts: &[EmpiricalMeasure<T>]) -> Self {
        let k = parts.len() as f64;
        let mut atoms = Vec::new();
        let mut weights = Vec::new();
        for p in parts {
            atoms.extend_from_slice(&p.atoms);
            weights.extend(p.weights.iter().map(|w| w / k));
        }
        Self { atoms, weights }
    }
}

impl EmpiricalMeasure<f64> {
    /// mu((-inf, x]).
    pub fn cdf(&self, x: f64) -> f64 {
        self.iter().filter(|(a, _)| *a <= x).map(|(_, w)| w).sum::<f64>().min(1.0)
    }

    /// The measure of +-a for a drawn from self, each sign with half the weight.
    pub fn symmetrized(&self) -> Self {
        let mut atoms = Vec::with_capacity(2 * self.len());
        let mut weights = Vec::with_capacity(2 * self.len());
        for (a, w) in self.iter() {
            atoms.push(a);
            atoms.push(-a);
            weights.push(w / 2.0);
            weights.push(w / 2.0);
        }
        Self { atoms, weights }
    }

    /// (location, cumulative weight) at each distinct location, ascending.
    fn steps(&self) -> Vec<(f64, f64)> {
        let mut pairs: Vec<(f64, f64)> = self.iter().collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
        let mut acc = 0.0;
        for (x, w) in pairs {
            acc += w;
            match out.last_mut() {
                Some(last) if last.0 == x => last.1 = acc,
                _ => out.push((x, acc)),
            }
        }
        out
    }
}

/// sup_x |F_a(x) - F_b(x)|, evaluated at every atom of either measure.
pub fn ks_distance(a: &EmpiricalMeasure<f64>, b: &EmpiricalMeasure<f64>) -> f64 {
    let sa = a.steps();
    let sb = b.steps();
    let (mut i, mut k) = (0, 0);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut best = 0.0f64;
    while i < sa.len() || k < sb.len() {
        let xa = sa.get(i).map_or(f64::INFINITY, |s| s.0);
        let xb = sb.get(k).map_or(f64::INFINITY, |s| s.0);
        let x = xa.min(xb);
        if xa == x {
            fa = sa[i].1;
            i += 1;
        }
        if xb == x {
            fb = sb[k].1;
            k += 1;
        }
        best = best.max((fa - fb).abs());
    }
    best.min(1.0)
}

/// max over x of F_a(x) - F_b(x + tol) and F_b(x) - F_a(x + tol).
///
/// With tol = 0 this is [`ks_distance`]. A small positive tol stops atoms
/// that agree up to rounding from counting as distinct.
pub fn ks_distance_tol(a: &EmpiricalMeasure<f64>, b: &EmpiricalMeasure<f64>, tol: f64) -> f64 {
    let sa = a.steps();
    let sb = b.steps();
    let cdf = |steps: &[(f64, f64)], x: f64| {
        let k = steps.partition_point(|s| s.0 <= x);
        if k == 0 {
            0.0
        } else {
            steps[k - 1].1
        }
    };
    let one = sa.iter().map(|&(x, f)| f - cdf(&sb, x + tol)).fold(0.0, f64::max);
    let two = sb.iter().map(|&(x, f)| f - cdf(&sa, x + tol)).fold(0.0, f64::max);
    one.max(two).min(1.0)
}

/// sup_x |F_a(x) - cdf(x)| for a continuous `cdf`; both one-sided limits
/// are checked at every atom.
pub fn ks_to_cdf(a: &EmpiricalMeasure<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    let mut below = 0.0;
    let mut best = 0.0f64;
    for (x, f) in a.steps() {
        let g = cdf(x);
        best = best.max((below - g).abs()).max((f - g).abs());
        below = f;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_examples() {
        let a = EmpiricalMeasure::uniform(vec![0.0]);
        let b = EmpiricalMeasure::uniform(vec![1.0]);
        assert_eq!(ks_distance(&a, &b), 1.0);
        assert_eq!(ks_distance(&a, &a), 0.0);
        let c = EmpiricalMeasure::uniform(vec![0.0, 1.0, 2.0, 3.0]);
        let d = EmpiricalMeasure::uniform(vec![0.5, 1.0, 2.0, 3.0]);
        assert_eq!(ks_distance(&c, &d), 0.25);
        assert_eq!(ks_distance_tol(&c, &d, 0.0), 0.25);
        assert_eq!(ks_distance_tol(&c, &d, 0.6), 0.0);
        let e = EmpiricalMeasure::uniform(vec![1.0 + 1e-15, 2.0, 3.0, 7.0]);
        assert_eq!(ks_distance(&c, &e), 0.5);
        assert_eq!(ks_distance_tol(&c, &e, 1e-12), 0.25);
        // uniform grid against the uniform CDF on [0, 1]
        let grid = EmpiricalMeasure::uniform((1..=10).map(|k| k as f64 / 10.0).collect());
        assert!((ks_to_cdf(&grid, |x| x.clamp(0.0, 1.0)) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn cdf_is_right_continuous() {
        let m = EmpiricalMeasure::uniform(vec![1.0, 1.0, 2.0, 5.0]);
        assert_eq!(m.cdf(0.999), 0.0);
        assert_eq!(m.cdf(1.0), 0.5);
        assert_eq!(m.cdf(5.0), 1.0);
        assert!(EmpiricalMeasure::with_weights(vec![0.0, 1.0], vec![0.5, 0.4]).is_err());
    }
}
