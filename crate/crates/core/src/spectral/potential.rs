//! Logarithmic potentials, reference laws and spectrum bookkeeping.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::measure::{ks_to_cdf, EmpiricalMeasure};

/// U(z) = -sum_i w_i log|lambda_i - z|; `f64::INFINITY` when z is an atom.
pub fn log_potential(mu: &EmpiricalMeasure<Complex64>, z: Complex64) -> f64 {
    let mut total = 0.0;
    for (a, w) in mu.iter() {
        let r = (a - z).norm();
        if r == 0.0 {
            return f64::INFINITY;
        }
        total -= w * r.ln();
    }
    total
}

/// -integral of log s against a singular value distribution.
pub fn log_potential_from_singular(nu: &EmpiricalMeasure<f64>) -> f64 {
    let mut total = 0.0;
    for (s, w) in nu.iter() {
        if s == 0.0 {
            return f64::INFINITY;
        }
        total -= w * s.ln();
    }
    total
}

/// Radial CDF of the uniform law on the unit disk.
pub fn circular_radial_cdf(r: f64) -> f64 {
    (r * r).min(1.0)
}

/// Density of the oriented Kesten-McKay law of degree d.
pub fn km_density(z: Complex64, d: usize) -> f64 {
    let d = d as f64;
    let r2 = z.norm_sqr();
    if r2 > d {
        return 0.0;
    }
    let denom = d * d - r2;
    d * d * (d - 1.0) / (PI * denom * denom)
}

/// Mass of the oriented Kesten-McKay law in the disk of radius r:
/// (d - 1) r^2 / (d^2 - r^2) up to r = sqrt(d).
pub fn km_radial_cdf(r: f64, d: usize) -> f64 {
    let d = d as f64;
    let r2 = r * r;
    if r2 >= d {
        return 1.0;
    }
    (d - 1.0) * r2 / (d * d - r2)
}

/// Drops one eigenvalue of largest modulus.
pub fn exclude_perron(eigs: &[Complex64]) -> Vec<Complex64> {
    let Some((k, _)) = eigs.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())) else {
        return Vec::new();
    };
    eigs.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &z)| z).collect()
}

/// KS distances of the moduli against `radial_cdf` and of the arguments
/// against the uniform law on the circle.
pub fn radial_angular_ks(points: &[Complex64], radial_cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    let radii = EmpiricalMeasure::uniform(points.iter().map(|z| z.norm()).collect());
    let angles = EmpiricalMeasure::uniform(points.iter().map(|z| z.arg().rem_euclid(TAU)).collect());
    (
        ks_to_cdf(&radii, radial_cdf),
        ks_to_cdf(&angles, |t| (t / TAU).clamp(0.0, 1.0)),
    )
}

/// Number of entries of `a` left unpaired when pairs within `tol` are
/// matched greedily, closest first.
pub fn unmatched_eigenvalues(a: &[Complex64], b: &[Complex64], tol: f64) -> usize {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, x) in a.iter().enumerate() {
        for (k, y) in b.iter().enumerate() {
            let d = (x - y).norm();
            if d <= tol {
                pairs.push((d, i, k));
            }
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut matched = 0;
    for (_, i, k) in pairs {
        if !used_a[i] && !used_b[k] {
            used_a[i] = true;
            used_b[k] = true;
            matched += 1;
        }
    }
    a.len() - matched
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potentials() {
        let delta = EmpiricalMeasure::uniform(vec![Complex64::new(0.0, 0.0)]);
        assert!((log_potential(&delta, Complex64::new(std::f64::consts::E, 0.0)) + 1.0).abs() < 1e-15);
        assert_eq!(log_potential(&delta, Complex64::new(0.0, 0.0)), f64::INFINITY);
        let circle = EmpiricalMeasure::uniform((0..7).map(|k| Complex64::from_polar(1.0, k as f64)).collect());
        assert!(log_potential(&circle, Complex64::new(0.0, 0.0)).abs() < 1e-15);
    }

    #[test]
    fn reference_laws() {
        assert_eq!(circular_radial_cdf(0.0), 0.0);
        assert_eq!(circular_radial_cdf(1.0), 1.0);
        assert!((circular_radial_cdf(0.5f64.sqrt()) - 0.5).abs() < 1e-15);
        assert!((km_density(Complex64::new(0.0, 0.0), 3) - 2.0 / (9.0 * PI)).abs() < 1e-15);
        assert_eq!(km_density(Complex64::new(1.8, 0.0), 3), 0.0);
        assert!((km_radial_cdf(3f64.sqrt(), 3) - 1.0).abs() < 1e-12);
        // the radial CDF integrates the density
        let (d, r) = (4, 1.3);
        let steps = 20_000;
        let h = r / steps as f64;
        let mass: f64 = (0..steps)
            .map(|k| {
                let t = (k as f64 + 0.5) * h;
                TAU * t * km_density(Complex64::new(t, 0.0), d) * h
            })
            .sum();
        assert!((mass - km_radial_cdf(r, d)).abs() < 1e-8);
    }

    #[test]
    fn matching_and_perron() {
        let a = [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(5.0, 0.0)];
        let b = [Complex64::new(2.0, 1e-9), Complex64::new(1.0, 0.0), Complex64::new(-3.0, 0.0)];
        assert_eq!(unmatched_eigenvalues(&a, &b, 1e-6), 1);
        assert_eq!(exclude_perron(&a).len(), 2);
        assert!(!exclude_perron(&a).contains(&Complex64::new(5.0, 0.0)));
    }
}
