//! Lévy concentration function and its level sets.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::UnitVector;
use crate::error::{Error, Result};

/// Largest dimension accepted by the exact mode.
pub const EXACT_MAX_N: usize = 2000;

/// Relative shrink applied to the candidate radius so that boundary points
/// of the closed-disk optimum are strictly inside the open disk.
const OPEN_SHRINK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConcentrationMode {
    #[default]
    Exact,
    /// Disks centred at the components only; a lower bound.
    Fast,
}

/// Indices j with |v_j - lambda/sqrt(n)| < rho/sqrt(n).
pub fn levy_set(v: &UnitVector, lambda: Complex64, rho: f64) -> Vec<usize> {
    let sn = (v.len() as f64).sqrt();
    let center = lambda / sn;
    let radius = rho / sn;
    v.components()
        .iter()
        .enumerate()
        .filter(|(_, z)| (*z - center).norm() < radius)
        .map(|(j, _)| j)
        .collect()
}

/// Q_v(rho), the largest fraction of components in an open disk of radius
/// rho/sqrt(n).
pub fn concentration_function(v: &UnitVector, rho: f64, mode: ConcentrationMode) -> Result<f64> {
    concentration_with_center(v, rho, mode).map(|(q, _)| q)
}

/// Q_v(rho) together with a maximizing `lambda` (on the scale of
/// [`levy_set`], so the disk centre is lambda/sqrt(n)).
pub fn concentration_with_center(v: &UnitVector, rho: f64, mode: ConcentrationMode) -> Result<(f64, Complex64)> {
    let n = v.len();
    if n == 0 {
        return Err(Error::BadParams("empty vector".into()));
    }
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::BadParams(format!("rho must be positive, got {rho}")));
    }
    if mode == ConcentrationMode::Exact && n > EXACT_MAX_N {
        return Err(Error::TooLarge(format!("exact concentration needs n <= {EXACT_MAX_N}, got {n}")));
    }
    let sn = (n as f64).sqrt();
    let radius = rho / sn;
    let pts = v.components();
    let (count, center) = match mode {
        ConcentrationMode::Fast => best_point_center(pts, radius),
        ConcentrationMode::Exact => best_exact_center(pts, radius),
    };
    Ok((count as f64 / n as f64, center * sn))
}

fn count_within(pts: &[Complex64], center: Complex64, radius: f64) -> usize {
    pts.iter().filter(|z| (*z - center).norm() < radius).count()
}

fn best_point_center(pts: &[Complex64], radius: f64) -> (usize, Complex64) {
    let mut best = (0, pts[0]);
    for &p in pts {
        let c = count_within(pts, p, radius);
        if c > best.0 {
            best = (c, p);
        }
    }
    best
}

/// Angular sweep: for every point p, the closed disks of radius r' having p
/// on their boundary are parametrized by an angle; each other point is
/// covered on an arc of angles. The deepest overlap gives a candidate
/// centre, whose open-disk count is then taken directly.
fn best_exact_center(pts: &[Complex64], radius: f64) -> (usize, Complex64) {
    let r = radius * (1.0 - OPEN_SHRINK);
    let mut best = best_point_center(pts, radius);
    let mut events: Vec<(f64, i32)> = Vec::with_capacity(4 * pts.len());
    for (i, &p) in pts.iter().enumerate() {
        events.clear();
        for (k, &q) in pts.iter().enumerate() {
            if k == i {
                continue;
            }
            let delta = q - p;
            let dist = delta.norm();
            if dist > 2.0 * r || dist == 0.0 {
                continue;
            }
            let phi = delta.arg().rem_euclid(TAU);
            let half = (dist / (2.0 * r)).min(1.0).acos();
            let start = (phi - half).rem_euclid(TAU);
            let end = start + 2.0 * half;
            events.push((start, 1));
            events.push((end, -1));
            events.push((start + TAU, 1));
            events.push((end + TAU, -1));
        }
        if events.is_empty() {
            continue;
        }
        // arcs are closed: entries sort before exits at equal angles
        events.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
        let mut depth = 0i32;
        let mut top = (0i32, 0.0f64);
        for &(angle, step) in &events {
            depth += step;
            if depth > top.0 {
                top = (depth, angle);
            }
        }
        let center = p + Complex64::from_polar(r, top.1);
        let c = count_within(pts, center, radius);
        if c > best.0 {
            best = (c, center);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn brute(pts: &[Complex64], radius: f64) -> usize {
        // closed-disk optimum over all point and pairwise-circle centres
        let mut best = 1;
        let n = pts.len();
        for i in 0..n {
            best = best.max(pts.iter().filter(|z| (*z - pts[i]).norm() <= radius).count());
            for k in i + 1..n {
                let d = (pts[k] - pts[i]).norm();
                if d > 2.0 * radius || d == 0.0 {
                    continue;
                }
                let mid = (pts[i] + pts[k]) / 2.0;
                let h = (radius * radius - d * d / 4.0).max(0.0).sqrt();
                let perp = (pts[k] - pts[i]) / d * Complex64::new(0.0, 1.0);
                for c in [mid + perp * h, mid - perp * h] {
                    let cnt = pts.iter().filter(|z| (*z - c).norm() <= radius * (1.0 + 1e-12)).count();
                    best = best.max(cnt);
                }
            }
        }
        best
    }

    #[test]
    fn levy_set_examples() {
        let v = UnitVector::from_real(&[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(levy_set(&v, Complex64::new(0.0, 0.0), 0.5), vec![1, 2, 3]);
        let flat = UnitVector::from_real(&[0.5; 4]);
        assert_eq!(levy_set(&flat, Complex64::new(1.0, 0.0), 1e-3), vec![0, 1, 2, 3]);
        assert!(levy_set(&flat, Complex64::new(50.0, 0.0), 1.0).is_empty());
    }

    #[test]
    fn exact_matches_pairwise_oracle() {
        let mut g = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = g.random_range(2..25);
            let raw: Vec<Complex64> =
                (0..n).map(|_| Complex64::new(g.random::<f64>() - 0.5, g.random::<f64>() - 0.5)).collect();
            let v = UnitVector::normalized(raw).unwrap();
            let rho = g.random_range(0.05..1.5);
            let (q, lam) = concentration_with_center(&v, rho, ConcentrationMode::Exact).unwrap();
            let expected = brute(v.components(), rho / (n as f64).sqrt());
            assert_eq!((q * n as f64).round() as usize, expected);
            assert_eq!(levy_set(&v, lam, rho).len(), expected);
            let fast = concentration_function(&v, rho, ConcentrationMode::Fast).unwrap();
            assert!(fast <= q);
        }
    }

    #[test]
    fn extremes() {
        let flat = UnitVector::from_real(&[0.5; 4]);
        assert_eq!(concentration_function(&flat, 0.01, ConcentrationMode::Exact).unwrap(), 1.0);
        let spread = UnitVector::normalized((0..5).map(|k| Complex64::new(k as f64, 0.0)).collect()).unwrap();
        assert_eq!(concentration_function(&spread, 0.01, ConcentrationMode::Exact).unwrap(), 0.2);
        let big = UnitVector::from_real(&vec![0.0; EXACT_MAX_N + 1]);
        assert!(matches!(concentration_function(&big, 0.1, ConcentrationMode::Exact), Err(Error::TooLarge(_))));
    }
}
