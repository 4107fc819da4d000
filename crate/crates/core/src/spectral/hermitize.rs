//! Hermitization, resolvents and Stieltjes transforms.

use ndarray::Array2;
use ndarray_linalg::{EigValsh, Inverse, UPLO};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{lapack_err, shifted_singular_values};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Largest entry of (H - w) R - I accepted from the direct route.
const DIRECT_RESIDUAL_TOL: f64 = 1e-9;

/// The 2n x 2n Hermitian matrix [[0, B], [B*, 0]] with B = M/sqrt(n) - z.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermitizationView {
    base: DenseMatrix,
    z: Complex64,
    materialized: Option<DenseMatrix>,
}

pub fn hermitize(m: &DenseMatrix, z: Complex64) -> Result<HermitizationView> {
    m.require_square()?;
    let mut view = HermitizationView {
        base: m.clone(),
        z,
        materialized: None,
    };
    view.materialize();
    Ok(view)
}

impl HermitizationView {
    pub fn base(&self) -> &DenseMatrix {
        &self.base
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn n(&self) -> usize {
        self.base.rows()
    }

    /// The block entries are written once each, the lower block as the
    /// exact conjugate of the upper.
    pub fn materialize(&mut self) -> &DenseMatrix {
        if self.materialized.is_none() {
            let n = self.n();
            let scale = 1.0 / (n as f64).sqrt();
            let mut h = DenseMatrix::zeros(2 * n, 2 * n);
            for i in 0..n {
                for j in 0..n {
                    let mut b = self.base.get(i, j) * scale;
                    if i == j {
                        b -= self.z;
                    }
                    h.set(i, n + j, b);
                    h.set(n + j, i, b.conj());
                }
            }
            self.materialized = Some(h);
        }
        self.materialized.as_ref().expect("just built")
    }

    pub fn matrix(&mut self) -> &DenseMatrix {
        self.materialize()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&mut self) -> Result<Vec<f64>> {
        let h = self.materialize().to_array();
        Ok(h.eigvalsh(UPLO::Upper).map_err(lapack_err)?.to_vec())
    }

    /// (H - w)^{-1}.
    pub fn resolvent(&mut self, w: Complex64) -> Result<DenseMatrix> {
        check_upper(w)?;
        Ok(DenseMatrix::from_array(&self.resolvent_array(w)?.1))
    }

    fn resolvent_array(&mut self, w: Complex64) -> Result<(Array2<Complex64>, Array2<Complex64>)> {
        let shifted = self.materialize().shift_diagonal(w).to_array();
        let inv = shifted.inv().map_err(lapack_err)?;
        Ok((shifted, inv))
    }
}

fn check_upper(w: Complex64) -> Result<()> {
    if !(w.im > 0.0) {
        return Err(Error::BadParams(format!("spectral parameter must have Im w > 0, got {w}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StieltjesRoute {
    #[default]
    Direct,
    Sv,
}

/// g = tr (H_z(M) - w)^{-1} / 2n.
pub fn stieltjes_g(m: &DenseMatrix, z: Complex64, w: Complex64, route: StieltjesRoute) -> Result<Complex64> {
    check_upper(w)?;
    let n = m.require_square()?;
    match route {
        StieltjesRoute::Sv => {
            // the pair of eigenvalues +-s contributes 2w / (s^2 - w^2)
            let s = shifted_singular_values(m, z)?;
            let w2 = w * w;
            Ok(s.descending.iter().map(|&x| w / (x * x - w2)).sum::<Complex64>() / n as f64)
        }
        StieltjesRoute::Direct => {
            let mut view = hermitize(m, z)?;
            let (shifted, inv) = view.resolvent_array(w)?;
            let prod = shifted.dot(&inv);
            let mut residual = 0.0f64;
            for ((i, j), v) in prod.indexed_iter() {
                let target = if i == j { 1.0 } else { 0.0 };
                residual = residual.max((v - target).norm());
            }
            if !(residual <= DIRECT_RESIDUAL_TOL) {
                return Err(Error::IllConditioned { residual });
            }
            Ok(inv.diag().sum() / (2 * n) as f64)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventDerivativeReport {
    pub entry: (usize, usize),
    pub h: f64,
    /// Largest entrywise gap between the difference quotient and -R dH R.
    pub max_deviation: f64,
    /// Nonzero entries of dH as (row, column, value).
    pub derivative_entries: Vec<(usize, usize, Complex64)>,
}

/// Finite-difference check of dR = -R (dH) R for a real perturbation of
/// the entry `(i, j)` of M.
pub fn resolvent_derivative_check(
    m: &DenseMatrix,
    z: Complex64,
    w: Complex64,
    entry: (usize, usize),
    h: f64,
) -> Result<ResolventDerivativeReport> {
    check_upper(w)?;
    let n = m.require_square()?;
    let (i, j) = entry;
    if i >= n || j >= n {
        return Err(Error::IndexOutOfRange { index: i.max(j), n });
    }
    if !(h > 0.0) {
        return Err(Error::BadParams(format!("step must be positive, got {h}")));
    }
    let r0 = hermitize(m, z)?.resolvent_array(w)?.1;
    let mut bumped = m.clone();
    bumped.set(i, j, m.get(i, j) + h);
    let r1 = hermitize(&bumped, z)?.resolvent_array(w)?.1;
    let v = 1.0 / (n as f64).sqrt();
    let derivative_entries = vec![(i, n + j, Complex64::new(v, 0.0)), (n + j, i, Complex64::new(v, 0.0))];
    let mut dh = Array2::<Complex64>::zeros((2 * n, 2 * n));
    for &(r, c, x) in &derivative_entries {
        dh[[r, c]] = x;
    }
    let predicted = -r0.dot(&dh).dot(&r0);
    let mut max_deviation = 0.0f64;
    for ((a, b), p) in predicted.indexed_iter() {
        let fd = (r1[[a, b]] - r0[[a, b]]) / h;
        max_deviation = max_deviation.max((fd - p).norm());
    }
    Ok(ResolventDerivativeReport {
        entry,
        h,
        max_deviation,
        derivative_entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random(n: usize, seed: u64) -> DenseMatrix {
        let mut g = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(n, n, |_, _| Complex64::new(g.random::<f64>() - 0.5, g.random::<f64>() - 0.5))
    }

    #[test]
    fn zero_matrix() {
        let z0 = DenseMatrix::zeros(3, 3);
        let mut view = hermitize(&z0, Complex64::new(0.0, 0.0)).unwrap();
        assert!(view.eigenvalues().unwrap().iter().all(|&x| x == 0.0));
        let w = Complex64::new(0.3, 0.7);
        for route in [StieltjesRoute::Direct, StieltjesRoute::Sv] {
            let g = stieltjes_g(&z0, Complex64::new(0.0, 0.0), w, route).unwrap();
            assert!((g + 1.0 / w).norm() < 1e-14, "{route:?}");
        }
    }

    #[test]
    fn exactly_hermitian_and_spectrum() {
        let m = random(10, 1);
        let z = Complex64::new(1.0, 1.0);
        let mut view = hermitize(&m, z).unwrap();
        let h = view.matrix().clone();
        assert_eq!(h, h.conj_transpose());
        let mut eig = view.eigenvalues().unwrap();
        let s = shifted_singular_values(&m, z).unwrap().descending;
        let mut expected: Vec<f64> = s.iter().flat_map(|&x| [x, -x]).collect();
        expected.sort_by(f64::total_cmp);
        eig.sort_by(f64::total_cmp);
        for (a, b) in eig.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn routes_agree_and_bounds_hold() {
        let m = random(15, 2);
        for w in [Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.1)] {
            let z = Complex64::new(0.5, -0.2);
            let a = stieltjes_g(&m, z, w, StieltjesRoute::Direct).unwrap();
            let b = stieltjes_g(&m, z, w, StieltjesRoute::Sv).unwrap();
            assert!((a - b).norm() < 1e-10);
            assert!(a.im > 0.0 && a.norm() <= 1.0 / w.im);
        }
        assert!(stieltjes_g(&m, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), StieltjesRoute::Sv).is_err());
    }

    #[test]
    fn derivative_identity() {
        let m = random(8, 3);
        let rep = resolvent_derivative_check(&m, Complex64::new(0.2, 0.0), Complex64::new(0.1, 0.5), (2, 5), 1e-6)
            .unwrap();
        assert!(rep.max_deviation < 1e-4);
        assert_eq!(rep.derivative_entries.len(), 2);
        assert_eq!(rep.derivative_entries[0].0, 2);
        assert_eq!(rep.derivative_entries[0].1, 8 + 5);
    }
}
