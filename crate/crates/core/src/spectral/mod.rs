//! Eigenvalues, singular values, Hermitization and reference laws.

mod hermitize;
mod measure;
mod potential;

pub use hermitize::{
    hermitize, resolvent_derivative_check, stieltjes_g, HermitizationView, ResolventDerivativeReport, StieltjesRoute,
};
pub use measure::{ks_distance, ks_distance_tol, ks_to_cdf, EmpiricalMeasure};
pub use potential::{
    circular_radial_cdf, exclude_perron, km_density, km_radial_cdf, log_potential, log_potential_from_singular,
    radial_angular_ks, unmatched_eigenvalues,
};

use ndarray_linalg::{EigVals, JobSvd, SVDDC};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Largest dimension handled by the dense solvers.
pub const SPECTRAL_MAX_N: usize = 4000;

fn check_size(m: &DenseMatrix) -> Result<usize> {
    let n = m.require_square()?;
    if n > SPECTRAL_MAX_N {
        return Err(Error::TooLarge(format!("dense spectral path limited to n <= {SPECTRAL_MAX_N}, got {n}")));
    }
    Ok(n)
}

pub(crate) fn lapack_err(e: ndarray_linalg::error::LinalgError) -> Error {
    Error::NumericalFailure(e.to_string())
}

/// All eigenvalues as raw values, real Schur path for real input.
pub fn eigenvalue_list(m: &DenseMatrix) -> Result<Vec<Complex64>> {
    let n = check_size(m)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let vals = if m.is_real() {
        m.to_real_array().eigvals().map_err(lapack_err)?
    } else {
        m.to_array().eigvals().map_err(lapack_err)?
    };
    Ok(vals.to_vec())
}

/// The empirical spectral distribution.
pub fn eigenvalues(m: &DenseMatrix) -> Result<EmpiricalMeasure<Complex64>> {
    Ok(EmpiricalMeasure::uniform(eigenvalue_list(m)?))
}

/// Singular values in non-increasing order together with their empirical
/// distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularValues {
    pub descending: Vec<f64>,
}

impl SingularValues {
    pub fn measure(&self) -> EmpiricalMeasure<f64> {
        EmpiricalMeasure::uniform(self.descending.clone())
    }

    pub fn largest(&self) -> f64 {
        self.descending.first().copied().unwrap_or(0.0)
    }

    pub fn smallest(&self) -> f64 {
        self.descending.last().copied().unwrap_or(0.0)
    }
}

pub fn singular_values(m: &DenseMatrix) -> Result<SingularValues> {
    let n = check_size(m)?;
    if n == 0 {
        return Ok(SingularValues { descending: Vec::new() });
    }
    let s = if m.is_real() {
        m.to_real_array().svddc(JobSvd::None).map_err(lapack_err)?.1
    } else {
        m.to_array().svddc(JobSvd::None).map_err(lapack_err)?.1
    };
    let mut descending = s.to_vec();
    descending.sort_by(|a, b| b.total_cmp(a));
    Ok(SingularValues { descending })
}

/// Singular values of M/sqrt(n) - z.
pub fn shifted_singular_values(m: &DenseMatrix, z: Complex64) -> Result<SingularValues> {
    let n = m.require_square()?;
    singular_values(&m.scale(1.0 / (n as f64).sqrt()).shift_diagonal(z))
}

pub fn smallest_singular_value(m: &DenseMatrix) -> Result<f64> {
    Ok(singular_values(m)?.smallest())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn identity_and_shift() {
        let id = DenseMatrix::identity(3);
        assert!(eigenvalues(&id).unwrap().atoms().iter().all(|z| (z - 1.0).norm() < 1e-14));
        assert_eq!(smallest_singular_value(&id).unwrap(), 1.0);
        let shift = DenseMatrix::from_fn(4, 4, |i, j| Complex64::new(if j == i + 1 { 1.0 } else { 0.0 }, 0.0));
        assert!(eigenvalue_list(&shift).unwrap().iter().all(|z| z.norm() < 1e-12));
        let d = DenseMatrix::from_real(2, 2, &[3.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(singular_values(&d).unwrap().descending, vec![3.0, 0.0]);
    }

    #[test]
    fn frobenius_identity_and_repeated_row() {
        let mut g = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let m = DenseMatrix::from_fn(12, 12, |_, _| Complex64::new(g.random::<f64>() - 0.5, g.random::<f64>() - 0.5));
        let s = singular_values(&m).unwrap();
        let total: f64 = s.descending.iter().map(|x| x * x).sum();
        assert!((total - m.frobenius_sq()).abs() < 1e-8);
        let rep = DenseMatrix::from_fn(6, 6, |i, j| Complex64::new(((i.min(4) * 7 + j * 3) % 5) as f64, 0.0));
        assert!(smallest_singular_value(&rep).unwrap() <= 1e-10);
    }

    #[test]
    fn perron_eigenvalue() {
        let a = crate::RegularDigraph::circulant(7, 3).unwrap();
        let eigs = eigenvalue_list(&a.to_dense()).unwrap();
        assert!(eigs.iter().any(|z| (z - 3.0).norm() < 1e-8));
    }
}
