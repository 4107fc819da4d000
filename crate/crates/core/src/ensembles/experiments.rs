//! Spectral experiments on sampled regular digraphs and Gaussian matrices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{center_y, check_nd, check_samples, per_sample, sample_gaussian, sample_regular, ComparisonReport, Estimate};
use crate::digraph::{normalization_scale, RegularDigraph};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rng::RngStream;
use crate::spectral::{
    circular_radial_cdf, eigenvalue_list, exclude_perron, km_radial_cdf, ks_distance, ks_distance_tol, radial_angular_ks,
    shifted_singular_values, singular_values, EmpiricalMeasure, SingularValues,
};

/// Singular values of Abar - z.
fn abar_singular_values(a: &RegularDigraph, z: Complex64) -> Result<SingularValues> {
    singular_values(&a.normalized()?.shift_diagonal(z))
}

/// KS distance between the singular value laws of Y/sqrt(n) - z and
/// Abar - z; the two matrices differ by rank one. Both share every singular
/// value belonging to the complement of 1, so atoms are compared up to a
/// relative rounding tolerance.
pub fn interlacing_ks(a: &RegularDigraph, z: Complex64) -> Result<f64> {
    let abar = abar_singular_values(a, z)?;
    interlacing_given(a, z, &abar)
}

fn rounding_tol(s: &SingularValues) -> f64 {
    1e-9 * s.largest().max(1.0)
}

fn interlacing_given(a: &RegularDigraph, z: Complex64, abar: &SingularValues) -> Result<f64> {
    let y = shifted_singular_values(&center_y(a)?, z)?;
    Ok(ks_distance_tol(&y.measure(), &abar.measure(), rounding_tol(abar)))
}

/// Eigenvalues of Abar with the Perron eigenvalue removed, compared with
/// the uniform law on the disk. Returns the report and the eigenvalue
/// clouds, one per sample.
pub fn circular_law_experiment(
    n: usize,
    d: usize,
    samples: usize,
    rng: RngStream,
) -> Result<(ComparisonReport, Vec<Vec<Complex64>>)> {
    check_nd(n, d)?;
    check_samples(samples, 1)?;
    let out = per_sample(samples, rng, |s| {
        let a = sample_regular(n, d, s)?;
        let eigs = eigenvalue_list(&a.normalized()?)?;
        let outliers = eigs.iter().filter(|z| z.norm() > 1.5).count();
        let bulk = exclude_perron(&eigs);
        let (radial, angular) = radial_angular_ks(&bulk, circular_radial_cdf);
        let inter = interlacing_ks(&a, Complex64::new(0.0, 0.0))?;
        Ok((vec![radial, angular, outliers as f64, inter], bulk))
    })?;
    let mut report = ComparisonReport::new("circular_law", n, d, Complex64::new(0.0, 0.0), samples, rng);
    report.columns = ["radial_ks", "angular_ks", "outliers_above_1.5", "interlacing_ks"]
        .map(String::from)
        .to_vec();
    let (rows, clouds): (Vec<_>, Vec<_>) = out.into_iter().unzip();
    report.rows = rows;
    summarize_columns(&mut report);
    Ok((report, clouds))
}

/// Eigenvalues of A (unscaled) without the Perron eigenvalue, against the
/// radial law of the oriented Kesten-McKay density.
pub fn kesten_mckay_experiment(n: usize, d: usize, samples: usize, rng: RngStream) -> Result<ComparisonReport> {
    check_nd(n, d)?;
    check_samples(samples, 1)?;
    let rows = per_sample(samples, rng, |s| {
        let a = sample_regular(n, d, s)?;
        let eigs = exclude_perron(&eigenvalue_list(&a.to_dense())?);
        let (radial, angular) = radial_angular_ks(&eigs, |r| km_radial_cdf(r, d));
        let inter = interlacing_ks(&a, Complex64::new(0.0, 0.0))?;
        Ok(vec![radial, angular, inter])
    })?;
    let mut report = ComparisonReport::new("kesten_mckay", n, d, Complex64::new(0.0, 0.0), samples, rng);
    report.columns = ["radial_ks", "angular_ks", "interlacing_ks"].map(String::from).to_vec();
    report.rows = rows;
    summarize_columns(&mut report);
    Ok(report)
}

/// Mean and standard error of every column as estimates, plus the column
/// maxima as metrics.
fn summarize_columns(report: &mut ComparisonReport) {
    for c in report.columns.clone() {
        let col = report.column(&c).expect("column exists");
        report.metrics.insert(format!("{c}_max"), col.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        report.estimates.push(Estimate::from_samples(c, &col));
    }
}

/// KS distance between the averaged singular value laws of Y/sqrt(n) - z
/// over regular samples and G/sqrt(n) - z over Gaussian samples. Each
/// regular sample also records its interlacing distance.
pub fn singular_law_agreement(n: usize, d: usize, z: Complex64, samples: usize, rng: RngStream) -> Result<ComparisonReport> {
    check_nd(n, d)?;
    check_samples(samples, 1)?;
    let regular = per_sample(samples, rng, |s| {
        let a = sample_regular(n, d, s)?;
        let y = shifted_singular_values(&center_y(&a)?, z)?;
        let abar = abar_singular_values(&a, z)?;
        let inter = ks_distance_tol(&y.measure(), &abar.measure(), rounding_tol(&abar));
        Ok((y.measure(), inter))
    })?;
    let gaussian = per_sample(samples, rng.child(u64::MAX), |s| {
        Ok(shifted_singular_values(&sample_gaussian(n, s), z)?.measure())
    })?;
    let (laws, inter): (Vec<_>, Vec<_>) = regular.into_iter().unzip();
    let ks = ks_distance(&EmpiricalMeasure::mixture(&laws), &EmpiricalMeasure::mixture(&gaussian));
    let mut report = ComparisonReport::new("singular_law_agreement", n, d, z, samples, rng);
    report.columns = vec!["interlacing_ks".into()];
    report.rows = inter.into_iter().map(|v| vec![v]).collect();
    summarize_columns(&mut report);
    report.metrics.insert("ks_mean_laws".into(), ks);
    Ok(report)
}

/// Fraction of singular values of Y/sqrt(n) - z in [0, eta], per sample
/// and eta, against 10 (eta + d^{-1/48}).
pub fn wegner_profile(
    n: usize,
    d: usize,
    z: Complex64,
    etas: &[f64],
    samples: usize,
    rng: RngStream,
) -> Result<ComparisonReport> {
    const ASSERTED: f64 = 10.0;
    check_nd(n, d)?;
    check_samples(samples, 1)?;
    if etas.is_empty() || etas.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
        return Err(Error::BadParams("eta grid must be a non-empty subset of (0, 1]".into()));
    }
    let floor = (d as f64).powf(-1.0 / 48.0);
    let rows = per_sample(samples, rng, |s| {
        let a = sample_regular(n, d, s)?;
        let y = shifted_singular_values(&center_y(&a)?, z)?;
        let abar = abar_singular_values(&a, z)?;
        let mut row: Vec<f64> = etas
            .iter()
            .map(|&eta| y.descending.iter().filter(|&&x| x <= eta).count() as f64 / n as f64)
            .collect();
        row.push(ks_distance_tol(&y.measure(), &abar.measure(), rounding_tol(&abar)));
        Ok(row)
    })?;
    let mut report = ComparisonReport::new("wegner", n, d, z, samples, rng);
    report.columns = etas.iter().map(|e| format!("eta={e}")).collect();
    report.columns.push("interlacing_ks".into());
    let mut fitted = 0.0f64;
    let mut passing = 0;
    for row in &rows {
        let mut ok = true;
        for (&eta, &v) in etas.iter().zip(row) {
            fitted = fitted.max(v / (eta + floor));
            ok &= v <= ASSERTED * (eta + floor);
        }
        passing += ok as usize;
    }
    for (k, &eta) in etas.iter().enumerate() {
        let col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
        report.estimates.push(Estimate::from_samples(format!("eta={eta}"), &col));
    }
    let pass_fraction = passing as f64 / samples as f64;
    report.rows = rows;
    report.metrics.insert("pass_fraction".into(), pass_fraction);
    report.metrics.insert("degree_floor".into(), floor);
    report.metrics.insert(
        "interlacing_ks_max".into(),
        report.column("interlacing_ks").expect("column exists").into_iter().fold(0.0, f64::max),
    );
    report.fitted_constant = Some(fitted);
    report.tolerance = Some(ASSERTED);
    report.pass = Some(pass_fraction >= 0.95);
    Ok(report)
}

/// The perturbation added to A in [`ssv_tail`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZMode {
    /// Z = -z sqrt(d (1 - d/n)) I, so that A + Z is a multiple of Abar - z.
    ScalarShift,
    /// A deterministic Z fixing the all-ones vector from both sides with
    /// norm at most n^gamma on its orthogonal complement.
    Custom { matrix: DenseMatrix, gamma: f64 },
}

/// Checks the hypotheses on a custom perturbation; returns zeta with
/// Z 1 = zeta 1.
fn validate_custom_z(z: &DenseMatrix, gamma: f64, n: usize, d: usize) -> Result<Complex64> {
    if z.rows() != n || z.cols() != n {
        return Err(Error::InvalidZ(format!("Z is {}x{}, expected {n}x{n}", z.rows(), z.cols())));
    }
    if !(gamma >= 1.0) {
        return Err(Error::InvalidZ(format!("gamma must be at least 1, got {gamma}")));
    }
    let scale = z.entries().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let tol = 1e-9 * (1.0 + scale * n as f64);
    let row_sums: Vec<Complex64> = (0..n).map(|i| (0..n).map(|j| z.get(i, j)).sum()).collect();
    let col_sums: Vec<Complex64> = (0..n).map(|j| (0..n).map(|i| z.get(i, j)).sum()).collect();
    let zeta = row_sums[0];
    if row_sums.iter().any(|s| (s - zeta).norm() > tol) {
        return Err(Error::InvalidZ("Z 1 is not a multiple of 1".into()));
    }
    if col_sums.iter().any(|s| (s - zeta).norm() > tol) {
        return Err(Error::InvalidZ("Z* 1 is not conj(zeta) 1".into()));
    }
    // Z restricted to the complement of 1 is Z (I - 11^T/n)
    let inv_n = 1.0 / n as f64;
    let projected = DenseMatrix::from_fn(n, n, |i, j| z.get(i, j) - row_sums[i] * inv_n);
    let norm = singular_values(&projected)?.largest();
    if norm > (n as f64).powf(gamma) {
        return Err(Error::InvalidZ(format!("norm {norm} on the complement of 1 exceeds n^{gamma}")));
    }
    if (d as f64 + zeta).norm() < (n as f64).powi(-10) {
        return Err(Error::InvalidZ(format!("|d + zeta| < n^-10 with zeta = {zeta}")));
    }
    Ok(zeta)
}

/// Smallest singular values of A + Z over regular samples, with the
/// fraction below n^{-Gamma} for Gamma in {1, 2, 4}.
pub fn ssv_tail(n: usize, d: usize, z: Complex64, mode: &ZMode, samples: usize, rng: RngStream) -> Result<ComparisonReport> {
    check_nd(n, d)?;
    check_samples(samples, 1)?;
    let scale = normalization_scale(n, d)?;
    if let ZMode::Custom { matrix, gamma } = mode {
        validate_custom_z(matrix, *gamma, n, d)?;
    }
    let rows = per_sample(samples, rng, |s| {
        let a = sample_regular(n, d, s)?;
        let sn_a = singular_values(&a.to_dense())?.smallest();
        match mode {
            ZMode::ScalarShift => {
                let abar = abar_singular_values(&a, z)?;
                let inter = interlacing_given(&a, z, &abar)?;
                Ok(vec![sn_a, abar.smallest() * scale, abar.smallest(), inter])
            }
            ZMode::Custom { matrix, .. } => {
                let s = singular_values(&a.to_dense().add(matrix)?)?.smallest();
                Ok(vec![sn_a, s])
            }
        }
    })?;
    let mut report = ComparisonReport::new("ssv_tail", n, d, z, samples, rng);
    report.columns = match mode {
        ZMode::ScalarShift => ["sn_a", "sn_a_plus_z", "sn_abar_minus_z", "interlacing_ks"].map(String::from).to_vec(),
        ZMode::Custom { .. } => ["sn_a", "sn_a_plus_z"].map(String::from).to_vec(),
    };
    report.rows = rows;
    let perturbed = report.column("sn_a_plus_z").expect("column exists");
    for gamma in [1, 2, 4] {
        let t = (n as f64).powi(-gamma);
        let frac = perturbed.iter().filter(|&&s| s <= t).count() as f64 / samples as f64;
        report.metrics.insert(format!("fraction_below_n^-{gamma}"), frac);
    }
    let singular = perturbed.iter().filter(|&&s| s <= 1e-10).count() as f64 / samples as f64;
    report.metrics.insert("singular_fraction".into(), singular);
    summarize_columns(&mut report);
    for c in report.columns.clone() {
        let col = report.column(&c).expect("column exists");
        report.metrics.insert(format!("{c}_min"), col.iter().copied().fold(f64::INFINITY, f64::min));
    }
    Ok(report)
}

/// Checks s_{n-j}(G/sqrt(n) + M) >= c j / n for k <= j <= n - 1 on Gaussian
/// samples. Each sample's largest admissible c is reported.
pub fn gaussian_order_stats(
    n: usize,
    m: &DenseMatrix,
    k: usize,
    samples: usize,
    rng: RngStream,
) -> Result<ComparisonReport> {
    const ASSERTED: f64 = 0.01;
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch(format!("M is {}x{}, expected {n}x{n}", m.rows(), m.cols())));
    }
    if k == 0 || k >= n {
        return Err(Error::BadParams(format!("need 1 <= k < n, got k={k}")));
    }
    check_samples(samples, 1)?;
    let rows = per_sample(samples, rng, |s| {
        let g = sample_gaussian(n, s).scale(1.0 / (n as f64).sqrt());
        let sv = singular_values(&g.add(m)?)?;
        let mut best = f64::INFINITY;
        let mut violations = 0;
        for j in k..n {
            let s_j = sv.descending[n - j - 1];
            let ratio = j as f64 / n as f64;
            best = best.min(s_j / ratio);
            violations += (s_j < ASSERTED * ratio) as usize;
        }
        Ok(vec![best, violations as f64])
    })?;
    let mut report = ComparisonReport::new("gaussian_order_stats", n, 0, Complex64::new(0.0, 0.0), samples, rng);
    report.columns = ["largest_c", "violations"].map(String::from).to_vec();
    report.rows = rows;
    let mut cs = report.column("largest_c").expect("column exists");
    cs.sort_by(f64::total_cmp);
    // at most samples * (1/samples) = 1 sample may fall below the fitted c
    let fitted = cs[1.min(samples - 1)];
    let failing = report.column("violations").expect("column exists").iter().filter(|&&v| v > 0.0).count();
    report.metrics.insert("k".into(), k as f64);
    report.metrics.insert("samples_with_violations".into(), failing as f64);
    report.fitted_constant = Some(fitted);
    report.tolerance = Some(ASSERTED);
    report.pass = Some(failing == 0);
    Ok(report)
}

/// Per-sample tail integral of |log s| beyond `t` under the singular value
/// law of Abar - z, and its second moment.
pub fn uniform_integrability_probe(
    n: usize,
    d: usize,
    z: Complex64,
    t: f64,
    epsilons: &[f64],
    samples: usize,
    rng: RngStream,
) -> Result<ComparisonReport> {
    check_nd(n, d)?;
    check_samples(samples, 1)?;
    if !(t > 0.0) {
        return Err(Error::BadParams(format!("threshold must be positive, got {t}")));
    }
    let rows = per_sample(samples, rng, |s| {
        let a = sample_regular(n, d, s)?;
        let sv = abar_singular_values(&a, z)?;
        let tail = sv
            .descending
            .iter()
            .map(|&x| x.ln().abs())
            .filter(|&l| l > t)
            .sum::<f64>()
            / n as f64;
        let second = sv.descending.iter().map(|x| x * x).sum::<f64>() / n as f64;
        Ok(vec![tail, second])
    })?;
    let mut report = ComparisonReport::new("uniform_integrability", n, d, z, samples, rng);
    report.columns = ["tail_integral", "second_moment"].map(String::from).to_vec();
    report.rows = rows;
    let tails = report.column("tail_integral").expect("column exists");
    for &eps in epsilons {
        let frac = tails.iter().filter(|&&v| v > eps).count() as f64 / samples as f64;
        report.metrics.insert(format!("exceed_t={t}_eps={eps}"), frac);
    }
    let bound = 4.0 * (1.0 + z.norm_sqr());
    let worst = report.column("second_moment").expect("column exists").into_iter().fold(0.0, f64::max);
    report.metrics.insert("second_moment_bound".into(), bound);
    report.metrics.insert("second_moment_max".into(), worst);
    report.bound = Some(bound);
    report.pass = Some(worst <= bound);
    summarize_columns(&mut report);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interlacing_bound() {
        for seed in 0..5 {
            let a = sample_regular(40, 9, RngStream::new(seed, 0)).unwrap();
            assert!(interlacing_ks(&a, Complex64::new(0.7, 0.3)).unwrap() <= 1.0 / 40.0 + 1e-12);
        }
    }

    #[test]
    fn custom_z_validation() {
        let n = 6;
        let rng = RngStream::new(3, 0);
        let good = DenseMatrix::identity(n).scale(2.0);
        let r = ssv_tail(n, 2, Complex64::new(0.0, 0.0), &ZMode::Custom { matrix: good, gamma: 1.0 }, 2, rng).unwrap();
        assert_eq!(r.columns.len(), 2);
        let mut bad = DenseMatrix::identity(n);
        bad.set(0, 1, Complex64::new(1.0, 0.0));
        let err = ssv_tail(n, 2, Complex64::new(0.0, 0.0), &ZMode::Custom { matrix: bad, gamma: 1.0 }, 2, rng);
        assert!(matches!(err, Err(Error::InvalidZ(_))));
        let cancel = DenseMatrix::identity(n).scale(-2.0);
        let err = ssv_tail(n, 2, Complex64::new(0.0, 0.0), &ZMode::Custom { matrix: cancel, gamma: 1.0 }, 2, rng);
        assert!(matches!(err, Err(Error::InvalidZ(_))));
    }

    #[test]
    fn small_experiments_run() {
        let rng = RngStream::new(5, 0);
        let w = wegner_profile(60, 10, Complex64::new(1.0, 1.0), &[0.1, 1.0], 2, rng).unwrap();
        assert_eq!(w.rows.len(), 2);
        assert!(wegner_profile(60, 10, Complex64::new(1.0, 1.0), &[0.0], 2, rng).is_err());
        let s = ssv_tail(60, 10, Complex64::new(1.0, 1.0), &ZMode::ScalarShift, 2, rng).unwrap();
        let scale = normalization_scale(60, 10).unwrap();
        let row = &s.rows[0];
        assert!((row[1] - row[2] * scale).abs() < 1e-12);
        let g = gaussian_order_stats(60, &DenseMatrix::zeros(60, 60), 8, 3, rng).unwrap();
        assert_eq!(g.pass, Some(true));
        let u = uniform_integrability_probe(60, 10, Complex64::new(1.0, 0.0), 5.0, &[0.1], 2, rng).unwrap();
        assert_eq!(u.pass, Some(true));
        let (c, clouds) = circular_law_experiment(60, 10, 1, rng).unwrap();
        assert_eq!(clouds[0].len(), 59);
        assert_eq!(c.column("outliers_above_1.5").unwrap(), vec![1.0]);
    }
}
