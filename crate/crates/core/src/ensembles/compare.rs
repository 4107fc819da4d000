//! Regular versus Bernoulli versus Gaussian comparisons.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    center_x, center_y, check_nd, check_samples, per_sample, sample_bernoulli, sample_gaussian, sample_regular,
    ComparisonReport, Estimate,
};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rng::RngStream;
use crate::spectral::{shifted_singular_values, stieltjes_g, StieltjesRoute};
use crate::stats::{mean_and_se, normal_quantile, quantile};

/// Monte Carlo estimates of E g(X) and E g(G) at (z, w), X the centred
/// Bernoulli(d/n) matrix and G real Gaussian.
///
/// The two ensembles are coupled entrywise: sample k draws one Gaussian
/// matrix G and sets B_ij = 1{G_ij > q}, q the (1 - p)-quantile of the
/// normal law. Each marginal is exact, and the paired difference has a
/// much smaller variance than two independent runs.
pub fn compare_stieltjes(
    n: usize,
    d: usize,
    z: Complex64,
    w: Complex64,
    samples: usize,
    rng: RngStream,
) -> Result<ComparisonReport> {
    check_nd(n, d)?;
    check_samples(samples, 2)?;
    if !(w.im > 0.0) {
        return Err(Error::BadParams(format!("spectral parameter must have Im w > 0, got {w}")));
    }
    let p = d as f64 / n as f64;
    let cut = normal_quantile(1.0 - p);
    let rows = per_sample(samples, rng, |s| {
        let g = sample_gaussian(n, s);
        let b = DenseMatrix::from_fn(n, n, |i, j| Complex64::new(if g.get(i, j).re > cut { 1.0 } else { 0.0 }, 0.0));
        let x = center_x(&b, p)?;
        let gx = stieltjes_g(&x, z, w, StieltjesRoute::Sv)?;
        let gg = stieltjes_g(&g, z, w, StieltjesRoute::Sv)?;
        let diff = gx - gg;
        Ok(vec![gx.re, gx.im, gg.re, gg.im, diff.re, diff.im])
    })?;
    let mut report = ComparisonReport::new("stieltjes", n, d, z, samples, rng);
    report.columns = ["g_x_re", "g_x_im", "g_gauss_re", "g_gauss_im", "diff_re", "diff_im"]
        .map(String::from)
        .to_vec();
    report.rows = rows;
    for c in report.columns.clone() {
        let col = report.column(&c).expect("column exists");
        report.estimates.push(Estimate::from_samples(c, &col));
    }
    let (dr, sr) = mean_and_se(&report.column("diff_re").expect("column exists"));
    let (di, si) = mean_and_se(&report.column("diff_im").expect("column exists"));
    let diff = Complex64::new(dr, di).norm();
    let eta = w.im;
    let shape = (d as f64).powf(-0.5) * eta.powi(-4) * (1.0 + (n as f64 * eta).powi(-2));
    report.metrics.insert("difference".into(), diff);
    report.metrics.insert("difference_se".into(), (sr * sr + si * si).sqrt());
    report.metrics.insert("bound_shape".into(), shape);
    report.metrics.insert("w_re".into(), w.re);
    report.metrics.insert("w_im".into(), w.im);
    report.fitted_constant = Some(diff / shape);
    report.bound = Some(shape);
    Ok(report)
}

/// A compactly supported continuous piecewise-linear function, zero
/// outside its first and last knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::BadFunctionSpec("knots must be finite".into()));
        }
        if knots.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::BadFunctionSpec("knot locations must increase strictly".into()));
        }
        if let (Some(first), Some(last)) = (knots.first(), knots.last()) {
            if first.1 != 0.0 || last.1 != 0.0 {
                return Err(Error::BadFunctionSpec("function must vanish at both ends of its support".into()));
            }
        }
        Ok(Self { knots })
    }

    pub fn zero() -> Self {
        Self { knots: Vec::new() }
    }

    /// Height `height` at `center`, support [center - half_width, center + half_width].
    pub fn tent(center: f64, half_width: f64, height: f64) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::BadFunctionSpec("tent half-width must be positive".into()));
        }
        Self::new(vec![(center - half_width, 0.0), (center, height), (center + half_width, 0.0)])
    }

    /// Checks a declared Lipschitz constant against the knots.
    pub fn with_declared_lipschitz(self, declared: f64) -> Result<Self> {
        if self.lipschitz() > declared * (1.0 + 1e-12) {
            return Err(Error::BadFunctionSpec(format!(
                "declared Lipschitz constant {declared} below actual {}",
                self.lipschitz()
            )));
        }
        Ok(self)
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        Some((self.knots.first()?.0, self.knots.last()?.0))
    }

    pub fn lipschitz(&self) -> f64 {
        self.knots
            .windows(2)
            .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
            .fold(0.0, f64::max)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let Some((lo, hi)) = self.support() else {
            return 0.0;
        };
        if x <= lo || x >= hi {
            return 0.0;
        }
        let k = self.knots.partition_point(|&(kx, _)| kx <= x);
        let (x0, y0) = self.knots[k - 1];
        let (x1, y1) = self.knots[k];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

/// Integral of f against the symmetrized singular value law of M/sqrt(n) - z.
fn hermitized_integral(m: &DenseMatrix, z: Complex64, f: &PiecewiseLinear) -> Result<f64> {
    let s = shifted_singular_values(m, z)?;
    let n = s.descending.len() as f64;
    Ok(s.descending.iter().map(|&x| f.eval(x) + f.eval(-x)).sum::<f64>() / (2.0 * n))
}

/// Integral of f against the spectral measure of H_z(Y) for regular
/// samples, and against H_z(X) averaged over Bernoulli samples.
pub fn compare_linear_stat(
    n: usize,
    d: usize,
    z: Complex64,
    f: &PiecewiseLinear,
    samples: usize,
    rng: RngStream,
) -> Result<ComparisonReport> {
    check_nd(n, d)?;
    check_samples(samples, 1)?;
    let p = d as f64 / n as f64;
    let regular = per_sample(samples, rng, |s| hermitized_integral(&center_y(&sample_regular(n, d, s)?)?, z, f))?;
    let bern_rng = rng.child(u64::MAX);
    let bernoulli = per_sample(samples, bern_rng, |s| hermitized_integral(&center_x(&sample_bernoulli(n, p, s), p)?, z, f))?;
    let (bmean, _) = mean_and_se(&bernoulli);
    let deviations: Vec<f64> = regular.iter().map(|r| (r - bmean).abs()).collect();
    let mut sorted = deviations.clone();
    sorted.sort_by(f64::total_cmp);
    let mut report = ComparisonReport::new("linear_stat", n, d, z, samples, rng);
    report.estimates.push(Estimate::from_samples("regular", &regular));
    report.estimates.push(Estimate::from_samples("bernoulli", &bernoulli));
    report.columns = ["regular", "bernoulli", "deviation"].map(String::from).to_vec();
    report.rows = (0..samples).map(|k| vec![regular[k], bernoulli[k], deviations[k]]).collect();
    report.metrics.insert("deviation_q50".into(), quantile(&sorted, 0.5));
    report.metrics.insert("deviation_q95".into(), quantile(&sorted, 0.95));
    report.metrics.insert("deviation_max".into(), *sorted.last().expect("samples >= 1"));
    report.metrics.insert("lipschitz".into(), f.lipschitz());
    Ok(report)
}
