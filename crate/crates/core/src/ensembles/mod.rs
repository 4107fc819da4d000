//! Reference ensembles, the centred matrices X and Y, and comparison
//! experiments between them.

mod compare;
mod experiments;

pub use compare::{compare_linear_stat, compare_stieltjes, PiecewiseLinear};
pub use experiments::{
    circular_law_experiment, gaussian_order_stats, interlacing_ks, kesten_mckay_experiment, singular_law_agreement, ssv_tail,
    uniform_integrability_probe, wegner_profile, ZMode,
};

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::digraph::RegularDigraph;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rng::RngStream;
use crate::sampler::{chain_sample_with, default_chain_steps, ChainProposal};
use crate::stats::mean_and_se;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    Regular,
    Bernoulli,
    Gaussian,
}

/// A random matrix model. For the 0-1 models p = d/n and d <= n/2; larger
/// densities reduce to this range by complementation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    kind: EnsembleKind,
    n: usize,
    d: usize,
    seed: RngStream,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, n: usize, d: usize, seed: RngStream) -> Result<Self> {
        if kind != EnsembleKind::Gaussian && (d == 0 || 2 * d > n) {
            return Err(Error::BadDegree { n, d });
        }
        if n == 0 {
            return Err(Error::BadParams("n must be positive".into()));
        }
        Ok(Self { kind, n, d, seed })
    }

    pub fn kind(&self) -> EnsembleKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn seed(&self) -> RngStream {
        self.seed
    }

    pub fn p(&self) -> f64 {
        self.d as f64 / self.n as f64
    }

    /// Sample `index`, drawn from its own child stream. Regular samples are
    /// returned as their 0-1 adjacency matrix.
    pub fn sample(&self, index: u64) -> Result<DenseMatrix> {
        let rng = self.seed.child(index);
        match self.kind {
            EnsembleKind::Regular => Ok(sample_regular(self.n, self.d, rng)?.to_dense()),
            EnsembleKind::Bernoulli => Ok(sample_bernoulli(self.n, self.p(), rng)),
            EnsembleKind::Gaussian => Ok(sample_gaussian(self.n, rng)),
        }
    }
}

/// Uniform element of A_{n,d} from the edge-proposal switch chain run for
/// the default number of steps.
pub fn sample_regular(n: usize, d: usize, rng: RngStream) -> Result<RegularDigraph> {
    chain_sample_with(n, d, default_chain_steps(n, d), ChainProposal::Edge, rng)
}

pub fn sample_bernoulli(n: usize, p: f64, rng: RngStream) -> DenseMatrix {
    let mut g = rng.rng();
    DenseMatrix::from_fn(n, n, |_, _| Complex64::new(if g.random::<f64>() < p { 1.0 } else { 0.0 }, 0.0))
}

/// Real standard normal entries.
pub fn sample_gaussian(n: usize, rng: RngStream) -> DenseMatrix {
    let mut g = rng.rng();
    DenseMatrix::from_fn(n, n, |_, _| Complex64::new(g.sample(StandardNormal), 0.0))
}

/// (A - p 11^T) / sqrt(p (1 - p)) with p = d/n.
pub fn center_y(a: &RegularDigraph) -> Result<DenseMatrix> {
    let (n, d) = (a.n(), a.d());
    if d == 0 || d >= n {
        return Err(Error::DegenerateScale { n, d });
    }
    center(&a.to_dense(), d as f64 / n as f64)
}

/// (B - p 11^T) / sqrt(p (1 - p)).
pub fn center_x(b: &DenseMatrix, p: f64) -> Result<DenseMatrix> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::BadP(p));
    }
    center(b, p)
}

fn center(b: &DenseMatrix, p: f64) -> Result<DenseMatrix> {
    let s = (p * (1.0 - p)).sqrt();
    let entries = b.entries().iter().map(|z| (z - p) / s).collect();
    DenseMatrix::from_entries(b.rows(), b.cols(), entries)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub label: String,
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn from_samples(label: impl Into<String>, xs: &[f64]) -> Self {
        let (mean, std_error) = mean_and_se(xs);
        Self {
            label: label.into(),
            mean,
            std_error,
            samples: xs.len(),
        }
    }
}

/// Outcome of a Monte Carlo comparison. `rows` holds one line of raw
/// statistics per sample, described by `columns`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub statistic: String,
    pub n: usize,
    pub d: usize,
    pub z: Complex64,
    pub samples: usize,
    pub seed: RngStream,
    pub estimates: Vec<Estimate>,
    pub bound: Option<f64>,
    pub fitted_constant: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
    pub metrics: BTreeMap<String, f64>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ComparisonReport {
    fn new(statistic: &str, n: usize, d: usize, z: Complex64, samples: usize, seed: RngStream) -> Self {
        Self {
            statistic: statistic.into(),
            n,
            d,
            z,
            samples,
            seed,
            estimates: Vec::new(),
            bound: None,
            fitted_constant: None,
            tolerance: None,
            pass: None,
            metrics: BTreeMap::new(),
            columns: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }

    /// Raw per-sample column `name`.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// Runs `f` on samples 0..count in parallel, each with its own child
/// stream, and returns the results in sample order.
pub(crate) fn per_sample<T: Send>(
    count: usize,
    rng: RngStream,
    f: impl Fn(RngStream) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    (0..count as u64).into_par_iter().map(|k| f(rng.child(k))).collect()
}

fn check_samples(samples: usize, min: usize) -> Result<()> {
    if samples < min {
        return Err(Error::BadParams(format!("need at least {min} samples, got {samples}")));
    }
    Ok(())
}

fn check_nd(n: usize, d: usize) -> Result<()> {
    if n < 2 || d == 0 || d >= n {
        return Err(Error::BadDegree { n, d });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centred_regular_matrix() {
        let a = sample_regular(30, 7, RngStream::new(1, 0)).unwrap();
        let y = center_y(&a).unwrap();
        let p: f64 = 7.0 / 30.0;
        let s = (p * (1.0 - p)).sqrt();
        let hi = (1.0 - p) / s;
        let lo = -p / s;
        for i in 0..30 {
            let row: Complex64 = (0..30).map(|j| y.get(i, j)).sum();
            assert!(row.norm() < 1e-12);
            for j in 0..30 {
                let v = y.get(i, j).re;
                assert!(v == hi || v == lo);
            }
        }
        // 7 entries per row at hi, the rest at lo
        let expected = 30.0 * (7.0 * hi * hi + 23.0 * lo * lo);
        assert!((y.frobenius_sq() - expected).abs() < 1e-9);
        assert!(matches!(center_y(&RegularDigraph::circulant(3, 3).unwrap()), Err(Error::DegenerateScale { .. })));
    }

    #[test]
    fn centred_bernoulli() {
        let ones = DenseMatrix::ones(3, 3);
        let x = center_x(&ones, 0.5).unwrap();
        assert!(x.entries().iter().all(|z| (z.re - 1.0).abs() < 1e-15));
        assert!(matches!(center_x(&ones, 1.0), Err(Error::BadP(_))));
        let p = 0.1;
        let x = center_x(&sample_bernoulli(1000, p, RngStream::new(4, 0)), p).unwrap();
        let vals: Vec<f64> = x.entries().iter().map(|z| z.re).collect();
        let (mean, se) = mean_and_se(&vals);
        assert!(mean.abs() < 3.5 * se);
        let sq: Vec<f64> = vals.iter().map(|v| v * v).collect();
        let (m2, se2) = mean_and_se(&sq);
        assert!((m2 - 1.0).abs() < 3.5 * se2);
        // fourth moment is (1 - 3p + 3p^2) / (p (1 - p)) <= 1/p
        let m4 = vals.iter().map(|v| v.powi(4)).sum::<f64>() / vals.len() as f64;
        assert!(m4 <= 1.0 / p);
    }

    #[test]
    fn spec_validation() {
        assert!(EnsembleSpec::new(EnsembleKind::Regular, 10, 6, RngStream::new(0, 0)).is_err());
        let spec = EnsembleSpec::new(EnsembleKind::Bernoulli, 10, 5, RngStream::new(0, 0)).unwrap();
        assert_eq!(spec.sample(3).unwrap(), spec.sample(3).unwrap());
        assert_ne!(spec.sample(3).unwrap(), spec.sample(4).unwrap());
    }
}
