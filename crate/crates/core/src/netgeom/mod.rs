//! Geometry of the unit sphere: concentration function, flat vectors and
//! their nets, bimodal decomposition, small-ball estimates.

mod bimodal;
mod concentration;
mod flat;
mod net;
mod smallball;

pub use bimodal::{bimodal_sets, min_gap, BimodalSets, SECTORS};
pub use concentration::{concentration_function, concentration_with_center, levy_set, ConcentrationMode, EXACT_MAX_N};
pub use flat::{flatness_certificate, FlatnessCertificate, FlatnessMethod};
pub use net::{build_flat_net, build_flat_net_capped, flat_net_grid_steps, FlatNet, NET_CARDINALITY_CONSTANT, NET_DEFAULT_CAP};
pub use smallball::{small_ball_mc, tensorization_check, SmallBallReport, TensorizationReport};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TAG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormTag {
    Unit,
    General,
}

/// A complex n-vector with checked norm and mean-zero tags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitVector {
    components: Vec<Complex64>,
    norm_tag: NormTag,
    mean_zero: bool,
}

impl UnitVector {
    /// Tags are computed from the data.
    pub fn new(components: Vec<Complex64>) -> Self {
        let norm = l2(&components);
        let sum: Complex64 = components.iter().sum();
        Self {
            norm_tag: if (norm - 1.0).abs() <= TAG_TOL { NormTag::Unit } else { NormTag::General },
            mean_zero: sum.norm() <= TAG_TOL,
            components,
        }
    }

    pub fn from_real(components: &[f64]) -> Self {
        Self::new(components.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// v / |v|.
    pub fn normalized(components: Vec<Complex64>) -> Result<Self> {
        let norm = l2(&components);
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self::new(components.into_iter().map(|z| z / norm).collect()))
    }

    /// Projection onto the orthogonal complement of the all-ones vector,
    /// then normalized.
    pub fn project_mean_zero(components: &[Complex64]) -> Result<Self> {
        let n = components.len() as f64;
        let mean: Complex64 = components.iter().sum::<Complex64>() / n;
        let v: Vec<Complex64> = components.iter().map(|z| z - mean).collect();
        let mut u = Self::normalized(v)?;
        // the normalized projection is mean-zero up to rounding
        let s: Complex64 = u.components.iter().sum();
        u.mean_zero = s.norm() <= TAG_TOL * n.sqrt().max(1.0);
        Ok(u)
    }

    pub fn components(&self) -> &[Complex64] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn norm_tag(&self) -> NormTag {
        self.norm_tag
    }

    pub fn is_unit(&self) -> bool {
        self.norm_tag == NormTag::Unit
    }

    pub fn is_mean_zero(&self) -> bool {
        self.mean_zero
    }

    pub fn distance(&self, other: &UnitVector) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

pub(crate) fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags() {
        let u = UnitVector::from_real(&[0.6, 0.8]);
        assert!(u.is_unit() && !u.is_mean_zero());
        let v = UnitVector::project_mean_zero(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0), Complex64::new(0.0, 0.0)]).unwrap();
        assert!(v.is_unit() && v.is_mean_zero());
        assert!(matches!(UnitVector::normalized(vec![Complex64::new(0.0, 0.0)]), Err(Error::ZeroVector)));
        assert_eq!(UnitVector::from_real(&[2.0]).norm_tag(), NormTag::General);
    }
}
