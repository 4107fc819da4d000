//! Property tests for the structural invariants of each module.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

use rdlab::ensembles::{sample_bernoulli, sample_regular};
use rdlab::factor::{find_regular_factor, ore_ryser_exhaustive};
use rdlab::netgeom::{
    bimodal_sets, concentration_function, flatness_certificate, min_gap, ConcentrationMode, UnitVector,
};
use rdlab::sampler::{neighborhood_switch, simple_switch, switch_orientation, SwitchSpec};
use rdlab::spectral::{
    eigenvalues, hermitize, log_potential, log_potential_from_singular, shifted_singular_values, singular_values,
    stieltjes_g, EmpiricalMeasure, StieltjesRoute,
};
use rdlab::{DenseMatrix, RegularDigraph, RngStream};

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

/// (n, d, seed) with 1 <= d <= n - 1.
fn shape(max_n: usize) -> impl Strategy<Value = (usize, usize, u64)> {
    (3..=max_n).prop_flat_map(|n| (Just(n), 1..n, any::<u64>()))
}

fn digraph(n: usize, d: usize, seed: u64) -> RegularDigraph {
    sample_regular(n, d, RngStream::new(seed, 0)).expect("valid (n, d)")
}

fn subset(n: usize, mask: u64) -> Vec<usize> {
    (0..n).filter(|&j| mask >> j & 1 == 1).collect()
}

fn complex_gaussian(n: usize, seed: u64) -> DenseMatrix {
    let mut g = RngStream::new(seed, 1).rng();
    DenseMatrix::from_fn(n, n, |_, _| {
        Complex64::new(g.sample::<f64, _>(StandardNormal), g.sample::<f64, _>(StandardNormal))
    })
}

fn unit_vector(n: usize, seed: u64) -> UnitVector {
    let mut g = RngStream::new(seed, 2).rng();
    let raw = (0..n)
        .map(|_| Complex64::new(g.sample::<f64, _>(StandardNormal), g.sample::<f64, _>(StandardNormal)))
        .collect();
    UnitVector::normalized(raw).expect("nonzero")
}

/// An admissible neighbourhood switch at rows (i, ip), if one exists.
fn some_spec(a: &RegularDigraph, i: usize, ip: usize) -> Option<SwitchSpec> {
    let only = |x: usize, y: usize| -> Vec<usize> {
        a.out_neighbors(x).iter().copied().filter(|&j| !a.has_edge(y, j)).collect()
    };
    let (give, take) = (only(i, ip), only(ip, i));
    let k = give.len().min(take.len());
    if k == 0 {
        return None;
    }
    SwitchSpec::new((i, ip), give[..k].to_vec(), take[..k].to_vec()).ok()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn sampled_digraphs_are_consistent((n, d, seed) in shape(12)) {
        let a = digraph(n, d, seed);
        prop_assert!(a.check_invariants().is_ok());
        prop_assert_eq!(a.transpose().transpose(), a.clone());
    }

    #[test]
    fn row_regularity_restricted((n, d, seed) in shape(12), rows in any::<u64>(), cols in any::<u64>()) {
        let a = digraph(n, d, seed);
        let i_set = subset(n, rows);
        let j_set = subset(n, cols);
        let j_comp = subset(n, !cols);
        let total = a.edge_count(&i_set, &j_set).unwrap() + a.edge_count(&i_set, &j_comp).unwrap();
        prop_assert_eq!(total, d * i_set.len());
    }

    #[test]
    fn complement_is_an_involution((n, d, seed) in shape(12)) {
        let a = digraph(n, d, seed);
        let c = a.complement().unwrap();
        prop_assert_eq!(c.d(), n - d);
        prop_assert!(c.check_invariants().is_ok());
        prop_assert_eq!(c.complement().unwrap(), a);
    }

    #[test]
    fn simple_switch_is_an_involution(
        (n, d, seed) in shape(10),
        picks in prop::array::uniform4(any::<prop::sample::Index>()),
    ) {
        let a = digraph(n, d, seed);
        let [i1, i2, j1, j2] = picks.map(|p| p.index(n));
        prop_assume!(i1 != i2 && j1 != j2);
        let b = simple_switch(&a, i1, i2, j1, j2).unwrap();
        prop_assert!(b.check_invariants().is_ok());
        prop_assert_eq!(simple_switch(&b, i1, i2, j1, j2).unwrap(), a);
    }

    #[test]
    fn neighborhood_switch_is_an_involution(
        (n, d, seed) in shape(10),
        i in any::<prop::sample::Index>(),
        ip in any::<prop::sample::Index>(),
    ) {
        let a = digraph(n, d, seed);
        let (i, ip) = (i.index(n), ip.index(n));
        prop_assume!(i != ip);
        let Some(spec) = some_spec(&a, i, ip) else { return Ok(()); };
        prop_assert!(switch_orientation(&a, &spec).unwrap().is_some());
        let b = neighborhood_switch(&a, &spec).unwrap();
        prop_assert!(b.check_invariants().is_ok());
        prop_assert_eq!(neighborhood_switch(&b, &spec).unwrap(), a);
    }

    #[test]
    fn streams_reproduce(seed in any::<u64>(), index in any::<u64>()) {
        let draw = |s: RngStream| -> Vec<u64> { let mut g = s.rng(); (0..8).map(|_| g.random()).collect() };
        let s = RngStream::new(seed, index);
        prop_assert_eq!(draw(s), draw(RngStream::new(seed, index)));
        prop_assert_ne!(draw(s.child(0)), draw(s.child(1)));
        prop_assert_eq!(digraph(9, 3, seed), digraph(9, 3, seed));
    }

    #[test]
    fn concentration_function_properties(n in 2usize..40, seed in any::<u64>(), rho in 0.01f64..3.0, phase in 0.0f64..6.3) {
        let v = unit_vector(n, seed);
        let q = concentration_function(&v, rho, ConcentrationMode::Exact).unwrap();
        prop_assert!(q >= 1.0 / n as f64 - 1e-15);
        let q2 = concentration_function(&v, rho * 1.5, ConcentrationMode::Exact).unwrap();
        prop_assert!(q2 >= q);
        let rot = Complex64::from_polar(1.0, phase);
        let rotated = UnitVector::new(v.components().iter().map(|&z| z * rot).collect());
        prop_assert_eq!(concentration_function(&rotated, rho, ConcentrationMode::Exact).unwrap(), q);
        let mut reversed = v.components().to_vec();
        reversed.reverse();
        let permuted = UnitVector::new(reversed);
        prop_assert_eq!(concentration_function(&permuted, rho, ConcentrationMode::Exact).unwrap(), q);
    }

    #[test]
    fn flatness_certificates_recheck(n in 4usize..40, seed in any::<u64>(), m_frac in 0.05f64..0.5, rho in 0.05f64..1.0) {
        let u = unit_vector(n, seed);
        let m = ((n as f64 * m_frac) as usize).max(1);
        let cert = flatness_certificate(&u, m, rho).unwrap();
        prop_assert!((cert.recompute_residual(&u) - cert.residual).abs() <= 1e-10);
        if cert.member {
            prop_assert!(cert.residual <= rho);
            prop_assert!(cert.support.len() <= m);
        }
    }

    #[test]
    fn bimodal_weak_separation(n in 16usize..64, seed in any::<u64>(), rho in 0.1f64..0.5) {
        let u = UnitVector::project_mean_zero(unit_vector(n, seed).components()).unwrap();
        let m = (n / 8).max(1);
        let Ok(sets) = bimodal_sets(&u, m, rho) else { return Ok(()); };
        let gap = min_gap(&u, &sets.j1, &sets.j2);
        prop_assert!(gap >= rho / (2.0 * (n as f64).sqrt()) - 1e-12);
    }

    #[test]
    fn hermitization_spectrum(n in 1usize..12, seed in any::<u64>(), zr in -2.0f64..2.0, zi in -2.0f64..2.0) {
        let m = complex_gaussian(n, seed);
        let z = Complex64::new(zr, zi);
        let mut eig = hermitize(&m, z).unwrap().eigenvalues().unwrap();
        let sv = shifted_singular_values(&m, z).unwrap();
        let mut expected: Vec<f64> = sv.measure().atoms().iter().flat_map(|&s| [s, -s]).collect();
        eig.sort_by(f64::total_cmp);
        expected.sort_by(f64::total_cmp);
        for (a, b) in eig.iter().zip(&expected) {
            prop_assert!((a - b).abs() <= 1e-8, "{} vs {}", a, b);
        }
    }

    #[test]
    fn resolvent_contracts(n in 1usize..10, seed in any::<u64>(), wr in -2.0f64..2.0, wi in 1e-3f64..2.0) {
        let m = complex_gaussian(n, seed);
        let w = Complex64::new(wr, wi);
        let r = hermitize(&m, Complex64::new(0.3, -0.2)).unwrap().resolvent(w).unwrap();
        let norm = singular_values(&r).unwrap().largest();
        prop_assert!(norm <= 1.0 / wi + 1e-10 * (1.0 / wi).max(1.0));
    }

    #[test]
    fn stieltjes_routes_agree(n in 1usize..10, seed in any::<u64>(), wr in -2.0f64..2.0, wi in 1e-3f64..2.0) {
        let m = complex_gaussian(n, seed);
        let (z, w) = (Complex64::new(0.5, 0.5), Complex64::new(wr, wi));
        let direct = stieltjes_g(&m, z, w, StieltjesRoute::Direct);
        // the direct route may refuse an ill-conditioned solve; only compare when it answers
        prop_assume!(direct.is_ok());
        let sv = stieltjes_g(&m, z, w, StieltjesRoute::Sv).unwrap();
        prop_assert!((direct.unwrap() - sv).norm() <= 1e-8);
    }

    #[test]
    fn log_potential_identity(n in 1usize..12, seed in any::<u64>(), zr in -2.0f64..2.0, zi in -2.0f64..2.0) {
        let m = complex_gaussian(n, seed).scale(1.0 / (n as f64).sqrt());
        let z = Complex64::new(zr, zi);
        let from_eigs = log_potential(&eigenvalues(&m).unwrap(), z);
        let from_svs = log_potential_from_singular(&singular_values(&m.shift_diagonal(z)).unwrap().measure());
        prop_assert!((from_eigs - from_svs).abs() <= 1e-8 * from_svs.abs().max(1.0));
    }

    #[test]
    fn measure_weights_sum_to_one(atoms in prop::collection::vec(-5.0f64..5.0, 1..50), extra in prop::collection::vec(-5.0f64..5.0, 1..50)) {
        let a = EmpiricalMeasure::uniform(atoms);
        let b = EmpiricalMeasure::uniform(extra);
        let mix = EmpiricalMeasure::mixture(&[a.clone(), b]);
        for mu in [&a, &mix] {
            prop_assert!((mu.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!((mu.cdf(f64::INFINITY) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn flow_agrees_with_ore_ryser(n in 1usize..8, d_frac in 0.0f64..1.0, p in 0.2f64..0.95, seed in any::<u64>()) {
        let d = 1 + ((n - 1) as f64 * d_frac) as usize;
        let b = sample_bernoulli(n, p, RngStream::new(seed, 3));
        let flow = find_regular_factor(&b, d).unwrap();
        prop_assert_eq!(flow.exists, ore_ryser_exhaustive(&b, d).unwrap().exists);
        if let Some(f) = flow.factor {
            prop_assert!(f.check_invariants().is_ok());
            prop_assert_eq!(f.d(), d);
            for i in 0..n {
                for &j in f.out_neighbors(i) {
                    prop_assert_eq!(b.get(i, j).re, 1.0);
                }
            }
        }
    }
}
