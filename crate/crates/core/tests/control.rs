use hermite_obs_core::control::{
    cost_blowup_study, hum_control, lr_staircase, observability_constant, ControlProblem, ObservabilityStatus, StaircaseOptions,
};
use hermite_obs_core::hermite::{space_dim, MultiIndex};
use hermite_obs_core::quadratic::QuadraticSymbol;
use hermite_obs_core::regions::{explicit, full_space, make_periodic_thick, truncate_radius, Cuboid};
use hermite_obs_core::verify::run_suites;
use hermite_obs_core::Expansion64;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn harmonic_on_line(cutoff: usize, horizon: f64) -> ControlProblem {
    ControlProblem::new(QuadraticSymbol::harmonic(1).unwrap(), full_space(1, 40.0).unwrap(), cutoff, horizon).unwrap()
}

fn random_datum(seed: u64, cutoff: usize) -> Expansion64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = (0..space_dim(1, cutoff)).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    Expansion64::new(1, cutoff, c).unwrap()
}

/// `2λ e^{−2λT}/(1 − e^{−2λT})`, the cost of steering one unit mode to zero.
fn mode_cost(lambda: f64, t: f64) -> f64 {
    let e = (-2.0 * lambda * t).exp();
    2.0 * lambda * e / (1.0 - e)
}

#[test]
fn observability_on_the_line_matches_modes() {
    for t in [0.25, 0.5, 1.0, 2.0] {
        let r = observability_constant(&harmonic_on_line(6, t)).unwrap();
        let want = (0..=6).map(|k| mode_cost((2 * k + 1) as f64, t)).fold(0.0, f64::max);
        assert_eq!(r.status, ObservabilityStatus::Resolved);
        assert!((r.c_t - want).abs() <= 1e-6 * want, "T={t}: {} vs {want}", r.c_t);
    }
}

#[test]
fn zero_datum_needs_no_control() {
    let p = harmonic_on_line(4, 1.0);
    let r = hum_control(&p, &Expansion64::zeros(1, 4)).unwrap();
    assert_eq!(r.cost, 0.0);
    assert_eq!(r.residual, 0.0);
    assert!(r.controls.iter().all(|u| u.norm() == 0.0));
}

#[test]
fn hum_on_the_line() {
    let p = harmonic_on_line(8, 1.0);
    let f0 = Expansion64::basis_vector(1, 8, &MultiIndex(vec![0]), Complex64::new(1.0, 0.0)).unwrap();
    let r = hum_control(&p, &f0).unwrap();
    assert!(r.residual <= 1e-10, "{}", r.residual);
    assert!((r.cost - mode_cost(1.0, 1.0)).abs() <= 1e-6 * mode_cost(1.0, 1.0));
    assert!((r.cost_quadrature - r.cost).abs() <= 1e-6 * r.cost);
}

#[test]
fn hum_on_a_thick_set() {
    let region = make_periodic_thick(1, 1.0, 0.6, truncate_radius(12, 1, 2.0).unwrap()).unwrap();
    let p = ControlProblem::new(QuadraticSymbol::harmonic(1).unwrap(), region, 12, 1.0).unwrap().with_precision_bits(Some(256));
    let r = hum_control(&p, &random_datum(3, 12)).unwrap();
    assert!(!r.partial);
    assert!(r.residual <= 1e-6, "{}", r.residual);
}

#[test]
fn staircase_energies_decay() {
    let region = make_periodic_thick(1, 1.0, 0.6, truncate_radius(12, 1, 2.0).unwrap()).unwrap();
    let p = ControlProblem::new(QuadraticSymbol::harmonic(1).unwrap(), region, 12, 1.0).unwrap();
    let r = lr_staircase(&p, &random_datum(4, 12), &StaircaseOptions::default()).unwrap();
    assert!(r.aborted_at.is_none());
    assert!(r.residual <= 1e-4, "{}", r.residual);
    let e: Vec<f64> = r.stages.iter().map(|s| s.energy_after).collect();
    assert!(e.windows(2).all(|w| w[1] < w[0]), "{e:?}");
    let levels: Vec<usize> = r.stages.iter().map(|s| s.k_j).collect();
    assert!(levels.windows(2).all(|w| w[1] >= w[0]));
}

/// On the line the constant saturates at the lowest mode rather than blowing up exponentially.
#[test]
fn blowup_on_the_line_is_mild() {
    let study = cost_blowup_study(&harmonic_on_line(6, 1.0), &[1.0, 0.5, 0.25, 0.125], 0).unwrap();
    for row in &study.rows {
        let want = mode_cost(1.0, row.horizon);
        assert!((row.c_t - want).abs() <= 1e-6 * want);
    }
}

#[test]
fn verify_suites_pass_at_default_counts() {
    let reports = run_suites("all", 20240601, None).unwrap();
    for r in &reports {
        assert!(r.passed(), "{}: {} failures of {}", r.suite, r.failures, r.trials);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn constant_nonincreasing_in_horizon(gamma in 0.3f64..0.9, t in 0.2f64..1.5) {
        let region = make_periodic_thick(1, 1.0, gamma, truncate_radius(6, 1, 2.0).unwrap()).unwrap();
        let p = ControlProblem::new(QuadraticSymbol::harmonic(1).unwrap(), region, 6, t).unwrap();
        let a = observability_constant(&p).unwrap();
        let b = observability_constant(&p.with_horizon(1.5 * t)).unwrap();
        prop_assume!(a.status == ObservabilityStatus::Resolved && b.status == ObservabilityStatus::Resolved);
        prop_assert!(b.c_t <= a.c_t * (1.0 + 1e-6));
    }

    #[test]
    fn constant_grows_when_region_shrinks(lo in -3.0f64..0.0, w in 0.5f64..3.0, cut in 0.1f64..0.9, t in 0.3f64..1.5) {
        let outer = explicit(1, vec![Cuboid::new(vec![lo], vec![lo + w]).unwrap()]).unwrap();
        let inner = explicit(1, vec![Cuboid::new(vec![lo], vec![lo + cut * w]).unwrap()]).unwrap();
        let h = QuadraticSymbol::harmonic(1).unwrap();
        let a = observability_constant(&ControlProblem::new(h.clone(), outer, 5, t).unwrap()).unwrap();
        let b = observability_constant(&ControlProblem::new(h, inner, 5, t).unwrap()).unwrap();
        prop_assume!(a.status == ObservabilityStatus::Resolved && b.status == ObservabilityStatus::Resolved);
        prop_assert!(b.c_t >= a.c_t * (1.0 - 1e-6), "{} < {}", b.c_t, a.c_t);
    }
}
