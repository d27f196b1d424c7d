use hermite_obs_core::hermite::{space_dim, MultiIndex};
use hermite_obs_core::poly::bernstein::Verdict;
use hermite_obs_core::poly::chebyshev::chebyshev_first_explicit;
use hermite_obs_core::poly::{
    bernstein_check, chebyshev_value, hermite_tail_bound, kovrijkine_interval_bound, remez_ball_bound, remez_bound, tail_constant_cn,
    weighted_check, ChebyshevKind,
};
use hermite_obs_core::Expansion64;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ground() -> Expansion64 {
    Expansion64::basis_vector(1, 0, &MultiIndex(vec![0]), Complex64::new(1.0, 0.0)).unwrap()
}

fn random_expansion(rng: &mut ChaCha8Rng, n: usize, cutoff: usize) -> Expansion64 {
    let c = (0..space_dim(n, cutoff)).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    Expansion64::new(n, cutoff, c).unwrap()
}

#[test]
fn remez_examples() {
    let b = remez_bound(1, 1, 0.5).unwrap();
    assert!((b.real - 3.0).abs() < 1e-14);
    let b = remez_bound(2, 3, 0.75).unwrap();
    assert!((b.real - chebyshev_value(ChebyshevKind::First, 3, &3.0f64)).abs() < 1e-10);
    assert!(remez_bound(1, 2, 1.0).is_err() && remez_bound(1, 2, 0.0).is_err());
    assert!((remez_ball_bound(1, 0, 1.0).unwrap() - 4.0 / 3f64.sqrt()).abs() < 1e-12);
}

#[test]
fn kovrijkine_examples() {
    assert_eq!(kovrijkine_interval_bound(10.0, 0.3, 1.0).unwrap(), 1.0);
    assert!((kovrijkine_interval_bound(2.0, 0.5, 2.0).unwrap() - 4.0).abs() < 1e-12);
    assert!(kovrijkine_interval_bound(2.0, 0.5, 0.5).is_err());
}

#[test]
fn bernstein_ground_state() {
    let c = bernstein_check(&ground(), 1.0, &MultiIndex(vec![1])).unwrap();
    assert!((c.lhs - 0.5f64.sqrt()).abs() < 1e-14);
    assert!(c.pass);
    // Φ_0 seen in E_1: rhs = e^{e/2}·2·e.
    let g = Expansion64::basis_vector(1, 1, &MultiIndex(vec![0]), Complex64::new(1.0, 0.0)).unwrap();
    let c = bernstein_check(&g, 1.0, &MultiIndex(vec![1])).unwrap();
    let want = (std::f64::consts::E / 2.0).exp() * 2.0 * std::f64::consts::E;
    assert!((c.rhs - want).abs() < 1e-12 * want);
    assert!(bernstein_check(&ground(), 1.5, &MultiIndex(vec![1])).is_err());
    assert!(bernstein_check(&ground(), 0.0, &MultiIndex(vec![1])).is_err());
}

#[test]
fn bernstein_random_batch() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let betas: Vec<MultiIndex> = hermite_obs_core::hermite::enumerate_multiindices(2, 3);
    for _ in 0..100 {
        let f = random_expansion(&mut rng, 2, 20);
        for beta in &betas {
            for delta in [0.25, 0.5, 1.0] {
                let c = bernstein_check(&f, delta, beta).unwrap();
                assert!(c.pass, "beta {beta:?} delta {delta}: {} > {}", c.lhs, c.rhs);
            }
        }
    }
}

/// `∫ e^{2δx²} φ_0² = (1 − 2δ)^{−1/2}`.
#[test]
fn weighted_ground_state() {
    let delta = 1.0 / 64.0;
    let c = weighted_check(&ground(), delta, &MultiIndex(vec![0])).unwrap();
    let want = (1.0 - 2.0 * delta).powf(-0.25);
    assert!((c.lhs_x.partial - want).abs() < 1e-8, "{} vs {want}", c.lhs_x.partial);
    assert!((c.rhs - 4.0).abs() < 1e-12);
    assert_eq!(c.verdict, Verdict::Pass);
    assert!(weighted_check(&ground(), 1.0 / 32.0, &MultiIndex(vec![0])).is_err());
}

#[test]
fn tail_examples() {
    let t = hermite_tail_bound(0, 1.0).unwrap();
    assert!((t.exact - 0.1572992).abs() < 1e-7);
    assert!((t.bound - 0.4151075).abs() < 1e-7);
    assert!(hermite_tail_bound(3, 2.0).is_err());
    for n in 1..=3 {
        let c = tail_constant_cn(n).unwrap();
        assert!(c.c_n >= (2.0 * n as f64 * 8f64.ln()).sqrt());
    }
}

#[test]
fn tail_grid() {
    for k in 0..=20 {
        let a0 = ((2 * k + 1) as f64).sqrt();
        for step in 0..30 {
            let a = a0 + 0.25 * step as f64;
            let t = hermite_tail_bound(k, a).unwrap();
            assert!(t.exact <= t.bound * (1.0 + 1e-12), "k={k} a={a}");
        }
    }
}

fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * x + v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chebyshev_recurrence_matches_explicit(d in 0usize..=30, x in -1.2f64..1.2) {
        let r = chebyshev_value(ChebyshevKind::First, d, &x);
        let e = chebyshev_first_explicit(d, x);
        prop_assert!((r - e).abs() <= 1e-9 * r.abs().max(1.0));
    }

    /// Random real polynomials on `K = [−1, 1]` against `T_d(F(|E|/2))` with
    /// `E` a union of intervals of total length at least 0.2.
    #[test]
    fn remez_dominance(coeffs in prop::collection::vec(-1.0f64..1.0, 1..=9), cuts in prop::collection::vec(0.0f64..1.0, 2..=6)) {
        let d = coeffs.len() - 1;
        let mut cuts = cuts;
        cuts.sort_by(f64::total_cmp);
        let pts: Vec<f64> = cuts.iter().map(|c| 2.0 * c - 1.0).collect();
        let e: Vec<(f64, f64)> = pts.chunks(2).filter(|p| p.len() == 2).map(|p| (p[0], p[1])).collect();
        let measure: f64 = e.iter().map(|(a, b)| b - a).sum();
        prop_assume!(measure >= 0.2 && measure < 2.0);
        let grid = 10_000;
        let mut sup_k = 0.0f64;
        let mut sup_e = 0.0f64;
        for i in 0..=grid {
            let x = -1.0 + 2.0 * i as f64 / grid as f64;
            sup_k = sup_k.max(poly_eval(&coeffs, x).abs());
        }
        for &(a, b) in &e {
            for i in 0..=grid {
                let x = a + (b - a) * i as f64 / grid as f64;
                sup_e = sup_e.max(poly_eval(&coeffs, x).abs());
            }
        }
        let bound = remez_bound(1, d, measure / 2.0).unwrap().real;
        prop_assert!(sup_k <= bound * sup_e * (1.0 + 1e-9), "d={} |E|={} {} > {}·{}", d, measure, sup_k, bound, sup_e);
    }
}
