use hermite_obs_core::gram::{
    gram_matrix, gram_matrix_mp, spectral_constant, spectral_constant_fixed, theoretical_bound, BoundParams, PrecisionPolicy,
    SpectralStatus,
};
use hermite_obs_core::hermite::{eval_hermite_1d, space_dim};
use hermite_obs_core::linalg::adaptive_scalar;
use hermite_obs_core::regions::{
    explicit, full_space, half_space, integrate_pair, make_periodic_thick, truncate_radius, Cuboid, Region,
};
use hermite_obs_core::Real;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sorted, disjoint intervals inside `[-4, 4]`.
fn intervals() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-4.0f64..4.0, 0.05f64..1.5), 1..4).prop_map(|mut v| {
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (a, w) in v {
            let a = match out.last() {
                Some(&(_, hi)) if a <= hi + 0.01 => hi + 0.01,
                _ => a,
            };
            out.push((a, a + w));
        }
        out
    })
}

fn region_1d(iv: &[(f64, f64)]) -> Region {
    explicit(1, iv.iter().map(|&(a, b)| Cuboid::new(vec![a], vec![b]).unwrap()).collect()).unwrap()
}

fn oracle_pair(iv: &[(f64, f64)], j: usize, k: usize) -> f64 {
    iv.iter()
        .map(|&(a, b)| adaptive_scalar(|x| eval_hermite_1d(j, &x) * eval_hermite_1d(k, &x), a, b, 1e-14).0)
        .sum()
}

#[test]
fn full_space_constant_is_one() {
    for (n, cutoff) in [(1, 12), (2, 6), (3, 3)] {
        let r = truncate_radius(cutoff, n, 2.0).unwrap();
        let g = gram_matrix(&full_space(n, r).unwrap(), n, cutoff).unwrap();
        let c = spectral_constant(&g, &PrecisionPolicy::default()).unwrap();
        assert!((c.c_n - 1.0).abs() < 1e-12, "n={n}: {}", c.c_n);
    }
}

#[test]
fn half_line_matches_independent_integrals() {
    let region = half_space(1, 0, 0.0, truncate_radius(8, 1, 2.0).unwrap()).unwrap();
    let g = gram_matrix(&region, 1, 8).unwrap();
    let r = region.intervals().unwrap();
    for j in 0..=8 {
        for k in 0..=8 {
            let want = oracle_pair(&r, j, k);
            assert!((g.matrix[(j, k)] - want).abs() < 1e-12, "({j},{k})");
        }
    }
}

/// The 2D entries of a box Gram matrix against nested 1D quadrature.
#[test]
fn tensorization_against_2d_quadrature() {
    let b = Cuboid::new(vec![-0.5, 0.2], vec![1.3, 2.0]).unwrap();
    let region = explicit(2, vec![b]).unwrap();
    let g = gram_matrix(&region, 2, 3).unwrap();
    let basis = hermite_obs_core::hermite::Basis::get(2, 3);
    for (p, a) in basis.indices.iter().enumerate() {
        for (q, c) in basis.indices.iter().enumerate() {
            let inner = |y: f64| {
                adaptive_scalar(
                    |x| {
                        eval_hermite_1d(a.get(0) as usize, &x)
                            * eval_hermite_1d(c.get(0) as usize, &x)
                            * eval_hermite_1d(a.get(1) as usize, &y)
                            * eval_hermite_1d(c.get(1) as usize, &y)
                    },
                    -0.5,
                    1.3,
                    1e-14,
                )
                .0
            };
            let want = adaptive_scalar(inner, 0.2, 2.0, 1e-13).0;
            assert!((g.matrix[(p, q)] - want).abs() < 1e-11, "{a:?} {c:?}");
        }
    }
}

#[test]
fn extended_precision_agrees_with_double() {
    let region = make_periodic_thick(1, 1.0, 0.5, truncate_radius(10, 1, 2.0).unwrap()).unwrap();
    let g = gram_matrix(&region, 1, 10).unwrap();
    let h = gram_matrix_mp(&region, 1, 10, 256).unwrap();
    let d = g.matrix.sub(&h.matrix.map(|v| v.to_f64())).max_abs();
    assert!(d < 1e-13, "{d}");
    let c64 = spectral_constant_fixed(&g);
    let cmp = hermite_obs_core::with_precision(256, || spectral_constant_fixed(&h));
    assert!((c64.c_n - cmp.c_n).abs() < 1e-9 * cmp.c_n);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pair_integrals_exact(iv in intervals(), j in 0usize..=20, k in 0usize..=20) {
        prop_assume!(j != k);
        let acc = integrate_pair(&region_1d(&iv), j, k).unwrap();
        let want = oracle_pair(&iv, j, k);
        prop_assert!((acc.value - want).abs() <= 1e-11, "{} vs {}", acc.value, want);
    }

    #[test]
    fn quadrature_account_is_honest(iv in intervals(), j in 0usize..=20) {
        let acc = integrate_pair(&region_1d(&iv), j, j).unwrap();
        let fine = oracle_pair(&iv, j, j);
        prop_assert!((acc.value - fine).abs() <= acc.abs_error_bound.max(1e-15) + 1e-15);
    }

    #[test]
    fn additivity(iv in intervals(), j in 0usize..=12, k in 0usize..=12) {
        let whole = integrate_pair(&region_1d(&iv), j, k).unwrap().value;
        let parts: f64 = iv.iter().map(|p| integrate_pair(&region_1d(&[*p]), j, k).unwrap().value).sum();
        prop_assert!((whole - parts).abs() <= 1e-13);
    }

    #[test]
    fn monotone_under_inclusion(iv in intervals(), cutoff in 1usize..=10) {
        let small = region_1d(&iv[..1]);
        let large = region_1d(&iv);
        let p = PrecisionPolicy::default();
        let a = spectral_constant(&gram_matrix(&small, 1, cutoff).unwrap(), &p).unwrap();
        let b = spectral_constant(&gram_matrix(&large, 1, cutoff).unwrap(), &p).unwrap();
        prop_assume!(a.status == SpectralStatus::Resolved && b.status == SpectralStatus::Resolved);
        prop_assert!(a.lambda_min <= b.lambda_min * (1.0 + 1e-12) + 1e-300);
        prop_assert!(a.c_n >= b.c_n * (1.0 - 1e-12));
    }

    #[test]
    fn monotone_in_cutoff(gamma in 0.2f64..0.9, cutoff in 1usize..=14) {
        let r = truncate_radius(cutoff + 1, 1, 2.0).unwrap();
        let region = make_periodic_thick(1, 1.0, gamma, r).unwrap();
        let p = PrecisionPolicy::default();
        let a = spectral_constant(&gram_matrix(&region, 1, cutoff).unwrap(), &p).unwrap();
        let b = spectral_constant(&gram_matrix(&region, 1, cutoff + 1).unwrap(), &p).unwrap();
        prop_assert!(a.c_n <= b.c_n * (1.0 + 1e-10));
    }

    #[test]
    fn rayleigh_consistency(seed in any::<u64>(), gamma in 0.2f64..0.9, cutoff in 1usize..=12) {
        let r = truncate_radius(cutoff, 1, 2.0).unwrap();
        let g = gram_matrix(&make_periodic_thick(1, 1.0, gamma, r).unwrap(), 1, cutoff).unwrap();
        let c = spectral_constant(&g, &PrecisionPolicy::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let v: Vec<f64> = (0..space_dim(1, cutoff)).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm: f64 = v.iter().map(|x| x * x).sum();
            let ratio = norm / g.quadratic_form(&v);
            prop_assert!(ratio <= c.c_n * c.c_n * (1.0 + 1e-9));
        }
    }

    #[test]
    fn bounds_dominate(gamma in 0.2f64..0.9, cutoff in 1usize..=16) {
        let r = truncate_radius(cutoff, 1, 2.0).unwrap();
        let region = make_periodic_thick(1, 1.0, gamma, r).unwrap();
        let params = BoundParams::for_region(&region).unwrap().unwrap();
        let c = spectral_constant(&gram_matrix(&region, 1, cutoff).unwrap(), &PrecisionPolicy::default()).unwrap();
        let b = theoretical_bound(&params, cutoff).unwrap();
        prop_assert!(c.ln_c_n <= b.ln_value);
    }
}
