use hermite_obs_core::hermite::{space_dim, MultiIndex};
use hermite_obs_core::linalg::Mat;
use hermite_obs_core::quadratic::hamilton::{singular_space_exact, symplectic};
use hermite_obs_core::quadratic::{evolve, hamilton_map, semigroup_matrix, singular_space, weyl_quantize, QuadraticSymbol};
use hermite_obs_core::{with_precision, Expansion64, Galerkin64, GalerkinMp, Real};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `Re Q = BᵀB` (accretive) plus a symmetric imaginary part.
fn symbol_strategy(n: usize) -> impl Strategy<Value = QuadraticSymbol> {
    let m = 2 * n;
    (prop::collection::vec(-1.0f64..1.0, m * m), prop::collection::vec(-1.0f64..1.0, m * m)).prop_map(move |(b, s)| {
        let q = Mat::from_fn(m, m, |i, j| {
            let re: f64 = (0..m).map(|k| b[k * m + i] * b[k * m + j]).sum();
            let im = 0.5 * (s[i * m + j] + s[j * m + i]);
            c(re, im)
        });
        QuadraticSymbol::new(n, q, "random").unwrap()
    })
}

fn unit(m: usize, i: usize) -> Vec<f64> {
    (0..m).map(|k| if k == i { 1.0 } else { 0.0 }).collect()
}

fn ket(n: usize, cutoff: usize, seed: &[f64]) -> Expansion64 {
    let d = space_dim(n, cutoff);
    Expansion64::new(n, cutoff, (0..d).map(|i| c(seed[i % seed.len()], seed[(i + 1) % seed.len()] * 0.5)).collect()).unwrap()
}

#[test]
fn harmonic_hamilton_map() {
    let h = hamilton_map(&QuadraticSymbol::harmonic(1).unwrap()).unwrap();
    assert_eq!(h.f[(0, 1)], c(1.0, 0.0));
    assert_eq!(h.f[(1, 0)], c(-1.0, 0.0));
    assert_eq!(h.f[(0, 0)], c(0.0, 0.0));
    assert_eq!(h.f[(1, 1)], c(0.0, 0.0));
}

#[test]
fn singular_space_examples() {
    let s = singular_space(&hamilton_map(&QuadraticSymbol::harmonic(1).unwrap()).unwrap(), 1e-10).unwrap();
    assert!(s.is_trivial() && s.k0 == Some(0));

    let kfp = hamilton_map(&QuadraticSymbol::kramers_fokker_planck(1.0).unwrap()).unwrap();
    let s = singular_space(&kfp, 1e-10).unwrap();
    assert!(s.is_trivial() && s.k0 == Some(1));
    let e = singular_space_exact(&kfp);
    assert_eq!((e.dim(), e.k0), (0, Some(1)));

    let lap = hamilton_map(&QuadraticSymbol::free_laplacian(1).unwrap()).unwrap();
    let s = singular_space(&lap, 1e-10).unwrap();
    assert_eq!(s.dim(), 1);
    assert!((s.basis[0][0].abs() - 1.0).abs() < 1e-12 && s.basis[0][1].abs() < 1e-12);
    assert_eq!(s.k0, None);
}

#[test]
fn weyl_examples() {
    let h: Galerkin64 = weyl_quantize(&QuadraticSymbol::harmonic(2).unwrap(), 4).unwrap();
    let basis = hermite_obs_core::hermite::Basis::get(2, 4);
    for (i, a) in basis.indices.iter().enumerate() {
        for j in 0..basis.len() {
            let want = if i == j { (2 * a.order() + 2) as f64 } else { 0.0 };
            assert!((h.matrix[(i, j)] - c(want, 0.0)).norm() < 1e-13);
        }
    }

    // q = xξ
    let xxi = QuadraticSymbol::from_parts(1, &[vec![0.0, 0.5], vec![0.5, 0.0]], &[], "x xi").unwrap();
    let m: Galerkin64 = weyl_quantize(&xxi, 3).unwrap();
    assert!((m.matrix[(2, 0)] - c(0.0, 2f64.sqrt() / 2.0)).norm() < 1e-15);
    assert!(m.matrix[(0, 0)].norm() < 1e-15);

    // q = x²
    let x2 = QuadraticSymbol::from_parts(1, &[vec![1.0, 0.0], vec![0.0, 0.0]], &[], "x^2").unwrap();
    let m: Galerkin64 = weyl_quantize(&x2, 3).unwrap();
    assert!((m.matrix[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
    assert!((m.matrix[(2, 0)] - c(2f64.sqrt() / 2.0, 0.0)).norm() < 1e-15);
}

#[test]
fn weyl_extended_precision_agrees() {
    let q = QuadraticSymbol::kramers_fokker_planck(1.0).unwrap();
    let a: Galerkin64 = weyl_quantize(&q, 6).unwrap();
    let b = with_precision(256, || {
        let m: GalerkinMp = weyl_quantize(&q, 6).unwrap();
        m.matrix.map(|z| c(z.re.to_f64(), z.im.to_f64()))
    });
    assert!(a.matrix.sub(&b).max_abs() < 1e-14);
}

#[test]
fn evolve_examples() {
    let a: Galerkin64 = weyl_quantize(&QuadraticSymbol::harmonic(1).unwrap(), 6).unwrap();
    let f0 = Expansion64::basis_vector(1, 6, &MultiIndex(vec![0]), c(1.0, 0.0)).unwrap();
    let e = evolve(&a, &f0, 0.5).unwrap();
    assert!((e.state.coeffs()[0].re - 0.6065306597126334).abs() < 1e-14);
    assert!((e.norm_ratio - (-0.5f64).exp()).abs() < 1e-14);
    let z = evolve(&a, &f0, 0.0).unwrap();
    assert_eq!(z.state, f0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hamilton_identity(q in (1usize..=3).prop_flat_map(symbol_strategy)) {
        let h = hamilton_map(&q).unwrap();
        prop_assert!(h.identity_defect <= 1e-12);
        let m = 2 * q.n;
        for i in 0..m {
            for j in 0..m {
                let ei: Vec<Complex64> = unit(m, i).into_iter().map(|v| c(v, 0.0)).collect();
                let ej = unit(m, j);
                let fej: Vec<Complex64> = (0..m).map(|k| h.f[(k, j)]).collect();
                let lhs = symplectic(q.n, &ei, &fej);
                let rhs = q.polar(&unit(m, i), &ej);
                prop_assert!((lhs - rhs).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn singular_space_scale_invariant(q in (1usize..=2).prop_flat_map(symbol_strategy), s in 0.1f64..10.0) {
        let a = singular_space(&hamilton_map(&q).unwrap(), 1e-10).unwrap();
        let b = singular_space(&hamilton_map(&q.scaled(s)).unwrap(), 1e-10).unwrap();
        prop_assume!(!a.tolerance_sensitive && !b.tolerance_sensitive);
        prop_assert_eq!(a.dim(), b.dim());
        prop_assert_eq!(a.k0, b.k0);
    }

    #[test]
    fn weyl_linear(q1 in symbol_strategy(1), q2 in symbol_strategy(1), cutoff in 0usize..=8) {
        let sum: Galerkin64 = weyl_quantize(&q1.add(&q2).unwrap(), cutoff).unwrap();
        let a: Galerkin64 = weyl_quantize(&q1, cutoff).unwrap();
        let b: Galerkin64 = weyl_quantize(&q2, cutoff).unwrap();
        let scale = sum.matrix.max_abs().max(1.0);
        prop_assert!(sum.matrix.sub(&a.matrix.add(&b.matrix)).max_abs() <= 1e-14 * scale);
    }

    #[test]
    fn weyl_adjoint(q in (1usize..=2).prop_flat_map(symbol_strategy), cutoff in 0usize..=5) {
        let a: Galerkin64 = weyl_quantize(&q, cutoff).unwrap();
        let b: Galerkin64 = weyl_quantize(&q.conjugate(), cutoff).unwrap();
        let scale = a.matrix.max_abs().max(1.0);
        prop_assert!(b.matrix.sub(&a.matrix.adjoint()).max_abs() <= 1e-14 * scale);
    }

    #[test]
    fn semigroup_property(q in symbol_strategy(1), cutoff in 1usize..=10, s in 0.0f64..2.0, t in 0.0f64..2.0, seed in prop::collection::vec(-1.0f64..1.0, 1..8)) {
        let a: Galerkin64 = weyl_quantize(&q, cutoff).unwrap();
        let f = ket(1, cutoff, &seed);
        prop_assume!(f.norm() > 1e-3);
        let whole = semigroup_matrix(&a.matrix, s + t).unwrap().matvec(f.coeffs());
        let split = semigroup_matrix(&a.matrix, s).unwrap().matvec(&semigroup_matrix(&a.matrix, t).unwrap().matvec(f.coeffs()));
        let diff: f64 = whole.iter().zip(&split).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(diff <= 1e-9 * f.norm());
    }

    #[test]
    fn accretive_evolution_contracts(q in symbol_strategy(1), cutoff in 1usize..=10, t in 0.0f64..3.0, seed in prop::collection::vec(-1.0f64..1.0, 1..8)) {
        let a: Galerkin64 = weyl_quantize(&q, cutoff).unwrap();
        let f = ket(1, cutoff, &seed);
        prop_assume!(f.norm() > 1e-3);
        let e = evolve(&a, &f, t).unwrap();
        prop_assert!(e.norm_ratio <= 1.0 + 1e-8);
    }
}
