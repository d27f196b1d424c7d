//! Matrix exponential by scaling and squaring with a degree-13 Padé
//! approximant. The scaling threshold adapts to the working precision so the
//! same code serves `f64` and [`crate::scalar::Mp`].

use super::lu::Lu;
use super::mat::Mat;
use crate::error::Result;
use crate::scalar::{Real, Scalar};
use num_traits::One;

const PADE_M: usize = 13;
const THETA_13_F64: f64 = 5.371_920_351_148_152;

/// Largest `‖A‖₁` for which the unscaled approximant is accurate at `bits`.
fn theta_for_bits(bits: u32) -> f64 {
    // Truncation error of the [13/13] approximant ≈ c·‖A‖^27 with
    // c = 13!² / (26!·27!).
    let ln_fact = |k: usize| (1..=k).map(|i| (i as f64).ln()).sum::<f64>();
    let ln_c = 2.0 * ln_fact(13) - ln_fact(26) - ln_fact(27);
    let ln_eps = -(bits as f64) * std::f64::consts::LN_2;
    ((ln_eps - ln_c) / 27.0).exp().min(THETA_13_F64)
}

fn pade_coefficients<T: Real>() -> Vec<T> {
    let m = PADE_M;
    let mut b = vec![T::one()];
    for k in 0..m {
        let next = b[k].clone() * T::from_usize(m - k) / (T::from_usize(2 * m - k) * T::from_usize(k + 1));
        b.push(next);
    }
    b
}

pub fn expm<E: Scalar>(a: &Mat<E>) -> Result<Mat<E>> {
    let n = a.rows();
    if n == 0 {
        return Ok(a.clone());
    }
    let norm = a.norm1().to_f64();
    let theta = theta_for_bits(E::Re::mantissa_bits());
    let s = if norm > theta { (norm / theta).log2().ceil() as u32 } else { 0 };
    let scale = E::Re::one() / E::Re::two().powi(s);
    let a = a.scale_re(&scale);
    let b: Vec<E::Re> = pade_coefficients();
    let id = Mat::<E>::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let lin = |terms: &[(&Mat<E>, &E::Re)]| {
        let mut acc = Mat::<E>::zeros(n, n);
        for (m, c) in terms {
            acc.add_assign_scaled(m, &E::from_re((*c).clone()));
        }
        acc
    };
    let u_inner = a6.matmul(&lin(&[(&a6, &b[13]), (&a4, &b[11]), (&a2, &b[9])]));
    let u_inner = u_inner.add(&lin(&[(&a6, &b[7]), (&a4, &b[5]), (&a2, &b[3]), (&id, &b[1])]));
    let u = a.matmul(&u_inner);
    let v = a6.matmul(&lin(&[(&a6, &b[12]), (&a4, &b[10]), (&a2, &b[8])]));
    let v = v.add(&lin(&[(&a6, &b[6]), (&a4, &b[4]), (&a2, &b[2]), (&id, &b[0])]));
    let p = v.add(&u);
    let q = v.sub(&u);
    let mut r = Lu::new(&q)?.solve_mat(&p);
    for _ in 0..s {
        r = r.matmul(&r);
    }
    Ok(r)
}
