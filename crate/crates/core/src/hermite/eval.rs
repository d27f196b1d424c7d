use crate::scalar::Real;

/// `φ_0(x), …, φ_K(x)` by the weight-included normalized recurrence
/// `φ_{k+1} = x√(2/(k+1)) φ_k − √(k/(k+1)) φ_{k−1}`.
pub fn hermite_column<T: Real>(kmax: usize, x: &T) -> Vec<T> {
    let mut out = Vec::with_capacity(kmax + 1);
    let quarter_pi = T::pi().sqrt().sqrt();
    let phi0 = (-(x.clone() * x.clone()) * T::half()).exp() / quarter_pi;
    out.push(phi0);
    if kmax == 0 {
        return out;
    }
    let two = T::two();
    out.push(two.sqrt() * x.clone() * out[0].clone());
    for k in 1..kmax {
        let kp1 = T::from_usize(k + 1);
        let a = (two.clone() / kp1.clone()).sqrt() * x.clone() * out[k].clone();
        let b = (T::from_usize(k) / kp1).sqrt() * out[k - 1].clone();
        out.push(a - b);
    }
    out
}

/// `φ_k(x)`.
pub fn eval_hermite_1d<T: Real>(k: usize, x: &T) -> T {
    hermite_column(k, x).pop().expect("column is non-empty")
}

/// Values and derivatives `(φ_k(x), φ_k′(x))` for `k ≤ K`, using
/// `φ_k′ = (√k φ_{k−1} − √(k+1) φ_{k+1})/√2`.
pub fn hermite_column_with_derivative<T: Real>(kmax: usize, x: &T) -> (Vec<T>, Vec<T>) {
    let mut col = hermite_column(kmax + 1, x);
    let inv_sqrt2 = T::one() / T::two().sqrt();
    let der = (0..=kmax)
        .map(|k| {
            let up = T::from_usize(k + 1).sqrt() * col[k + 1].clone();
            let down = if k == 0 { T::zero() } else { T::from_usize(k).sqrt() * col[k - 1].clone() };
            (down - up) * inv_sqrt2.clone()
        })
        .collect();
    col.truncate(kmax + 1);
    (col, der)
}
