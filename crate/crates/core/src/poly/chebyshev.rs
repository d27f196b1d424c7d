use serde::{Deserialize, Serialize};

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChebyshevKind {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChebyshevEval {
    pub degree: usize,
    pub kind: ChebyshevKind,
}

impl ChebyshevEval {
    pub fn eval<T: Real>(&self, x: &T) -> T {
        chebyshev_value(self.kind, self.degree, x)
    }
}

/// `T_d(x)` or `U_d(x)` by the three-term recurrence `P_{d+1} = 2xP_d − P_{d−1}`.
pub fn chebyshev_value<T: Real>(kind: ChebyshevKind, d: usize, x: &T) -> T {
    let two_x = T::two() * x.clone();
    let mut p0 = T::one();
    let mut p1 = match kind {
        ChebyshevKind::First => x.clone(),
        ChebyshevKind::Second => two_x.clone(),
    };
    if d == 0 {
        return p0;
    }
    for _ in 1..d {
        let p2 = two_x.clone() * p1.clone() - p0;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `T_d(x) = Σ_k C(d,2k) (x²−1)^k x^{d−2k}`, the explicit form used as a cross-check.
pub fn chebyshev_first_explicit(d: usize, x: f64) -> f64 {
    let mut s = 0.0;
    for k in 0..=d / 2 {
        s += binom_f64(d, 2 * k) * (x * x - 1.0).powi(k as i32) * x.powi((d - 2 * k) as i32);
    }
    s
}

/// `U_d(x) = Σ_k (−1)^k C(d−k,k) (2x)^{d−2k}`.
pub fn chebyshev_second_explicit(d: usize, x: f64) -> f64 {
    let mut s = 0.0;
    for k in 0..=d / 2 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * binom_f64(d - k, k) * (2.0 * x).powi((d - 2 * k) as i32);
    }
    s
}

fn binom_f64(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `ln T_d(x)` for `x ≥ 1`, stable for large degrees: `T_d(x) = cosh(d·acosh x)`.
pub fn ln_chebyshev_first_ge1(d: usize, x: f64) -> f64 {
    let a = d as f64 * x.acosh();
    if a < 20.0 {
        a.cosh().ln()
    } else {
        a - std::f64::consts::LN_2 + (-2.0 * a).exp().ln_1p()
    }
}
