use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::eval_hermite_1d;
use crate::linalg::adaptive_scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub k: usize,
    pub a: f64,
    /// `∫_{|x|≥a} φ_k²`
    pub exact: f64,
    pub bound: f64,
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// Tail mass of `φ_k²` outside `[−a, a]` next to `(2^{k+1}/(k!√π)) a^{2k−1} e^{−a²}`.
pub fn hermite_tail_bound(k: usize, a: f64) -> Result<TailBound> {
    let threshold = ((2 * k + 1) as f64).sqrt();
    if !(a >= threshold) {
        return Err(Error::domain(format!("a = {a} below √(2k+1) = {threshold}")));
    }
    let exact = if k == 0 {
        libm::erfc(a)
    } else {
        // φ_k² is even; past a + 40 it is below e^{−1600}.
        let (v, _) = adaptive_scalar(|x| eval_hermite_1d(k, &x).powi(2), a, a + 40.0, 5e-15);
        2.0 * v
    };
    let ln_bound = (k + 1) as f64 * std::f64::consts::LN_2 - ln_factorial(k)
        - 0.5 * std::f64::consts::PI.ln()
        + (2.0 * k as f64 - 1.0) * a.ln()
        - a * a;
    Ok(TailBound { k, a, exact, bound: ln_bound.exp() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailConstants {
    pub n: usize,
    pub c_n: f64,
    /// `(N, right side of the tail estimate at a = c_n√(N+1))`
    pub certificate: Vec<(usize, f64)>,
    /// Cutoff where the certificate is largest.
    pub worst_n: usize,
}

/// Right side of the `E_N` tail estimate,
/// `(2ⁿ n^{3/2}/√π)·(e^{−a²/(2n)}/a)·8^N`, as a logarithm.
pub fn ln_tail_rhs(n: usize, cutoff: usize, a: f64) -> f64 {
    let nf = n as f64;
    nf * std::f64::consts::LN_2 + 1.5 * nf.ln() - 0.5 * std::f64::consts::PI.ln() - a * a / (2.0 * nf) - a.ln()
        + cutoff as f64 * 8f64.ln()
}

pub const CERTIFICATE_LEN: usize = 65;

/// Smallest `c ≥ √(2n ln 8)` for which the tail estimate at `a = c√(N+1)`
/// is at most `¼` for every `N`. With `c² ≥ 2n ln 8` the factor
/// `8^N e^{−c²N/(2n)}` is nonincreasing, so `N = 0` decides.
pub fn tail_constant_cn(n: usize) -> Result<TailConstants> {
    if n == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    let target = 0.25f64.ln();
    let floor = (2.0 * n as f64 * 8f64.ln()).sqrt();
    let g = |c: f64| ln_tail_rhs(n, 0, c);
    let c_n = if g(floor) <= target {
        floor
    } else {
        let (mut lo, mut hi) = (floor, 2.0 * floor);
        while g(hi) > target {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        hi
    };
    let certificate: Vec<(usize, f64)> = (0..CERTIFICATE_LEN)
        .map(|cut| (cut, ln_tail_rhs(n, cut, c_n * ((cut + 1) as f64).sqrt()).exp()))
        .collect();
    let worst_n = certificate
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|e| e.0)
        .unwrap_or(0);
    Ok(TailConstants { n, c_n, certificate, worst_n })
}
