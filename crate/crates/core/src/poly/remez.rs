use super::chebyshev::{chebyshev_value, ChebyshevKind};
use crate::error::{Error, Result};

/// `F(t) = (1 + (1−t)^{1/n}) / (1 − (1−t)^{1/n})`, decreasing on `(0, 1]`.
pub fn remez_f(n: usize, t: f64) -> f64 {
    let s = (1.0 - t).powf(1.0 / n as f64);
    (1.0 + s) / (1.0 - s)
}

/// `ln F(t)`, accurate also for tiny `t` where `1 − (1−t)^{1/n}` cancels.
pub fn ln_remez_f(n: usize, t: f64) -> f64 {
    // 1 − (1−t)^{1/n} = −expm1(ln(1−t)/n)
    let l = (-t).ln_1p() / n as f64;
    let denom = -l.exp_m1();
    let numer = 2.0 - denom;
    numer.ln() - denom.ln()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RemezBound {
    /// `T_d(F(t))`, for real polynomials.
    pub real: f64,
    /// `2^{2d+1} F(t)^d`, for complex polynomials.
    pub complex: f64,
}

/// Multi-dimensional Remez constants for a measure ratio `t = |E|/|K|`.
pub fn remez_bound(n: usize, d: usize, t: f64) -> Result<RemezBound> {
    if !(t > 0.0 && t < 1.0) || n == 0 {
        return Err(Error::domain(format!("ratio t = {t} must lie in (0, 1)")));
    }
    let f = remez_f(n, t);
    Ok(RemezBound {
        real: chebyshev_value(ChebyshevKind::First, d, &f),
        complex: 2f64.powi(2 * d as i32 + 1) * f.powi(d as i32),
    })
}

/// `(2^{2d+1}/√3)·√(4/ρ)·F(ρ/4)^d` with `ρ = |ω∩B|/|B|`.
pub fn remez_ball_bound(n: usize, d: usize, rho: f64) -> Result<f64> {
    Ok(ln_remez_ball_bound(n, d, rho)?.exp())
}

pub fn ln_remez_ball_bound(n: usize, d: usize, rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho <= 1.0) || n == 0 {
        return Err(Error::domain(format!("density ratio {rho} must lie in (0, 1]")));
    }
    Ok((2 * d + 1) as f64 * std::f64::consts::LN_2 - 0.5 * 3f64.ln() + 0.5 * (4.0 / rho).ln()
        + d as f64 * ln_remez_f(n, rho / 4.0))
}

/// `(C/|E|)^{ln M / ln 2}`.
pub fn kovrijkine_interval_bound(c_kov: f64, measure: f64, m: f64) -> Result<f64> {
    if m < 1.0 {
        return Err(Error::domain(format!("M = {m} must be at least 1")));
    }
    if !(measure > 0.0 && measure <= 1.0) {
        return Err(Error::domain(format!("|E| = {measure} must lie in (0, 1]")));
    }
    if c_kov <= 1.0 {
        return Err(Error::domain(format!("C = {c_kov} must exceed 1")));
    }
    Ok((m.ln() / std::f64::consts::LN_2 * (c_kov / measure).ln()).exp())
}
