//! Bernstein-type and Gaussian-weighted estimates on `E_N`, with left sides
//! computed exactly on coefficients through the ladder algebra.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{apply_ladder, HermiteExpansion, LadderKind, LadderMap, MultiIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernsteinCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// Applies `∏_j L_j^{β_j}` for a single-axis ladder family, growing the cutoff by one per step.
fn apply_power(f: &HermiteExpansion<f64>, beta: &MultiIndex, kind: fn(usize) -> LadderKind) -> Result<HermiteExpansion<f64>> {
    if beta.dim() != f.dim() {
        return Err(Error::contract(format!("multi-index of dimension {} for an expansion in dimension {}", beta.dim(), f.dim())));
    }
    let mut g = f.clone();
    for j in 0..beta.dim() {
        for _ in 0..beta.get(j) {
            g = apply_ladder(&LadderMap::new(kind(j), g.cutoff()), &g)?;
        }
    }
    Ok(g)
}

/// `∂^β f`, exact in `E_{N+|β|}`.
pub fn derivative(f: &HermiteExpansion<f64>, beta: &MultiIndex) -> Result<HermiteExpansion<f64>> {
    apply_power(f, beta, LadderKind::Derivative)
}

/// `x^β f`, exact in `E_{N+|β|}`.
pub fn monomial(f: &HermiteExpansion<f64>, beta: &MultiIndex) -> Result<HermiteExpansion<f64>> {
    apply_power(f, beta, LadderKind::Position)
}

/// `ln` of `e^{e/(2δ²)}(2δ)^{|β|}|β|! e^{√N/δ}`.
pub fn ln_bernstein_factor(delta: f64, order: usize, cutoff: usize) -> f64 {
    std::f64::consts::E / (2.0 * delta * delta) + order as f64 * (2.0 * delta).ln() + ln_factorial(order)
        + (cutoff as f64).sqrt() / delta
}

pub fn bernstein_check(f: &HermiteExpansion<f64>, delta: f64, beta: &MultiIndex) -> Result<BernsteinCheck> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::domain(format!("δ = {delta} must lie in (0, 1]")));
    }
    let norm = f.norm();
    if norm == 0.0 {
        return Err(Error::domain("expansion must be nonzero"));
    }
    let lhs = derivative(f, beta)?.norm();
    let rhs = (ln_bernstein_factor(delta, beta.order(), f.cutoff()) + norm.ln()).exp();
    Ok(BernsteinCheck { lhs, rhs, pass: lhs <= rhs })
}

/// `‖e^{δ|x|²} h‖` enclosed by a truncated power series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedNorm {
    /// `‖Σ_{k≤K} δ^k|x|^{2k}/k! h‖`
    pub partial: f64,
    /// Certified bound on the norm of the discarded terms.
    pub tail: f64,
    pub terms: usize,
    pub certified: bool,
}

impl WeightedNorm {
    pub fn upper(&self) -> f64 {
        self.partial + self.tail
    }

    pub fn lower(&self) -> f64 {
        (self.partial - self.tail).max(0.0)
    }
}

pub const WEIGHTED_REL_TOL: f64 = 1e-8;
const MAX_SERIES_TERMS: usize = 400;

/// Upper bound for `ln Σ_{|α|=k} ‖δ^k x^{2α}/α! h‖` with `h ∈ E_M`, from
/// `‖x^γ h‖ ≤ 2^{|γ|/2}√((M+|γ|)!/M!)‖h‖` and `Σ_{|α|=k} 1/α! = n^k/k!`.
fn ln_term_bound(n: usize, delta: f64, m: usize, k: usize, ln_norm: f64) -> f64 {
    k as f64 * (2.0 * n as f64 * delta).ln() + 0.5 * (ln_factorial(m + 2 * k) - ln_factorial(m)) - ln_factorial(k)
        + ln_norm
}

/// Series evaluation of `‖e^{δ|x|²} h‖`. Terms are added until the certified
/// remainder falls below `rel_tol` of the partial sum.
pub fn weighted_norm(h: &HermiteExpansion<f64>, delta: f64, rel_tol: f64) -> Result<WeightedNorm> {
    let n = h.dim();
    let m = h.cutoff();
    let hn = h.norm();
    if hn == 0.0 {
        return Ok(WeightedNorm { partial: 0.0, tail: 0.0, terms: 0, certified: true });
    }
    let ln_hn = hn.ln();
    let mut sum = h.clone();
    let mut term = h.clone();
    let mut k = 0usize;
    loop {
        // Remainder after term k: t_{k+1}/(1 − ρ) with ρ = 2nδ(2 + M/(k+2)) bounding later ratios.
        let rho = 2.0 * n as f64 * delta * (2.0 + m as f64 / (k + 2) as f64);
        let tail = if rho < 1.0 {
            (ln_term_bound(n, delta, m, k + 1, ln_hn) - (1.0 - rho).ln()).exp()
        } else {
            f64::INFINITY
        };
        let partial = sum.norm();
        if tail <= rel_tol * partial {
            return Ok(WeightedNorm { partial, tail, terms: k + 1, certified: true });
        }
        if k + 1 >= MAX_SERIES_TERMS {
            return Ok(WeightedNorm { partial, tail, terms: k + 1, certified: false });
        }
        k += 1;
        term = times_norm_sqr(&term)?.scale(&Complex::new(delta / k as f64, 0.0));
        sum = sum.with_cutoff(term.cutoff()).add(&term)?;
    }
}

/// `|x|² g` in `E_{N+2}`.
fn times_norm_sqr(g: &HermiteExpansion<f64>) -> Result<HermiteExpansion<f64>> {
    let n = g.dim();
    let mut acc = HermiteExpansion::zeros(n, g.cutoff() + 2);
    for j in 0..n {
        let once = apply_ladder(&LadderMap::new(LadderKind::Position(j), g.cutoff()), g)?;
        let twice = apply_ladder(&LadderMap::new(LadderKind::Position(j), once.cutoff()), &once)?;
        acc = acc.add(&twice)?;
    }
    Ok(acc)
}

/// Coefficients of `ĝ/(2π)^{n/2}`: `c_α ↦ (−i)^{|α|} c_α`.
pub fn fourier_coefficients(g: &HermiteExpansion<f64>) -> HermiteExpansion<f64> {
    let basis = g.basis();
    let coeffs = g
        .coeffs()
        .iter()
        .zip(&basis.indices)
        .map(|(c, alpha)| {
            let phase = match alpha.order() % 4 {
                0 => Complex::new(1.0, 0.0),
                1 => Complex::new(0.0, -1.0),
                2 => Complex::new(-1.0, 0.0),
                _ => Complex::new(0.0, 1.0),
            };
            c * phase
        })
        .collect();
    HermiteExpansion::new(g.dim(), g.cutoff(), coeffs).expect("same basis")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedCheck {
    pub lhs_x: WeightedNorm,
    pub lhs_xi: WeightedNorm,
    pub rhs: f64,
    pub verdict: Verdict,
}

/// `ln` of `(2ⁿ/(1−32nδ)) 2^{N/2} 2^{3|β|/2} √|β|!`.
pub fn ln_weighted_factor(n: usize, delta: f64, order: usize, cutoff: usize) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    n as f64 * ln2 - (1.0 - 32.0 * n as f64 * delta).ln() + 0.5 * cutoff as f64 * ln2 + 1.5 * order as f64 * ln2
        + 0.5 * ln_factorial(order)
}

/// `‖e^{δ|x|²}∂^βf‖ + ‖e^{δ|D|²}x^βf‖` against its Gaussian-weighted bound.
pub fn weighted_check(f: &HermiteExpansion<f64>, delta: f64, beta: &MultiIndex) -> Result<WeightedCheck> {
    let n = f.dim();
    let limit = 1.0 / (32.0 * n as f64);
    if !(delta > 0.0 && delta < limit) {
        return Err(Error::domain(format!("δ = {delta} must lie in (0, {limit})")));
    }
    let norm = f.norm();
    if norm == 0.0 {
        return Err(Error::domain("expansion must be nonzero"));
    }
    let lhs_x = weighted_norm(&derivative(f, beta)?, delta, WEIGHTED_REL_TOL)?;
    let lhs_xi = weighted_norm(&fourier_coefficients(&monomial(f, beta)?), delta, WEIGHTED_REL_TOL)?;
    let rhs = (ln_weighted_factor(n, delta, beta.order(), f.cutoff()) + norm.ln()).exp();
    let verdict = if !(lhs_x.certified && lhs_xi.certified) {
        Verdict::Inconclusive
    } else if lhs_x.upper() + lhs_xi.upper() <= rhs {
        Verdict::Pass
    } else if lhs_x.lower() + lhs_xi.lower() > rhs {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    Ok(WeightedCheck { lhs_x, lhs_xi, rhs, verdict })
}
