use num_complex::Complex;
use num_traits::Zero;

use super::expansion::HermiteExpansion;
use super::multiindex::Basis;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LadderKind {
    /// `a_{j,+}`
    Raise(usize),
    /// `a_{j,−}`
    Lower(usize),
    /// `x_j = (a_{j,+} + a_{j,−})/√2`
    Position(usize),
    /// `∂_{x_j} = (a_{j,−} − a_{j,+})/√2`
    Derivative(usize),
}

impl LadderKind {
    pub fn axis(&self) -> usize {
        match *self {
            LadderKind::Raise(j) | LadderKind::Lower(j) | LadderKind::Position(j) | LadderKind::Derivative(j) => j,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LadderMap {
    pub kind: LadderKind,
    pub source: usize,
    pub target: usize,
}

impl LadderMap {
    /// Default target: `N+1` for maps that raise degree, `N−1` (floored at 0) for lowering.
    pub fn new(kind: LadderKind, source: usize) -> Self {
        let target = match kind {
            LadderKind::Lower(_) => source.saturating_sub(1),
            _ => source + 1,
        };
        LadderMap { kind, source, target }
    }

    pub fn with_target(kind: LadderKind, source: usize, target: usize) -> Result<Self> {
        let min_target = match kind {
            LadderKind::Lower(_) => source.saturating_sub(1),
            _ => source + 1,
        };
        if target < min_target {
            return Err(Error::contract(format!("target cutoff {target} below the exact range {min_target}")));
        }
        Ok(LadderMap { kind, source, target })
    }

    fn coefficients<T: Real>(&self) -> (Complex<T>, Complex<T>) {
        let s = T::one() / T::two().sqrt();
        let one = Complex::new(T::one(), T::zero());
        match self.kind {
            LadderKind::Raise(_) => (one, Complex::zero()),
            LadderKind::Lower(_) => (Complex::zero(), one),
            LadderKind::Position(_) => (Complex::new(s.clone(), T::zero()), Complex::new(s, T::zero())),
            LadderKind::Derivative(_) => (Complex::new(-s.clone(), T::zero()), Complex::new(s, T::zero())),
        }
    }
}

/// `(c₊ a_{j,+} + c₋ a_{j,−}) f` written into `E_target`.
/// Requires `target ≥ N+1` whenever `c₊ ≠ 0` for the result to be exact.
pub fn apply_linear<T: Real>(
    f: &HermiteExpansion<T>,
    j: usize,
    c_plus: &Complex<T>,
    c_minus: &Complex<T>,
    target: usize,
) -> Result<HermiteExpansion<T>> {
    let n = f.dim();
    if j >= n {
        return Err(Error::contract(format!("axis {j} out of range for dimension {n}")));
    }
    let src = f.basis();
    let dst = Basis::get(n, target);
    let mut out = vec![Complex::<T>::zero(); dst.len()];
    let sqrt_cache: Vec<T> = (0..=f.cutoff() + 2).map(T::from_usize).map(|v| v.sqrt()).collect();
    for (alpha, c) in src.indices.iter().zip(f.coeffs()) {
        if c.is_zero() {
            continue;
        }
        let k = alpha.get(j) as usize;
        if !c_plus.is_zero() {
            // a_+ Φ_α = √(α_j+1) Φ_{α+e_j}
            let beta = alpha.shifted(j, true).expect("raise is total");
            if let Some(p) = dst.position(&beta) {
                out[p] += c.clone() * c_plus.clone() * Complex::new(sqrt_cache[k + 1].clone(), T::zero());
            }
        }
        if !c_minus.is_zero() && k > 0 {
            // a_− Φ_α = √α_j Φ_{α−e_j}
            let beta = alpha.shifted(j, false).expect("k > 0");
            if let Some(p) = dst.position(&beta) {
                out[p] += c.clone() * c_minus.clone() * Complex::new(sqrt_cache[k].clone(), T::zero());
            }
        }
    }
    HermiteExpansion::new(n, target, out)
}

pub fn apply_ladder<T: Real>(m: &LadderMap, f: &HermiteExpansion<T>) -> Result<HermiteExpansion<T>> {
    if f.cutoff() != m.source {
        return Err(Error::contract(format!(
            "ladder map expects cutoff {}, expansion has {}",
            m.source,
            f.cutoff()
        )));
    }
    let (cp, cm) = m.coefficients::<T>();
    apply_linear(f, m.kind.axis(), &cp, &cm, m.target)
}

/// `(−Δ + |x|²) f` composed from ladder maps on the buffered cutoff `N+2`,
/// truncated back to `E_N`.
pub fn harmonic_oscillator<T: Real>(f: &HermiteExpansion<T>) -> Result<HermiteExpansion<T>> {
    let n = f.dim();
    let big = f.cutoff() + 2;
    let mut acc = HermiteExpansion::<T>::zeros(n, big);
    for j in 0..n {
        let x1 = apply_ladder(&LadderMap::new(LadderKind::Position(j), f.cutoff()), f)?;
        let x2 = apply_ladder(&LadderMap::new(LadderKind::Position(j), f.cutoff() + 1), &x1)?;
        let d1 = apply_ladder(&LadderMap::new(LadderKind::Derivative(j), f.cutoff()), f)?;
        let d2 = apply_ladder(&LadderMap::new(LadderKind::Derivative(j), f.cutoff() + 1), &d1)?;
        acc = acc.add(&x2)?.sub(&d2)?;
    }
    Ok(acc.with_cutoff(f.cutoff()))
}
