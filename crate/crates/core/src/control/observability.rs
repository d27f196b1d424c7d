use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::gramian::time_gramian;
use super::{lower, solve_upper_adjoint, vec_norm, ControlProblem, ControlReal};
use crate::error::Result;
use crate::gram::spectral::RESOLUTION_FACTOR;
use crate::hermite::{ExpansionRecord, HermiteExpansion};
use crate::linalg::eigen::eigenvector_for;
use crate::linalg::{cholesky, hermitian_extremes, solve_lower, Mat};
use crate::quadratic::semigroup_at;
use crate::scalar::{with_precision, Mp, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservabilityStatus {
    Resolved,
    /// `W` was numerically singular at the largest precision; `c_t` is a
    /// lower bound from Rayleigh probes.
    LowerBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservabilityReport {
    #[serde(rename = "T")]
    pub horizon: f64,
    /// Smallest `C` with `‖g(T)‖² ≤ C ∫_0^T ⟨Πω g(t), g(t)⟩ dt` on `E_N`.
    pub c_t: f64,
    pub ln_c_t: f64,
    /// Unit-norm `g0` attaining (or probing) the constant.
    pub extremal: ExpansionRecord,
    pub method: String,
    pub status: ObservabilityStatus,
    pub precision_bits: u32,
    pub gramian_lambda_min: f64,
    pub gramian_lambda_max: f64,
    pub subintervals: usize,
    pub stagnation: f64,
}

/// `(‖Pᴴg‖², gᴴWg)` for the adjoint flow started at `g`.
fn rayleigh_parts<T: Real>(p: &Mat<Complex<T>>, w: &Mat<Complex<T>>, g: &[Complex<T>]) -> (T, T) {
    let end = p.adjoint().matvec(g);
    let num = vec_norm(&end);
    let wg = w.matvec(g);
    let den: T = g.iter().zip(&wg).fold(T::zero(), |acc, (x, y)| acc + (x.conj() * y.clone()).re);
    (num.clone() * num, den)
}

fn attempt<T: ControlReal>(p: &ControlProblem) -> Result<(ObservabilityReport, bool)> {
    let (a, pi) = p.operators::<T>()?;
    let g = time_gramian(&a, &pi, p.horizon, p.quad_tol)?;
    let w = g.w.hermitian_part();
    let (lo, hi) = hermitian_extremes(&w);
    // e^{−TA} = E*, with E = e^{−TA*} the adjoint propagator.
    let prop = semigroup_at(&a, &T::from_f64(p.horizon))?;
    let resolved = lo > T::from_f64(RESOLUTION_FACTOR) * T::epsilon() * hi.clone().abs();
    let bits = T::mantissa_bits();
    let record = |g0: &[Complex<T>], c: &T, method: &str, status| -> Result<ObservabilityReport> {
        Ok(ObservabilityReport {
            horizon: p.horizon,
            c_t: c.to_f64(),
            ln_c_t: c.ln_abs_f64(),
            extremal: HermiteExpansion::new(p.n(), p.cutoff, lower(g0))?.to_record(),
            method: method.into(),
            status,
            precision_bits: bits,
            gramian_lambda_min: lo.to_f64(),
            gramian_lambda_max: hi.to_f64(),
            subintervals: g.grid.subintervals,
            stagnation: g.stagnation,
        })
    };
    if resolved {
        if let Ok(l) = cholesky(&w) {
            // C_T = λ_max(L⁻¹ E*E L⁻ᴴ), the pencil (E*E, W) in Cholesky form.
            let m = solve_lower(&l, &prop);
            let k = m.matmul(&m.adjoint()).hermitian_part();
            let (_, c) = hermitian_extremes(&k);
            let y = eigenvector_for(&k, &c)?;
            let mut g0 = solve_upper_adjoint(&l, &y);
            let nrm = vec_norm(&g0);
            g0.iter_mut().for_each(|z| *z = z.clone() / Complex::new(nrm.clone(), T::zero()));
            return Ok((record(&g0, &c, "generalized_eigen", ObservabilityStatus::Resolved)?, true));
        }
    }
    // The computed form is within `noise` of the true one, so each probe's
    // quotient with an inflated denominator bounds C_T from below.
    let diag_max = (0..w.rows()).map(|i| w[(i, i)].re.clone()).fold(T::zero(), T::max_of);
    let noise = T::from_f64(RESOLUTION_FACTOR) * T::epsilon() * hi.clone().abs() + T::from_f64(g.stagnation) * diag_max;
    let mut probes: Vec<Vec<Complex<T>>> = Vec::new();
    if let Ok(v) = eigenvector_for(&w, &lo) {
        probes.push(v);
    }
    let dim = w.rows();
    for k in (0..dim).rev().take(4) {
        probes.push((0..dim).map(|i| Complex::new(if i == k { T::one() } else { T::zero() }, T::zero())).collect());
    }
    let mut best = T::zero();
    let mut arg = probes[probes.len() - 1].clone();
    for v in probes {
        let (num, den) = rayleigh_parts(&prop, &w, &v);
        let q = num / (den.max_of(T::zero()) + noise.clone());
        if q > best {
            best = q;
            arg = v;
        }
    }
    Ok((record(&arg, &best, "rayleigh_lower_bound", ObservabilityStatus::LowerBound)?, false))
}

/// `C_T` as the largest generalized eigenvalue of `(E*E, W)` with
/// `W = ∫_0^T e^{−tA}Πω e^{−tA*}dt`, escalating precision while `W` is not
/// resolved.
pub fn observability_constant(p: &ControlProblem) -> Result<ObservabilityReport> {
    p.validate()?;
    let mut last = None;
    for bits in p.schedule() {
        let (rep, ok) = match bits {
            None => attempt::<f64>(p)?,
            Some(b) => with_precision(b, || attempt::<Mp>(p))?,
        };
        if ok {
            return Ok(rep);
        }
        last = Some(rep);
    }
    Ok(last.expect("schedule is never empty"))
}

/// Rayleigh quotient `‖g(T)‖² / ∫⟨Πω g, g⟩` of one adjoint datum (in `f64`).
pub fn rayleigh_quotient(p: &ControlProblem, g0: &[Complex<f64>]) -> Result<f64> {
    let (a, pi) = p.operators::<f64>()?;
    let g = time_gramian(&a, &pi, p.horizon, p.quad_tol)?;
    let prop = semigroup_at(&a, &p.horizon)?;
    let (num, den) = rayleigh_parts(&prop, &g.w, g0);
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::QuadraticSymbol;
    use crate::regions::{full_space, make_periodic_thick};

    fn closed_form(cutoff: usize, n: usize, t: f64) -> f64 {
        (0..=cutoff)
            .map(|k| {
                let l = (2 * k + n) as f64;
                (-2.0 * l * t).exp() * 2.0 * l / (1.0 - (-2.0 * l * t).exp())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn whole_line_matches_modes() {
        let p = ControlProblem::new(QuadraticSymbol::harmonic(1).unwrap(), full_space(1, 40.0).unwrap(), 8, 1.0).unwrap();
        let r = observability_constant(&p).unwrap();
        let want = closed_form(8, 1, 1.0);
        assert!((r.c_t - want).abs() < 1e-6 * want, "{} vs {want}", r.c_t);
        assert_eq!(r.status, ObservabilityStatus::Resolved);
        assert!((r.extremal.coeffs[0][0].hypot(r.extremal.coeffs[0][1]) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn thick_constant_dominates_probes_and_decreases() {
        let region = make_periodic_thick(1, 1.0, 0.6, 40.0).unwrap();
        let p = ControlProblem::new(QuadraticSymbol::harmonic(1).unwrap(), region, 12, 1.0).unwrap();
        let r = observability_constant(&p).unwrap();
        assert!(r.c_t.is_finite() && r.c_t > 0.0);
        let dim = 13;
        for s in 0..20u64 {
            let g0: Vec<Complex<f64>> = (0..dim)
                .map(|i| {
                    let x = ((s * 31 + i as u64 * 17) % 23) as f64 / 23.0 - 0.5;
                    Complex::new(x, ((s + i as u64) % 5) as f64 / 5.0 - 0.4)
                })
                .collect();
            assert!(rayleigh_quotient(&p, &g0).unwrap() <= r.c_t * (1.0 + 1e-8));
        }
        let longer = observability_constant(&p.with_horizon(2.0)).unwrap();
        assert!(longer.c_t <= r.c_t * (1.0 + 1e-8));
    }
}
