use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::gramian::time_gramian;
use super::hum::{drive, hermitian_form, ControlResult, GramianDiagnostics};
use super::{hpd_solve, lift, lower, vec_norm, ControlProblem, ControlReal};
use crate::error::{Error, Result};
use crate::hermite::{space_dim, HermiteExpansion};
use crate::linalg::hermitian_extremes;
use crate::quadratic::semigroup_at;
use crate::scalar::{with_precision, Mp};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StaircaseOptions {
    /// `k_j = ⌈K₀·2^j⌉`.
    pub k_base: f64,
    /// Stop once `‖f‖/‖f0‖` falls below this.
    pub target: f64,
    pub max_stages: usize,
}

impl Default for StaircaseOptions {
    fn default() -> Self {
        StaircaseOptions { k_base: 2.0, target: 1e-6, max_stages: 24 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: usize,
    pub k_j: usize,
    /// Start of the dyadic interval.
    pub start: f64,
    /// Length of the active (controlled) half.
    pub active: f64,
    pub stage_cost: f64,
    /// `‖f‖/‖f0‖` at the end of the passive half.
    pub energy_after: f64,
    /// `λ_min(π_k Πω π_k)^{-1/2}`, the spectral constant on `E_{k_j}`.
    pub spectral_constant: f64,
}

fn attempt<T: ControlReal>(p: &ControlProblem, f0: &[Complex<f64>], opts: &StaircaseOptions) -> Result<(ControlResult, bool)> {
    let (n, cut) = (p.n(), p.cutoff);
    let (a, pi) = p.operators::<T>()?;
    let pi2 = pi.matmul(&pi);
    let f0n: f64 = f0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut f = lift::<T>(f0);
    let mut start = T::zero();
    let horizon = T::from_f64(p.horizon);
    let mut stages = Vec::new();
    let mut gramians = Vec::new();
    let mut times = Vec::new();
    let mut controls = Vec::new();
    let (mut cost, mut cost_q) = (0.0, 0.0);
    let mut aborted_at = None;
    let mut all_ok = true;
    let energy = |v: &[Complex<T>]| if f0n > 0.0 { vec_norm(v).to_f64() / f0n } else { 0.0 };
    if f0n > 0.0 {
        for j in 0..opts.max_stages {
            let len = horizon.clone() / T::from_f64(2f64.powi(j as i32 + 1));
            let tau = len.clone() * T::half();
            let k = ((opts.k_base * 2f64.powi(j as i32)).ceil() as usize).min(cut);
            let m = space_dim(n, k);
            let g = time_gramian(&a, &pi2, tau.to_f64(), p.quad_tol)?;
            let free = semigroup_at(&a, &tau)?.matvec(&f);
            let rhs: Vec<Complex<T>> = free[..m].iter().map(|z| -z.clone()).collect();
            let sub = g.w.leading(m);
            let solve = hpd_solve(&sub, &rhs);
            gramians.push(GramianDiagnostics::new(&g, &solve));
            if solve.lambda_min <= T::zero() {
                aborted_at = Some(j);
                all_ok = false;
                break;
            }
            all_ok &= solve.well_posed;
            let mut lam = solve.x.clone();
            lam.resize(f.len(), Complex::new(T::zero(), T::zero()));
            let d = drive(&g.grid, &pi, &lam);
            let after: Vec<Complex<T>> = free.iter().zip(&d.reach).map(|(x, y)| x.clone() + y.clone()).collect();
            f = semigroup_at(&a, &(len.clone() - tau.clone()))?.matvec(&after);
            let stage_cost = hermitian_form(&sub, &solve.x).to_f64().max(0.0);
            cost += stage_cost;
            cost_q += d.cost.to_f64();
            for (s, u) in &d.samples {
                times.push((start.clone() + tau.clone() - s.clone()).to_f64());
                controls.push(HermiteExpansion::new(n, cut, lower(u))?);
            }
            let (lo, _) = hermitian_extremes(&pi.leading(m));
            let spectral_constant = if lo > T::zero() { (-0.5 * lo.ln_abs_f64()).exp() } else { f64::INFINITY };
            let e = energy(&f);
            stages.push(StageRecord {
                stage: j,
                k_j: k,
                start: start.to_f64(),
                active: tau.to_f64(),
                stage_cost,
                energy_after: e,
                spectral_constant,
            });
            start += len;
            if e < opts.target || k >= cut {
                break;
            }
        }
    }
    // Free evolution on whatever is left of [0, T].
    let rest = horizon - start;
    if rest > T::zero() {
        f = semigroup_at(&a, &rest)?.matvec(&f);
    }
    let residual = energy(&f);
    Ok((
        ControlResult {
            method: "lr_staircase".into(),
            times,
            controls,
            cost,
            cost_quadrature: cost_q,
            residual,
            final_state: HermiteExpansion::new(n, cut, lower(&f))?,
            gramians,
            partial: !all_ok,
            stages,
            aborted_at,
        },
        all_ok,
    ))
}

/// Lebeau-Robbiano staircase: on the dyadic interval `[T(1−2^{−j}), T(1−2^{−j−1})]`
/// the first half steers `π_{k_j} f` to zero with the reachability Gramian
/// restricted to `E_{k_j}` and the second half lets the semigroup damp the
/// modes above `k_j`.
pub fn lr_staircase(p: &ControlProblem, f0: &HermiteExpansion<f64>, opts: &StaircaseOptions) -> Result<ControlResult> {
    p.validate()?;
    p.check_datum(f0)?;
    if !(opts.k_base > 0.0 && opts.target > 0.0 && opts.max_stages > 0) {
        return Err(Error::domain("staircase needs K₀ > 0, a positive target and at least one stage"));
    }
    let mut last = None;
    for bits in p.schedule() {
        let (res, ok) = match bits {
            None => attempt::<f64>(p, f0.coeffs(), opts)?,
            Some(b) => with_precision(b, || attempt::<Mp>(p, f0.coeffs(), opts))?,
        };
        if ok {
            return Ok(res);
        }
        last = Some(res);
    }
    Ok(last.expect("schedule is never empty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::MultiIndex;
    use crate::quadratic::QuadraticSymbol;
    use crate::regions::full_space;

    #[test]
    fn single_mode_one_stage() {
        let p = ControlProblem::new(QuadraticSymbol::harmonic(1).unwrap(), full_space(1, 40.0).unwrap(), 6, 1.0).unwrap();
        let f0 = HermiteExpansion::basis_vector(1, 6, &MultiIndex(vec![0]), Complex::new(1.0, 0.0)).unwrap();
        let r = lr_staircase(&p, &f0, &StaircaseOptions::default()).unwrap();
        assert_eq!(r.stages.len(), 1);
        assert!(r.residual <= 1e-10, "{}", r.residual);
    }
}
