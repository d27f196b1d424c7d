use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::gramian::{time_gramian, TimeGramian, TimeGrid, GAUSS_POINTS};
use super::staircase::StageRecord;
use super::{hpd_solve, lift, lower, vec_norm, ControlProblem, ControlReal, HpdSolve};
use crate::error::Result;
use crate::hermite::{ExpansionRecord, HermiteExpansion};
use crate::linalg::Mat;
use crate::quadratic::semigroup_at;
use crate::scalar::{with_precision, Mp, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramianDiagnostics {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `λ_max / λ_min` (infinite when `λ_min ≤ 0`).
    pub condition: f64,
    pub subintervals: usize,
    pub stagnation: f64,
    pub converged: bool,
    pub precision_bits: u32,
    /// Solved by Cholesky at a precision that resolves `λ_min`.
    pub well_posed: bool,
}

impl GramianDiagnostics {
    pub(crate) fn new<T: Real>(g: &TimeGramian<T>, s: &HpdSolve<T>) -> Self {
        let (lo, hi) = (s.lambda_min.to_f64(), s.lambda_max.to_f64());
        let condition = if s.lambda_min > T::zero() { (s.lambda_max.ln_abs_f64() - s.lambda_min.ln_abs_f64()).exp() } else { f64::INFINITY };
        GramianDiagnostics {
            lambda_min: lo,
            lambda_max: hi,
            condition,
            subintervals: g.grid.subintervals,
            stagnation: g.stagnation,
            converged: g.converged,
            precision_bits: T::mantissa_bits(),
            well_posed: s.well_posed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ControlResult {
    pub method: String,
    /// Sample times in increasing order.
    pub times: Vec<f64>,
    /// `u(t_i)` at the quadrature nodes.
    pub controls: Vec<HermiteExpansion<f64>>,
    /// `∫‖u‖²` from the Gramian form.
    pub cost: f64,
    /// `Σ w_i ‖u(t_i)‖²` on the time grid.
    pub cost_quadrature: f64,
    /// `‖f(T)‖ / ‖f0‖` from re-simulating the forced system.
    pub residual: f64,
    pub final_state: HermiteExpansion<f64>,
    pub gramians: Vec<GramianDiagnostics>,
    /// The Gramian stayed unresolved at the largest precision.
    pub partial: bool,
    pub stages: Vec<StageRecord>,
    pub aborted_at: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlSample {
    pub t: f64,
    pub u: ExpansionRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlReport {
    pub method: String,
    pub cost: f64,
    pub cost_quadrature: f64,
    pub residual: f64,
    pub partial: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aborted_at: Option<usize>,
    pub gramians: Vec<GramianDiagnostics>,
    pub stages: Vec<StageRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<ControlSample>>,
}

impl ControlResult {
    pub fn report(&self, with_trajectory: bool) -> ControlReport {
        ControlReport {
            method: self.method.clone(),
            cost: self.cost,
            cost_quadrature: self.cost_quadrature,
            residual: self.residual,
            partial: self.partial,
            aborted_at: self.aborted_at,
            gramians: self.gramians.clone(),
            stages: self.stages.clone(),
            trajectory: with_trajectory.then(|| {
                self.times
                    .iter()
                    .zip(&self.controls)
                    .map(|(t, u)| ControlSample { t: *t, u: u.to_record() })
                    .collect()
            }),
        }
    }
}

/// Effect of the control `u(t) = Πω e^{−(τ−t)A*}λ` over a window of length
/// `τ`, evaluated node by node on the grid.
pub(crate) struct Drive<T: Real> {
    /// `∫_0^τ e^{−(τ−t)A} Πω u(t) dt`.
    pub reach: Vec<Complex<T>>,
    /// `(τ − t, u(t))` in increasing `t`.
    pub samples: Vec<(T, Vec<Complex<T>>)>,
    pub cost: T,
}

pub(crate) fn drive<T: Real>(grid: &TimeGrid<T>, pi: &Mat<Complex<T>>, lam: &[Complex<T>]) -> Drive<T> {
    let dim = lam.len();
    let zero = || vec![Complex::new(T::zero(), T::zero()); dim];
    let parts = grid.map_subintervals(|j| {
        let mut reach = zero();
        let mut cost = T::zero();
        let mut samples = Vec::with_capacity(GAUSS_POINTS);
        for i in 0..GAUSS_POINTS {
            let x = grid.propagator(j, i);
            let u = pi.matvec(&x.adjoint().matvec(lam));
            let push = x.matvec(&pi.matvec(&u));
            let w = grid.weight(i).clone();
            for (r, v) in reach.iter_mut().zip(&push) {
                *r += v.clone() * Complex::new(w.clone(), T::zero());
            }
            let un = vec_norm(&u);
            cost += w * un.clone() * un;
            samples.push((grid.time(j, i), u));
        }
        (reach, cost, samples)
    });
    let mut reach = zero();
    let mut cost = T::zero();
    let mut samples = Vec::with_capacity(grid.len());
    for (r, c, s) in parts {
        for (acc, v) in reach.iter_mut().zip(r) {
            *acc += v;
        }
        cost += c;
        samples.extend(s);
    }
    samples.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    Drive { reach, samples, cost }
}

pub(crate) fn hermitian_form<T: Real>(w: &Mat<Complex<T>>, x: &[Complex<T>]) -> T {
    let wx = w.matvec(x);
    x.iter().zip(&wx).fold(T::zero(), |acc, (a, b)| acc + (a.conj() * b.clone()).re)
}

fn attempt<T: ControlReal>(p: &ControlProblem, f0: &[Complex<f64>]) -> Result<(ControlResult, bool)> {
    let (a, pi) = p.operators::<T>()?;
    let pi2 = pi.matmul(&pi);
    let g = time_gramian(&a, &pi2, p.horizon, p.quad_tol)?;
    let prop = semigroup_at(&a, &T::from_f64(p.horizon))?;
    let free = prop.matvec(&lift::<T>(f0));
    let rhs: Vec<Complex<T>> = free.iter().map(|z| -z.clone()).collect();
    let solve = hpd_solve(&g.w, &rhs);
    let d = drive(&g.grid, &pi, &solve.x);
    let end: Vec<Complex<T>> = free.iter().zip(&d.reach).map(|(x, y)| x.clone() + y.clone()).collect();
    let f0n: f64 = f0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let residual = if f0n > 0.0 { vec_norm(&end).to_f64() / f0n } else { vec_norm(&end).to_f64() };
    let cost = hermitian_form(&g.w, &solve.x).to_f64().max(0.0);
    let (n, cut) = (p.n(), p.cutoff);
    let mut times = Vec::with_capacity(d.samples.len());
    let mut controls = Vec::with_capacity(d.samples.len());
    for (s, u) in &d.samples {
        times.push(p.horizon - s.to_f64());
        controls.push(HermiteExpansion::new(n, cut, lower(u))?);
    }
    let ok = solve.well_posed;
    Ok((
        ControlResult {
            method: "hum".into(),
            times,
            controls,
            cost,
            cost_quadrature: d.cost.to_f64(),
            residual,
            final_state: HermiteExpansion::new(n, cut, lower(&end))?,
            gramians: vec![GramianDiagnostics::new(&g, &solve)],
            partial: !ok,
            stages: Vec::new(),
            aborted_at: None,
        },
        ok,
    ))
}

/// Minimal-norm control `u(t) = Πω e^{−(T−t)A*}λ` with `W_c λ = −e^{−TA}f0`,
/// checked by re-simulating the forced system on the quadrature grid.
pub fn hum_control(p: &ControlProblem, f0: &HermiteExpansion<f64>) -> Result<ControlResult> {
    p.validate()?;
    p.check_datum(f0)?;
    let mut last = None;
    for bits in p.schedule() {
        let (res, ok) = match bits {
            None => attempt::<f64>(p, f0.coeffs())?,
            Some(b) => with_precision(b, || attempt::<Mp>(p, f0.coeffs()))?,
        };
        if ok {
            return Ok(res);
        }
        last = Some(res);
    }
    Ok(last.expect("schedule is never empty"))
}
