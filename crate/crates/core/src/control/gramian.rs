use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{gauss_legendre, Mat};
use crate::quadratic::evolve::matrix_power;
use crate::quadratic::semigroup_at;
use crate::scalar::{with_precision, working_precision, Real};

pub const GAUSS_POINTS: usize = 8;
pub const DEFAULT_QUAD_TOL: f64 = 1e-8;
pub const MAX_SUBINTERVALS: usize = 1 << 12;

/// Composite 8-point Gauss rule on `[0, horizon]` with the propagators
/// `e^{−sA}` at every node, factored as `e^{−jhA}·e^{−θ_i hA}`.
#[derive(Clone, Debug)]
pub struct TimeGrid<T: Real> {
    pub horizon: f64,
    pub subintervals: usize,
    h: T,
    theta: Vec<T>,
    weights: Vec<T>,
    local: Vec<Mat<Complex<T>>>,
    shifts: Vec<Mat<Complex<T>>>,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(a: &Mat<Complex<T>>, horizon: f64, subintervals: usize) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::domain(format!("horizon {horizon} must be positive")));
        }
        let p = subintervals.max(1);
        let h = T::from_f64(horizon) / T::from_usize(p);
        let (x, w) = gauss_legendre::<T>(GAUSS_POINTS);
        let theta: Vec<T> = x.iter().map(|xi| (xi.clone() + T::one()) * T::half()).collect();
        let weights: Vec<T> = w.iter().map(|wi| wi.clone() * T::half() * h.clone()).collect();
        let local = theta
            .iter()
            .map(|t| semigroup_at(a, &(t.clone() * h.clone())))
            .collect::<Result<Vec<_>>>()?;
        let step = semigroup_at(a, &h)?;
        let mut shifts = Vec::with_capacity(p);
        let mut cur = Mat::<Complex<T>>::identity(a.rows());
        for j in 0..p {
            // Re-anchor every 64 steps to keep rounding from compounding.
            if j > 0 && j % 64 == 0 {
                cur = matrix_power(&step, j as u64);
            }
            shifts.push(cur.clone());
            cur = cur.matmul(&step);
        }
        Ok(TimeGrid { horizon, subintervals: p, h, theta, weights, local, shifts })
    }

    pub fn len(&self) -> usize {
        self.subintervals * GAUSS_POINTS
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node time `s = h(j + θ_i)`.
    pub fn time(&self, j: usize, i: usize) -> T {
        self.h.clone() * (T::from_usize(j) + self.theta[i].clone())
    }

    pub fn weight(&self, i: usize) -> &T {
        &self.weights[i]
    }

    /// `e^{−sA}` at node `(j, i)`.
    pub fn propagator(&self, j: usize, i: usize) -> Mat<Complex<T>> {
        self.shifts[j].matmul(&self.local[i])
    }

    /// Runs `f(j)` for every subinterval in parallel and returns the results
    /// in subinterval order.
    pub fn map_subintervals<R: Send>(&self, f: impl Fn(usize) -> R + Sync) -> Vec<R> {
        let bits = working_precision();
        (0..self.subintervals).into_par_iter().map(|j| with_precision(bits, || f(j))).collect()
    }

    /// `∫_0^horizon e^{−sA} M e^{−sA*} ds`.
    pub fn congruence_integral(&self, m: &Mat<Complex<T>>) -> Mat<Complex<T>> {
        let dim = m.rows();
        let parts = self.map_subintervals(|j| {
            let mut acc = Mat::<Complex<T>>::zeros(dim, dim);
            for i in 0..GAUSS_POINTS {
                let x = self.propagator(j, i);
                let term = x.matmul(m).matmul(&x.adjoint());
                acc.add_assign_scaled(&term, &Complex::new(self.weights[i].clone(), T::zero()));
            }
            acc
        });
        let mut total = Mat::<Complex<T>>::zeros(dim, dim);
        for part in &parts {
            total = total.add(part);
        }
        total.hermitian_part()
    }
}

#[derive(Clone, Debug)]
pub struct TimeGramian<T: Real> {
    pub w: Mat<Complex<T>>,
    pub grid: TimeGrid<T>,
    /// `max |ΔW_ij| / √(W_ii W_jj)` between the last two refinements.
    pub stagnation: f64,
    pub converged: bool,
}

/// Scaled entrywise change between two quadrature levels.
fn stagnation<T: Real>(old: &Mat<Complex<T>>, new: &Mat<Complex<T>>) -> f64 {
    let n = new.rows();
    let diag: Vec<T> = (0..n).map(|i| new[(i, i)].re.clone().abs()).collect();
    let floor = diag.iter().cloned().fold(T::zero(), T::max_of) * T::epsilon();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let d = (new[(i, j)].clone() - old[(i, j)].clone()).norm_sqr().sqrt();
            let scale = (diag[i].clone() * diag[j].clone()).sqrt().max_of(floor.clone());
            if scale > T::zero() {
                worst = worst.max((d / scale).to_f64());
            }
        }
    }
    worst
}

/// `∫_0^horizon e^{−sA} M e^{−sA*} ds`, doubling the number of Gauss panels
/// until the scaled change drops below `tol`.
pub fn time_gramian<T: Real>(a: &Mat<Complex<T>>, m: &Mat<Complex<T>>, horizon: f64, tol: f64) -> Result<TimeGramian<T>> {
    let rate = a.norm1().to_f64() * horizon;
    let mut p = ((rate / 8.0).ceil().max(1.0) as usize).next_power_of_two();
    let mut grid = TimeGrid::new(a, horizon, p)?;
    let mut w = grid.congruence_integral(m);
    loop {
        let finer = TimeGrid::new(a, horizon, 2 * p)?;
        let wf = finer.congruence_integral(m);
        let st = stagnation(&w, &wf);
        p *= 2;
        grid = finer;
        w = wf;
        if st <= tol || p >= MAX_SUBINTERVALS {
            return Ok(TimeGramian { w, grid, stagnation: st, converged: st <= tol });
        }
    }
}
