//! Observability constants, minimal-norm (HUM) controls, the staircase
//! strategy and cost-blowup studies for `∂_t f + q^w f = Πω u` on `E_N`.
//!
//! The control operator is the Galerkin projection `Πω` of multiplication by
//! `1_ω`, so observation integrates `⟨Πω g, g⟩` and the reachability Gramian
//! carries `Πω²`.

pub mod blowup;
pub mod gramian;
pub mod hum;
pub mod observability;
pub mod staircase;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::gram::{check_truncation, gram_matrix, gram_matrix_with, PrecisionPolicy};
use crate::hermite::HermiteExpansion;
use crate::linalg::{cholesky, hermitian_extremes, solve_lower, Lu, Mat};
use crate::quadratic::{weyl_quantize, QuadraticSymbol};
use crate::regions::{interval_block, interval_block_f64, IntervalBlock, Region};
use crate::scalar::{Mp, Real};

pub use blowup::{cost_blowup_study, BlowupFit, BlowupReport, BlowupRow};
pub use gramian::{time_gramian, TimeGramian, TimeGrid, DEFAULT_QUAD_TOL, GAUSS_POINTS, MAX_SUBINTERVALS};
pub use hum::{hum_control, ControlReport, ControlResult, GramianDiagnostics};
pub use observability::{observability_constant, ObservabilityReport, ObservabilityStatus};
pub use staircase::{lr_staircase, StageRecord, StaircaseOptions};

/// Scalars the control pipeline runs in; each picks its own Gram kernel.
pub trait ControlReal: Real {
    fn interval_block(a: f64, b: f64, kmax: usize) -> IntervalBlock<Self>;
}

impl ControlReal for f64 {
    fn interval_block(a: f64, b: f64, kmax: usize) -> IntervalBlock<f64> {
        interval_block_f64(a, b, kmax)
    }
}

impl ControlReal for Mp {
    fn interval_block(a: f64, b: f64, kmax: usize) -> IntervalBlock<Mp> {
        interval_block::<Mp>(a, b, kmax)
    }
}

/// Everything needed to rebuild `A` and `Πω` at any precision.
#[derive(Clone, Debug)]
pub struct ControlProblem {
    pub symbol: QuadraticSymbol,
    pub region: Region,
    pub cutoff: usize,
    pub horizon: f64,
    /// Escalation ladder used when a Gramian is too ill-conditioned.
    pub policy: PrecisionPolicy,
    /// Fixed mantissa width; disables escalation when set.
    pub precision_bits: Option<u32>,
    /// Relative stagnation that stops the time-quadrature refinement.
    pub quad_tol: f64,
}

impl ControlProblem {
    pub fn new(symbol: QuadraticSymbol, region: Region, cutoff: usize, horizon: f64) -> Result<Self> {
        let p = ControlProblem {
            symbol,
            region,
            cutoff,
            horizon,
            policy: PrecisionPolicy::default(),
            precision_bits: None,
            quad_tol: DEFAULT_QUAD_TOL,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_precision_bits(mut self, bits: Option<u32>) -> Self {
        self.precision_bits = bits;
        self
    }

    pub fn with_horizon(&self, horizon: f64) -> Self {
        ControlProblem { horizon, ..self.clone() }
    }

    pub fn n(&self) -> usize {
        self.symbol.n
    }

    pub fn validate(&self) -> Result<()> {
        if self.symbol.n != self.region.n {
            return Err(Error::contract(format!(
                "symbol acts on ℝ^{} but the region lives in ℝ^{}",
                self.symbol.n, self.region.n
            )));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::domain(format!("horizon T = {} must be positive", self.horizon)));
        }
        if !(self.quad_tol > 0.0) {
            return Err(Error::domain("quadrature tolerance must be positive"));
        }
        check_truncation(&self.region, self.cutoff)?;
        Ok(())
    }

    /// Checks that `Πω` is positive semidefinite up to its entry errors.
    pub fn check_observation(&self) -> Result<()> {
        let g = gram_matrix(&self.region, self.n(), self.cutoff)?;
        let (lo, _) = crate::linalg::sym_extremes(&g.matrix);
        let slack = g.dim() as f64 * (g.entry_error + g.truncation_error) + 1e-13;
        if lo < -slack {
            return Err(Error::numerical(format!("Πω has a negative eigenvalue {lo:e}")));
        }
        Ok(())
    }

    /// Precision attempts in order; `None` stands for `f64`.
    pub(crate) fn schedule(&self) -> Vec<Option<u32>> {
        if let Some(b) = self.precision_bits {
            return vec![if b <= 53 { None } else { Some(b) }];
        }
        let mut out = Vec::new();
        if !self.policy.force_extended {
            out.push(None);
        }
        out.extend(self.policy.ladder().into_iter().map(Some));
        out
    }

    /// `(A, Πω)` on `E_k` in the working type.
    pub(crate) fn operators<T: ControlReal>(&self) -> Result<(Mat<Complex<T>>, Mat<Complex<T>>)> {
        let a = weyl_quantize::<T>(&self.symbol, self.cutoff)?.matrix;
        let g = gram_matrix_with::<T>(&self.region, self.n(), self.cutoff, T::mantissa_bits(), T::interval_block)?;
        Ok((a, g.matrix.map(|v| Complex::new(v.clone(), T::zero()))))
    }

    pub(crate) fn check_datum(&self, f0: &HermiteExpansion<f64>) -> Result<()> {
        if f0.dim() != self.n() || f0.cutoff() != self.cutoff {
            return Err(Error::contract(format!(
                "initial datum lives on E_{} in dimension {}, the problem on E_{} in dimension {}",
                f0.cutoff(),
                f0.dim(),
                self.cutoff,
                self.n()
            )));
        }
        Ok(())
    }
}

pub(crate) fn lift<T: Real>(v: &[Complex<f64>]) -> Vec<Complex<T>> {
    v.iter().map(|z| Complex::new(T::from_f64(z.re), T::from_f64(z.im))).collect()
}

pub(crate) fn lower<T: Real>(v: &[Complex<T>]) -> Vec<Complex<f64>> {
    v.iter().map(|z| Complex::new(z.re.to_f64(), z.im.to_f64())).collect()
}

pub(crate) fn vec_norm<T: Real>(v: &[Complex<T>]) -> T {
    crate::linalg::norm2(v)
}

/// Solves `Lᴴx = y` for lower-triangular `L`.
pub(crate) fn solve_upper_adjoint<T: Real>(l: &Mat<Complex<T>>, y: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = l.rows();
    let mut x = y.to_vec();
    for i in (0..n).rev() {
        let mut s = x[i].clone();
        for k in i + 1..n {
            s -= l[(k, i)].conj() * x[k].clone();
        }
        x[i] = s / l[(i, i)].conj();
    }
    x
}

/// Outcome of a Hermitian positive definite solve.
pub(crate) struct HpdSolve<T: Real> {
    pub x: Vec<Complex<T>>,
    pub lambda_min: T,
    pub lambda_max: T,
    /// `λ_min > 1e3·ε·λ_max` and the Cholesky factorization exists.
    pub well_posed: bool,
}

/// `Wx = b` by Cholesky when `W` is resolved at the working precision, by
/// pivoted LU otherwise (zero when even that breaks down).
pub(crate) fn hpd_solve<T: Real>(w: &Mat<Complex<T>>, b: &[Complex<T>]) -> HpdSolve<T> {
    let w = w.hermitian_part();
    let (lo, hi) = hermitian_extremes(&w);
    let resolved = lo > T::from_f64(crate::gram::spectral::RESOLUTION_FACTOR) * T::epsilon() * hi.clone().abs();
    if resolved {
        if let Ok(l) = cholesky(&w) {
            let rhs = Mat::from_vec(b.len(), 1, b.to_vec());
            let y = solve_lower(&l, &rhs);
            let x = solve_upper_adjoint(&l, y.as_slice());
            return HpdSolve { x, lambda_min: lo, lambda_max: hi, well_posed: true };
        }
    }
    let x = match Lu::new(&w) {
        Ok(lu) => lu.solve(b),
        Err(_) => vec![Complex::new(T::zero(), T::zero()); b.len()],
    };
    HpdSolve { x, lambda_min: lo, lambda_max: hi, well_posed: false }
}
