use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::symbol::QuadraticSymbol;
use super::weyl::{weyl_quantize, GalerkinOperator};
use crate::error::{Error, Result};
use crate::fit::{linear_fit, LinearFit};
use crate::hermite::{space_dim, HermiteExpansion};
use crate::linalg::{expm, hermitian_extremes, Mat};
use crate::scalar::Real;

/// Largest `t‖A‖₁` handled by a single exponential.
pub const MAX_STEP_NORM: f64 = 50.0;
pub const CONTRACTION_TOL: f64 = 1e-8;

/// `e^{−tA}` by scaling and squaring, split into `m` equal steps when `t‖A‖₁ > 50`.
pub fn propagator<T: Real>(a: &GalerkinOperator<T>, t: f64) -> Result<Mat<Complex<T>>> {
    semigroup_matrix(&a.matrix, t)
}

/// `e^{−tM}` for any square complex matrix, with the same step splitting.
pub fn semigroup_matrix<T: Real>(m: &Mat<Complex<T>>, t: f64) -> Result<Mat<Complex<T>>> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time {t} must be nonnegative")));
    }
    semigroup_at(m, &T::from_f64(t))
}

/// [`semigroup_matrix`] at a time given in the working type, so software
/// floats keep their full precision in `t`.
pub fn semigroup_at<T: Real>(m: &Mat<Complex<T>>, t: &T) -> Result<Mat<Complex<T>>> {
    if *t < T::zero() {
        return Err(Error::domain(format!("time {t} must be nonnegative")));
    }
    let norm = m.norm1().to_f64() * t.to_f64();
    let steps = (norm / MAX_STEP_NORM).ceil().max(1.0) as u64;
    let h = -t.clone() / T::from_f64(steps as f64);
    let step = expm(&m.scale_re(&h))?;
    Ok(matrix_power(&step, steps))
}

pub(crate) fn matrix_power<T: Real>(m: &Mat<Complex<T>>, mut k: u64) -> Mat<Complex<T>> {
    let mut acc = Mat::identity(m.rows());
    let mut base = m.clone();
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.matmul(&base);
        }
        k >>= 1;
        if k > 0 {
            base = base.matmul(&base);
        }
    }
    acc
}

#[derive(Clone, Debug)]
pub struct Evolution<T: Real> {
    pub state: HermiteExpansion<T>,
    /// `‖f(t)‖ / ‖f0‖`.
    pub norm_ratio: f64,
}

/// `e^{−tA} f0`. For accretive symbols a norm increase beyond `1e−8` is an error.
pub fn evolve<T: Real>(a: &GalerkinOperator<T>, f0: &HermiteExpansion<T>, t: f64) -> Result<Evolution<T>> {
    if f0.cutoff() != a.cutoff || f0.dim() != a.n {
        return Err(Error::contract("initial datum does not live on the operator's space"));
    }
    let p = propagator(a, t)?;
    let state = HermiteExpansion::new(a.n, a.cutoff, p.matvec(f0.coeffs()))?;
    let n0 = f0.norm().to_f64();
    let norm_ratio = if n0 > 0.0 { state.norm().to_f64() / n0 } else { 0.0 };
    if a.symbol.is_accretive(1e-12) && norm_ratio > 1.0 + CONTRACTION_TOL {
        return Err(Error::numerical(format!(
            "contraction violated at t = {t}: ‖f(t)‖/‖f0‖ = {norm_ratio}"
        )));
    }
    Ok(Evolution { state, norm_ratio })
}

/// `‖e^{−tA_N} f0 − π_N e^{−tA_{2N}} f0‖ / ‖f0‖`: how far the truncated flow
/// is from the flow on a doubled space.
pub fn galerkin_convergence(q: &QuadraticSymbol, f0: &HermiteExpansion<f64>, t: f64) -> Result<f64> {
    let cut = f0.cutoff();
    let small = evolve(&weyl_quantize::<f64>(q, cut)?, f0, t)?.state;
    let big = evolve(&weyl_quantize::<f64>(q, 2 * cut.max(1))?, &f0.with_cutoff(2 * cut.max(1)), t)?.state;
    let gap = small.sub(&big.with_cutoff(cut))?.norm();
    Ok(gap / f0.norm().max(f64::MIN_POSITIVE))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DissipationRow {
    pub t: f64,
    pub k: usize,
    /// `‖(1 − π_k) e^{−tA}‖` on `E_N`.
    pub ratio: f64,
    pub ln_ratio: f64,
    /// `e^{−δ(t)k}` with `δ(t) = min(t, t0)^{2k0+1}/C0`.
    pub predicted: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DissipationFit {
    pub t: f64,
    pub fit: LinearFit,
    /// Decay rate `−slope`.
    pub delta: f64,
    /// `min(t, t0)^{2k0+1}/δ`, the constant that reproduces the measured rate.
    pub implied_c0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DissipationReport {
    pub cutoff: usize,
    pub k0: usize,
    pub c0: f64,
    pub t0: f64,
    pub rows: Vec<DissipationRow>,
    pub fits: Vec<DissipationFit>,
    /// For the harmonic oscillator: `max |ratio − e^{−(2k+2+n)t}|`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub harmonic_deviation: Option<f64>,
}

/// Largest singular value of the rows of `p` above level `k`.
fn tail_norm(p: &Mat<Complex<f64>>, keep: usize) -> f64 {
    let rows: Vec<usize> = (keep..p.rows()).collect();
    let cols: Vec<usize> = (0..p.cols()).collect();
    if rows.is_empty() {
        return 0.0;
    }
    let m = p.select(&rows, &cols);
    let g = m.adjoint().matmul(&m).hermitian_part();
    hermitian_extremes(&g).1.max(0.0).sqrt()
}

/// Measures the high-mode decay `‖(1 − π_k)e^{−tA}‖` over the grids (the
/// supremum over all `f ∈ E_N`, computed as an operator norm) and fits
/// `ln ratio` linearly in `k` at each `t`.
pub fn dissipation_check(
    a: &GalerkinOperator<f64>,
    k0: usize,
    c0: f64,
    t0: f64,
    t_grid: &[f64],
    k_grid: &[usize],
) -> Result<DissipationReport> {
    if let Some(&k) = k_grid.iter().find(|&&k| k >= a.cutoff) {
        return Err(Error::domain(format!("level {k} leaves no modes above it in E_{}", a.cutoff)));
    }
    if !(c0 > 0.0 && t0 > 0.0) {
        return Err(Error::domain("C0 and t0 must be positive"));
    }
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &t in t_grid {
        let p = propagator(a, t)?;
        let delta_pred = t.min(t0).powi(2 * k0 as i32 + 1) / c0;
        let mut ks = Vec::new();
        let mut ys = Vec::new();
        for &k in k_grid {
            let ratio = tail_norm(&p, space_dim(a.n, k));
            let ln_ratio = ratio.ln();
            rows.push(DissipationRow { t, k, ratio, ln_ratio, predicted: (-delta_pred * k as f64).exp() });
            if ratio > 0.0 {
                ks.push(k as f64);
                ys.push(ln_ratio);
            }
        }
        if let Some(fit) = linear_fit(&ks, &ys) {
            let delta = -fit.slope;
            fits.push(DissipationFit { t, fit, delta, implied_c0: t.min(t0).powi(2 * k0 as i32 + 1) / delta });
        }
    }
    let harmonic_deviation = (a.symbol.name == "harmonic").then(|| {
        rows.iter()
            .map(|r| (r.ratio - (-((2 * r.k + 2 + a.n) as f64) * r.t).exp()).abs())
            .fold(0.0, f64::max)
    });
    Ok(DissipationReport { cutoff: a.cutoff, k0, c0, t0, rows, fits, harmonic_deviation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::MultiIndex;
    use num_complex::Complex64;

    #[test]
    fn ground_state_decay() {
        let a = weyl_quantize::<f64>(&QuadraticSymbol::harmonic(1).unwrap(), 6).unwrap();
        let f0 = HermiteExpansion::basis_vector(1, 6, &MultiIndex(vec![0]), Complex64::new(1.0, 0.0)).unwrap();
        let e = evolve(&a, &f0, 0.5).unwrap();
        assert!((e.state.coeffs()[0].re - (-0.5f64).exp()).abs() < 1e-14);
        let same = evolve(&a, &f0, 0.0).unwrap();
        assert!(same.state.sub(&f0).unwrap().norm() < 1e-15);
    }

    #[test]
    fn long_times_are_split() {
        let a = weyl_quantize::<f64>(&QuadraticSymbol::harmonic(1).unwrap(), 10).unwrap();
        let p = propagator(&a, 20.0).unwrap();
        assert!((p[(0, 0)].re - (-20.0f64).exp()).abs() < 1e-20);
        let want = (-420.0f64).exp();
        assert!((p[(10, 10)].re - want).abs() < 1e-10 * want);
    }

    #[test]
    fn semigroup_property() {
        let a = weyl_quantize::<f64>(&QuadraticSymbol::kramers_fokker_planck(1.0).unwrap(), 8).unwrap();
        let dim = a.dim();
        let f0 = HermiteExpansion::new(2, 8, (0..dim).map(|i| Complex64::new(((i * 37) % 11) as f64 - 5.0, (i % 3) as f64)).collect()).unwrap();
        let st = evolve(&a, &f0, 0.7).unwrap().state;
        let two = evolve(&a, &evolve(&a, &f0, 0.3).unwrap().state, 0.4).unwrap().state;
        assert!(st.sub(&two).unwrap().norm() <= 1e-9 * f0.norm());
    }

    #[test]
    fn harmonic_dissipation_rate() {
        let a = weyl_quantize::<f64>(&QuadraticSymbol::harmonic(1).unwrap(), 12).unwrap();
        let r = dissipation_check(&a, 0, 1.0, 1.0, &[0.0, 0.3, 1.0], &[1, 3, 6]).unwrap();
        assert!(r.harmonic_deviation.unwrap() < 1e-10);
        assert!(r.rows.iter().filter(|row| row.t == 0.0).all(|row| (row.ratio - 1.0).abs() < 1e-12));
        assert!(dissipation_check(&a, 0, 1.0, 1.0, &[0.3], &[12]).is_err());
    }
}
