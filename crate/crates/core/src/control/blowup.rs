use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::observability::{observability_constant, ObservabilityStatus};
use super::ControlProblem;
use crate::error::{Error, Result};
use crate::fit::{linear_fit, LinearFit};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupRow {
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "C_T")]
    pub c_t: f64,
    pub ln_c_t: f64,
    pub precision_bits: u32,
    pub method: String,
    /// Hit the precision ceiling and left out of the fits.
    pub excluded: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupFit {
    /// `ln C_T` is fitted against `T^{−exponent}`.
    pub exponent: u32,
    pub fit: LinearFit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub k0: usize,
    pub rows: Vec<BlowupRow>,
    pub fits: Vec<BlowupFit>,
    /// Exponent with the smallest residual sum of squares.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preferred_exponent: Option<u32>,
    pub excluded: Vec<f64>,
}

impl BlowupReport {
    pub fn fit_for(&self, exponent: u32) -> Option<&LinearFit> {
        self.fits.iter().find(|f| f.exponent == exponent).map(|f| &f.fit)
    }
}

/// `ln C_T` over a decreasing list of horizons, fitted against `T^{−1}` and
/// `T^{−(2k₀+1)}`.
pub fn cost_blowup_study(template: &ControlProblem, horizons: &[f64], k0: usize) -> Result<BlowupReport> {
    if horizons.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::domain("horizons must be positive"));
    }
    if horizons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::domain("horizons must be strictly decreasing"));
    }
    let rows = horizons
        .par_iter()
        .map(|&t| {
            let r = observability_constant(&template.with_horizon(t))?;
            Ok(BlowupRow {
                horizon: t,
                c_t: r.c_t,
                ln_c_t: r.ln_c_t,
                precision_bits: r.precision_bits,
                method: r.method,
                excluded: r.status == ObservabilityStatus::LowerBound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let kept: Vec<&BlowupRow> = rows.iter().filter(|r| !r.excluded).collect();
    let mut exponents = vec![1u32, 2 * k0 as u32 + 1];
    exponents.dedup();
    let fits: Vec<BlowupFit> = exponents
        .iter()
        .filter_map(|&m| {
            let x: Vec<f64> = kept.iter().map(|r| r.horizon.powi(-(m as i32))).collect();
            let y: Vec<f64> = kept.iter().map(|r| r.ln_c_t).collect();
            linear_fit(&x, &y).map(|fit| BlowupFit { exponent: m, fit })
        })
        .collect();
    let preferred_exponent = fits
        .iter()
        .min_by(|a, b| a.fit.rss.partial_cmp(&b.fit.rss).unwrap_or(std::cmp::Ordering::Equal))
        .map(|f| f.exponent);
    let excluded = rows.iter().filter(|r| r.excluded).map(|r| r.horizon).collect();
    Ok(BlowupReport { k0, rows, fits, preferred_exponent, excluded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::QuadraticSymbol;
    use crate::regions::full_space;

    #[test]
    fn whole_line_grows_and_rejects_bad_lists() {
        let p = ControlProblem::new(QuadraticSymbol::harmonic(1).unwrap(), full_space(1, 40.0).unwrap(), 6, 1.0).unwrap();
        assert!(cost_blowup_study(&p, &[0.5, 1.0], 0).is_err());
        let r = cost_blowup_study(&p, &[1.0, 0.5, 0.25], 0).unwrap();
        assert!(r.rows.windows(2).all(|w| w[1].c_t > w[0].c_t));
        assert_eq!(r.fits.len(), 1);
        for row in &r.rows {
            let want = (0..=6)
                .map(|k| {
                    let l = (2 * k + 1) as f64;
                    2.0 * l * (-2.0 * l * row.horizon).exp() / (1.0 - (-2.0 * l * row.horizon).exp())
                })
                .fold(0.0, f64::max);
            assert!((row.c_t - want).abs() < 1e-6 * want);
        }
    }
}
