use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::{theoretical_bound, BoundParams, DEFAULT_C_KOV, DEFAULT_C_SOBOLEV};
use super::operator::gram_matrix;
use super::spectral::{spectral_constant, PrecisionPolicy, SpectralStatus};
use crate::error::{Error, Result};
use crate::fit::{linear_fit, LinearFit};
use crate::hermite::space_dim;
use crate::regions::Region;
use crate::scalar::with_precision;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthModel {
    SqrtN,
    Linear,
    NLogN,
}

impl GrowthModel {
    pub const ALL: [GrowthModel; 3] = [GrowthModel::SqrtN, GrowthModel::Linear, GrowthModel::NLogN];

    pub fn abscissa(&self, cutoff: usize) -> f64 {
        let x = cutoff as f64;
        match self {
            GrowthModel::SqrtN => x.sqrt(),
            GrowthModel::Linear => x,
            GrowthModel::NLogN => x * x.max(1.0).ln(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    #[serde(rename = "N")]
    pub cutoff: usize,
    pub dim: usize,
    pub c_measured: f64,
    pub ln_c_measured: f64,
    pub lambda_min: f64,
    pub bound: f64,
    pub ln_bound: f64,
    pub bound_variant: String,
    pub precision_bits: u32,
    pub status: SpectralStatus,
    /// `None` when no bound applies to this N.
    pub dominated: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub model: GrowthModel,
    pub fit: LinearFit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub n: usize,
    pub rows: Vec<ScalingRow>,
    /// `ln C_N ≈ a + b·x(N)` for each model, over resolved rows.
    pub fits: Vec<ModelFit>,
    pub best_model: Option<GrowthModel>,
    /// `ln ln C_N ≈ ln κ + p ln N`; the slope is the exponent `p`.
    pub exponent_fit: Option<LinearFit>,
    /// Cutoffs whose Gram form could not be separated from singular.
    pub singular: Vec<usize>,
    /// Cutoffs where the measured constant exceeds the bound.
    pub bound_violations: Vec<usize>,
    pub bound_params: Option<BoundParams>,
    pub c_sobolev: f64,
    pub c_kov: f64,
}

impl ScalingReport {
    pub fn exponent(&self) -> Option<f64> {
        self.exponent_fit.map(|f| f.slope)
    }

    pub fn fit_for(&self, model: GrowthModel) -> Option<&LinearFit> {
        self.fits.iter().find(|f| f.model == model).map(|f| &f.fit)
    }
}

/// Fits `ln C_N` against each growth model and `ln ln C_N` against `ln N`.
pub fn fit_growth(cutoffs: &[usize], ln_c: &[f64]) -> (Vec<ModelFit>, Option<GrowthModel>, Option<LinearFit>) {
    let fits: Vec<ModelFit> = GrowthModel::ALL
        .iter()
        .filter_map(|m| {
            let x: Vec<f64> = cutoffs.iter().map(|&k| m.abscissa(k)).collect();
            linear_fit(&x, ln_c).map(|fit| ModelFit { model: *m, fit })
        })
        .collect();
    let best = fits.iter().min_by(|a, b| a.fit.rss.total_cmp(&b.fit.rss)).map(|f| f.model);
    let (lx, ly): (Vec<f64>, Vec<f64>) = cutoffs
        .iter()
        .zip(ln_c)
        .filter(|(k, v)| **k > 0 && **v > 1e-12)
        .map(|(k, v)| ((*k as f64).ln(), v.ln()))
        .unzip();
    (fits, best, linear_fit(&lx, &ly))
}

/// Measures `C_N` for every cutoff, compares with the bound of the region's
/// hypothesis class, and fits the growth in `N`. `make_region(N)` must
/// return the region truncated far enough for cutoff `N`.
pub fn scaling_study(
    make_region: &(dyn Fn(usize) -> Result<Region> + Sync),
    n: usize,
    cutoffs: &[usize],
    policy: &PrecisionPolicy,
    params: Option<&BoundParams>,
) -> Result<ScalingReport> {
    if cutoffs.is_empty() {
        return Err(Error::domain("empty list of cutoffs"));
    }
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("cutoffs must be strictly increasing"));
    }
    let bits_env = crate::scalar::working_precision();
    let rows: Vec<ScalingRow> = cutoffs
        .par_iter()
        .map(|&cut| {
            with_precision(bits_env, || -> Result<ScalingRow> {
                let region = make_region(cut)?;
                let g = gram_matrix(&region, n, cut)?;
                let s = spectral_constant(&g, policy)?;
                let bound = params.map(|p| theoretical_bound(p, cut)).transpose()?;
                let (b, lnb, variant, dominated) = match &bound {
                    Some(b) if b.applicable => (b.value, b.ln_value, b.variant.clone(), Some(s.ln_c_n <= b.ln_value)),
                    Some(b) => (f64::INFINITY, f64::INFINITY, b.variant.clone(), None),
                    None => (f64::NAN, f64::NAN, "none".to_string(), None),
                };
                Ok(ScalingRow {
                    cutoff: cut,
                    dim: space_dim(n, cut),
                    c_measured: s.c_n,
                    ln_c_measured: s.ln_c_n,
                    lambda_min: s.lambda_min,
                    bound: b,
                    ln_bound: lnb,
                    bound_variant: variant,
                    precision_bits: s.precision_bits,
                    status: s.status,
                    dominated,
                })
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let resolved: Vec<&ScalingRow> = rows.iter().filter(|r| r.status == SpectralStatus::Resolved).collect();
    let xs: Vec<usize> = resolved.iter().map(|r| r.cutoff).collect();
    let ys: Vec<f64> = resolved.iter().map(|r| r.ln_c_measured).collect();
    let (fits, best_model, exponent_fit) = fit_growth(&xs, &ys);
    Ok(ScalingReport {
        n,
        singular: rows.iter().filter(|r| r.status != SpectralStatus::Resolved).map(|r| r.cutoff).collect(),
        bound_violations: rows.iter().filter(|r| r.dominated == Some(false)).map(|r| r.cutoff).collect(),
        rows,
        fits,
        best_model,
        exponent_fit,
        c_sobolev: params.map_or(DEFAULT_C_SOBOLEV, |p| p.c_sobolev),
        c_kov: params.map_or(DEFAULT_C_KOV, |p| p.c_kov),
        bound_params: params.cloned(),
    })
}
