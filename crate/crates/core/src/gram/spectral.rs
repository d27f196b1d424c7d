use serde::{Deserialize, Serialize};

use super::operator::{gram_matrix_mp, GramOperator};
use crate::error::{Error, Result};
use crate::linalg::sym_extremes;
use crate::scalar::{with_precision, Real, DEFAULT_PRECISION_BITS};

pub const MAX_PRECISION_BITS: u32 = 2048;
/// `λ_min` must exceed this multiple of `ε·λ_max` to be trusted.
pub const RESOLUTION_FACTOR: f64 = 1e3;

/// Ladder of mantissa widths tried after double precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    /// First software-float width; doubled on every escalation.
    pub start_bits: u32,
    pub max_bits: u32,
    /// Skip the double-precision attempt.
    pub force_extended: bool,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy { start_bits: DEFAULT_PRECISION_BITS, max_bits: MAX_PRECISION_BITS, force_extended: false }
    }
}

impl PrecisionPolicy {
    pub fn ladder(&self) -> Vec<u32> {
        let mut out = Vec::new();
        let mut b = self.start_bits.max(64);
        while b < self.max_bits {
            out.push(b);
            b = b.saturating_mul(2);
        }
        out.push(self.max_bits.max(64));
        out.dedup();
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralStatus {
    Resolved,
    /// `λ_min` is below the entry error budget even at the largest precision.
    IndistinguishableFromSingular,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralConstant {
    /// `λ_min^{-1/2}`; infinite when `λ_min ≤ 0`.
    pub c_n: f64,
    pub ln_c_n: f64,
    pub lambda_min: f64,
    pub ln_lambda_min: f64,
    pub lambda_max: f64,
    pub precision_bits: u32,
    pub entry_error: f64,
    /// Certified lower bound on the constant of the untruncated set.
    pub c_lower: f64,
    pub status: SpectralStatus,
}

fn assess<T: Real>(g: &GramOperator<T>) -> (T, T, bool) {
    let (lo, hi) = sym_extremes(&g.matrix);
    let size = g.dim() as f64;
    let eps = T::epsilon();
    let noise_rel = T::from_f64(RESOLUTION_FACTOR) * eps * hi.clone().abs();
    let noise_abs = T::from_f64(size * g.entry_error);
    let ok = lo > noise_rel && lo > noise_abs;
    (lo, hi, ok)
}

fn result_from<T: Real>(g: &GramOperator<T>, lo: &T, hi: &T, status: SpectralStatus) -> SpectralConstant {
    let size = g.dim() as f64;
    let positive = *lo > T::zero();
    let ln_lambda_min = if positive { lo.ln_abs_f64() } else { f64::NEG_INFINITY };
    let ln_c_n = -0.5 * ln_lambda_min;
    // The true form differs from the computed one by at most size·(entry + truncation) in norm.
    let slack = size * (g.entry_error + g.truncation_error);
    let c_lower = 1.0 / (lo.to_f64().max(0.0) + slack).sqrt();
    SpectralConstant {
        c_n: ln_c_n.exp(),
        ln_c_n,
        lambda_min: lo.to_f64(),
        ln_lambda_min,
        lambda_max: hi.to_f64(),
        precision_bits: g.precision_bits,
        entry_error: g.entry_error,
        c_lower: c_lower.max(1.0),
        status,
    }
}

/// `C_N = λ_min(G)^{-1/2}` with precision escalation: double precision
/// first, then software floats along `policy.ladder()` until `λ_min` clears
/// both `10³·ε·λ_max` and `size·entry_error`.
pub fn spectral_constant(g: &GramOperator<f64>, policy: &PrecisionPolicy) -> Result<SpectralConstant> {
    if g.dim() == 0 {
        return Err(Error::contract("empty Gram operator"));
    }
    if !policy.force_extended {
        let (lo, hi, ok) = assess(g);
        if ok {
            return Ok(result_from(g, &lo, &hi, SpectralStatus::Resolved));
        }
    }
    let mut last = None;
    for bits in policy.ladder() {
        let out = with_precision(bits, || -> Result<_> {
            let h = gram_matrix_mp(&g.region, g.n, g.cutoff, bits)?;
            let (lo, hi, ok) = assess(&h);
            let status = if ok { SpectralStatus::Resolved } else { SpectralStatus::IndistinguishableFromSingular };
            Ok((result_from(&h, &lo, &hi, status), ok))
        })?;
        if out.1 {
            return Ok(out.0);
        }
        last = Some(out.0);
    }
    Ok(last.expect("precision ladder is never empty"))
}

/// Same as [`spectral_constant`] but with the matrix already in a fixed type.
pub fn spectral_constant_fixed<T: Real>(g: &GramOperator<T>) -> SpectralConstant {
    let (lo, hi, ok) = assess(g);
    let status = if ok { SpectralStatus::Resolved } else { SpectralStatus::IndistinguishableFromSingular };
    result_from(g, &lo, &hi, status)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::operator::gram_matrix;
    use crate::regions::{ball_1d, full_space, half_space, truncate_radius};

    #[test]
    fn half_line_constant() {
        let g = gram_matrix(&half_space(1, 0, 0.0, 40.0).unwrap(), 1, 1).unwrap();
        let s = spectral_constant(&g, &PrecisionPolicy::default()).unwrap();
        let lam = 0.5 - 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((s.lambda_min - lam).abs() < 1e-12);
        assert!((s.c_n - lam.powf(-0.5)).abs() < 1e-9);
        assert_eq!(s.precision_bits, 53);
        assert_eq!(s.status, SpectralStatus::Resolved);
    }

    #[test]
    fn identity_gives_one() {
        let g = gram_matrix(&full_space(1, truncate_radius(6, 1, 2.0).unwrap()).unwrap(), 1, 6).unwrap();
        let s = spectral_constant(&g, &PrecisionPolicy::default()).unwrap();
        assert!((s.c_n - 1.0).abs() < 1e-10);
    }

    #[test]
    fn small_ball_escalates() {
        let g = gram_matrix(&ball_1d(0.0, 0.5).unwrap(), 1, 30).unwrap();
        let s = spectral_constant(&g, &PrecisionPolicy::default()).unwrap();
        assert!(s.precision_bits >= 256, "{s:?}");
        assert_eq!(s.status, SpectralStatus::Resolved);
        let t = with_precision(512, || spectral_constant_fixed(&gram_matrix_mp(&g.region, 1, 30, 512).unwrap()));
        assert!((s.ln_c_n - t.ln_c_n).abs() < 1e-10);
    }

    #[test]
    fn ceiling_is_reported() {
        let g = gram_matrix(&ball_1d(0.0, 0.05).unwrap(), 1, 40).unwrap();
        let p = PrecisionPolicy { start_bits: 64, max_bits: 64, force_extended: false };
        let s = spectral_constant(&g, &p).unwrap();
        assert_eq!(s.status, SpectralStatus::IndistinguishableFromSingular);
        assert!(s.c_lower >= 1.0);
    }

    #[test]
    fn ladder_doubles() {
        assert_eq!(PrecisionPolicy::default().ladder(), vec![256, 512, 1024, 2048]);
    }
}
