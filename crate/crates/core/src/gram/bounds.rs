//! Explicit upper bounds on `C_N(ω)` for the three geometric hypotheses,
//! evaluated in log space because they overflow `f64` almost immediately.

use std::f64::consts::{E, LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::binomial;
use crate::poly::remez::ln_remez_f;
use crate::poly::tail_constant_cn;
use crate::regions::{Generator, Region};

pub const DEFAULT_C_SOBOLEV: f64 = 10.0;
pub const DEFAULT_C_KOV: f64 = 300.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum BoundVariant {
    /// ω contains the open ball `B(x0, r)`.
    Open { x0: Vec<f64>, r: f64 },
    /// `|ω ∩ B(0, R)| ≥ δ|B(0, R)|` for every `R ≥ R0`.
    Density { delta: f64, r0: f64 },
    /// ω is γ-thick at scale L.
    Thick { l: f64, gamma: f64 },
}

impl BoundVariant {
    pub fn name(&self) -> &'static str {
        match self {
            BoundVariant::Open { .. } => "open",
            BoundVariant::Density { .. } => "density",
            BoundVariant::Thick { .. } => "thick",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub n: usize,
    pub variant: BoundVariant,
    /// Tail constant: `E_N` functions keep ¾ of their mass in `B(0, c_n√(N+1))`.
    pub c_n: f64,
    pub c_sobolev: f64,
    pub c_kov: f64,
}

impl BoundParams {
    /// Validated parameters with the default auxiliary constants.
    pub fn new(n: usize, variant: BoundVariant) -> Result<Self> {
        let c_n = tail_constant_cn(n)?.c_n;
        let p = BoundParams { n, variant, c_n, c_sobolev: DEFAULT_C_SOBOLEV, c_kov: DEFAULT_C_KOV };
        p.validate()?;
        Ok(p)
    }

    pub fn with_constants(mut self, c_sobolev: f64, c_kov: f64) -> Result<Self> {
        self.c_sobolev = c_sobolev;
        self.c_kov = c_kov;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::domain("dimension must be at least 1"));
        }
        if !(self.c_n > 0.0 && self.c_sobolev > 0.0 && self.c_kov > 1.0) {
            return Err(Error::domain("auxiliary constants must be positive with C_kov > 1"));
        }
        match &self.variant {
            BoundVariant::Open { x0, r } => {
                if x0.len() != self.n {
                    return Err(Error::domain(format!("centre has {} coordinates, expected {}", x0.len(), self.n)));
                }
                if !(*r > 0.0) {
                    return Err(Error::domain(format!("ball radius {r} must be positive")));
                }
            }
            BoundVariant::Density { delta, r0 } => {
                if !(*delta > 0.0 && *delta <= 1.0) {
                    return Err(Error::domain(format!("density δ = {delta} must lie in (0, 1]")));
                }
                if !(*r0 >= 0.0) {
                    return Err(Error::domain(format!("R0 = {r0} must be nonnegative")));
                }
            }
            BoundVariant::Thick { l, gamma } => {
                if !(*l > 0.0) {
                    return Err(Error::domain(format!("scale L = {l} must be positive")));
                }
                if !(*gamma > 0.0 && *gamma <= 1.0) {
                    return Err(Error::domain(format!("γ = {gamma} must lie in (0, 1]")));
                }
            }
        }
        Ok(())
    }

    /// Hypothesis class implied by a region's generator, if any.
    pub fn for_region(region: &Region) -> Option<Result<Self>> {
        let n = region.n;
        let variant = match &region.generator {
            Generator::Ball { x0, r } => BoundVariant::Open { x0: vec![*x0], r: *r },
            Generator::HalfSpace { c, .. } if *c <= 0.0 => BoundVariant::Density { delta: 0.5, r0: 0.0 },
            Generator::Full => BoundVariant::Density { delta: 1.0, r0: 0.0 },
            // (R − r0)/R ≥ ½ once R ≥ 2r0.
            Generator::BallComplement { r0 } if n == 1 => BoundVariant::Density { delta: 0.5, r0: 2.0 * r0 },
            Generator::PeriodicThick { l, gamma } => BoundVariant::Thick { l: *l, gamma: *gamma },
            _ => return None,
        };
        Some(BoundParams::new(n, variant))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub variant: String,
    pub cutoff: usize,
    /// `ln` of the bound; `+∞` when not applicable.
    pub ln_value: f64,
    /// The bound itself, `+∞` on overflow.
    pub value: f64,
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// `|𝕊^{n−1}| = 2π^{n/2}/Γ(n/2)`; equals 2 on the line.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / libm::tgamma(n as f64 / 2.0)
}

/// `δ_n = 2√(2^{11} n³ (2ⁿ + 1))`.
pub fn delta_n(n: usize) -> f64 {
    let nf = n as f64;
    2.0 * (2f64.powi(11) * nf.powi(3) * (2f64.powi(n as i32) + 1.0)).sqrt()
}

/// `ln C̃_n(δ)` with
/// `C̃_n(δ) = C_sob·e^{eδ^{−2}/2}·(Σ_{|β|≤n} (32δ²(2ⁿ+1))^{|β|} (|β|!)²)^{1/2}`.
pub fn ln_sobolev_factor(n: usize, delta: f64, c_sobolev: f64) -> f64 {
    let q = 32.0 * delta * delta * (2f64.powi(n as i32) + 1.0);
    let mut sum = 0.0;
    let mut fact = 1.0f64;
    for k in 0..=n {
        if k > 0 {
            fact *= k as f64;
        }
        // binomial(k+n−1, n−1) multi-indices of order k in n variables.
        sum += binomial(k + n - 1, n - 1) as f64 * q.powi(k as i32) * fact * fact;
    }
    c_sobolev.ln() + E / (2.0 * delta * delta) + 0.5 * sum.ln()
}

/// Exponent `(1/ln 2)·ln(2·C_kov·n^{n/2}|𝕊^{n−1}|/γ)` of the thick bound.
pub fn thick_exponent(n: usize, gamma: f64, c_kov: f64) -> f64 {
    let nf = n as f64;
    (2.0 * c_kov * nf.powf(nf / 2.0) * sphere_area(n) / gamma).ln() / LN_2
}

fn ln1p_exp(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// The explicit bound for `E_N` under the hypothesis in `p`.
pub fn theoretical_bound(p: &BoundParams, cutoff: usize) -> Result<BoundValue> {
    p.validate()?;
    let nf = p.n as f64;
    let big_n = cutoff as f64;
    let radius = p.c_n * (big_n + 1.0).sqrt();
    let mut note = None;
    let (ln_value, applicable) = match &p.variant {
        BoundVariant::Open { x0, r } => {
            let ax = x0.iter().map(|v| v * v).sum::<f64>().sqrt();
            if radius > 2.0 * ax + r {
                let a = radius + ax;
                let t = (nf - 1.0) * a.ln() + (12.0 * big_n + nf + 4.0) * LN_2
                    - 3f64.ln()
                    - (2.0 * big_n + nf) * r.ln()
                    + (2.0 * big_n + 1.0) * (a - r / 2.0).ln();
                ((2.0 / 3f64.sqrt()).ln() + (ax + r).powi(2) / 2.0 + 0.5 * ln1p_exp(t), true)
            } else {
                note = Some(format!(
                    "c_n√(N+1) = {radius} does not exceed 2|x0| + r = {}; only the existence constant applies",
                    2.0 * ax + r
                ));
                (f64::INFINITY, false)
            }
        }
        BoundVariant::Density { delta, r0 } => {
            if radius >= *r0 {
                let ln = 0.5 * ((4.0 * big_n + 6.0) * LN_2 - 9f64.ln() - delta.ln())
                    + big_n * ln_remez_f(p.n, delta / 4.0)
                    + p.c_n * p.c_n * (big_n + 1.0) / 2.0;
                (ln, true)
            } else {
                note = Some(format!("c_n√(N+1) = {radius} is below R0 = {r0}"));
                (f64::INFINITY, false)
            }
        }
        BoundVariant::Thick { l, gamma } => {
            let dn = delta_n(p.n);
            let inner = nf / 2.0 * (4.0 * l).ln() + ln_sobolev_factor(p.n, 1.0 / (dn * l), p.c_sobolev) + dn * l * big_n.sqrt();
            let ln = 0.5 * LN_2 + LN_2 - 0.5 * gamma.ln() + thick_exponent(p.n, *gamma, p.c_kov) * inner;
            (ln, true)
        }
    };
    Ok(BoundValue {
        variant: p.variant.name().to_string(),
        cutoff,
        ln_value,
        value: if applicable { ln_value.exp() } else { f64::INFINITY },
        applicable,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_at_zero_cutoff() {
        let p = BoundParams::new(1, BoundVariant::Density { delta: 1.0, r0: 0.0 }).unwrap();
        let b = theoretical_bound(&p, 0).unwrap();
        let want = (64.0f64 / 9.0).sqrt() * (p.c_n * p.c_n / 2.0).exp();
        assert!((b.value - want).abs() < 1e-12 * want);
    }

    #[test]
    fn thick_is_affine_in_sqrt_cutoff() {
        let p = BoundParams::new(1, BoundVariant::Thick { l: 1.0, gamma: 1.0 }).unwrap();
        let d = theoretical_bound(&p, 16).unwrap().ln_value - theoretical_bound(&p, 4).unwrap().ln_value;
        let want = delta_n(1) * 2.0 * (2.0 * 300.0 * 2.0f64).ln() / LN_2;
        assert!((d - want).abs() < 1e-9 * want);
    }

    #[test]
    fn open_ball_matches_direct_formula() {
        let p = BoundParams::new(1, BoundVariant::Open { x0: vec![0.0], r: 1.0 }).unwrap();
        for cut in [1usize, 5, 12] {
            let a = p.c_n * ((cut + 1) as f64).sqrt();
            let inside = 1.0 + 2f64.powi(12 * cut as i32 + 5) / 3.0 * (a - 0.5).powi(2 * cut as i32 + 1);
            let want = 2.0 / 3f64.sqrt() * 0.5f64.exp() * inside.sqrt();
            let got = theoretical_bound(&p, cut).unwrap().value;
            assert!((got - want).abs() < 1e-12 * want, "{cut}: {got} vs {want}");
        }
        let far = BoundParams::new(1, BoundVariant::Open { x0: vec![5.0], r: 1.0 }).unwrap();
        assert!(!theoretical_bound(&far, 0).unwrap().applicable);
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0).abs() < 1e-15);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(BoundParams::new(1, BoundVariant::Thick { l: 1.0, gamma: 1.5 }).is_err());
        assert!(BoundParams::new(1, BoundVariant::Density { delta: 0.0, r0: 0.0 }).is_err());
        assert!(BoundParams::new(2, BoundVariant::Open { x0: vec![0.0], r: 1.0 }).is_err());
    }
}
