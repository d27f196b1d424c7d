use serde::{Deserialize, Serialize};

use super::Region;
use crate::error::{Error, Result};
use crate::hermite::hermite_column_with_derivative;
use crate::linalg::{adaptive_panels, Mat};
use crate::poly::tail_constant_cn;
use crate::scalar::Real;

pub const DIAGONAL_TOL: f64 = 1e-13;
const PANEL_ORDER: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum QuadMethod {
    WronskianExact,
    PanelGl { order: usize, panels: usize },
    /// Closed-form seed `∫φ_0²` via `erfc`, then `∫φ_{k+1}² = ∫φ_k² − [φ_kφ_{k+1}]/√(2(k+1))`.
    DiagonalRecurrence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureAccount {
    pub value: f64,
    pub abs_error_bound: f64,
    pub method: QuadMethod,
}

/// `∫_a^b φ_jφ_k` for all `j, k ≤ K`.
#[derive(Clone, Debug)]
pub struct IntervalBlock<T> {
    pub a: f64,
    pub b: f64,
    pub values: Mat<T>,
    /// Entrywise absolute error bound (rounding plus quadrature).
    pub errors: Mat<f64>,
    pub diagonal: QuadMethod,
}

/// Neumaier-compensated sum in iteration order.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Off-diagonal Wronskian entries shared by every scalar type:
/// `(φ_jφ_k′ − φ_j′φ_k)′ = 2(j−k)φ_jφ_k`.
fn wronskian_entries<T: Real>(a: &T, b: &T, kmax: usize, values: &mut Mat<T>) -> (Vec<T>, Vec<T>) {
    let (pa, da) = hermite_column_with_derivative(kmax + 1, a);
    let (pb, db) = hermite_column_with_derivative(kmax + 1, b);
    for j in 0..=kmax {
        for k in 0..j {
            let wb = pb[j].clone() * db[k].clone() - db[j].clone() * pb[k].clone();
            let wa = pa[j].clone() * da[k].clone() - da[j].clone() * pa[k].clone();
            let v = (wb - wa) / T::from_usize(2 * (j - k));
            values[(j, k)] = v.clone();
            values[(k, j)] = v;
        }
    }
    (pa, pb)
}

/// Interval Gram block in `f64`: Wronskian off the diagonal, adaptive
/// Gauss-Legendre panels on it.
pub fn interval_block_f64(a: f64, b: f64, kmax: usize) -> IntervalBlock<f64> {
    let mut values = Mat::<f64>::zeros(kmax + 1, kmax + 1);
    let mut errors = Mat::<f64>::zeros(kmax + 1, kmax + 1);
    if b <= a {
        return IntervalBlock { a, b, values, errors, diagonal: QuadMethod::PanelGl { order: PANEL_ORDER, panels: 0 } };
    }
    let _ = wronskian_entries(&a, &b, kmax, &mut values);
    let (pa, da) = hermite_column_with_derivative(kmax, &a);
    let (pb, db) = hermite_column_with_derivative(kmax, &b);
    for j in 0..=kmax {
        for k in 0..j {
            let mag = (pb[j] * db[k]).abs() + (db[j] * pb[k]).abs() + (pa[j] * da[k]).abs() + (da[j] * pa[k]).abs();
            // Evaluation error of the recurrence grows about linearly in the degree.
            let e = 4.0 * (j + 4) as f64 * f64::EPSILON * mag / (2 * (j - k)) as f64 + f64::MIN_POSITIVE;
            errors[(j, k)] = e;
            errors[(k, j)] = e;
        }
    }
    let width = (b - a).min(1.0);
    let r = adaptive_panels(
        |x, out| {
            let col = crate::hermite::hermite_column(kmax, &x);
            for (o, v) in out.iter_mut().zip(col) {
                *o = v * v;
            }
        },
        kmax + 1,
        a,
        b,
        DIAGONAL_TOL,
        PANEL_ORDER,
        width,
    );
    for k in 0..=kmax {
        values[(k, k)] = r.values[k];
        errors[(k, k)] = r.abs_error[k] + 4.0 * (k + 4) as f64 * f64::EPSILON * r.values[k].abs() + f64::MIN_POSITIVE;
    }
    IntervalBlock { a, b, values, errors, diagonal: QuadMethod::PanelGl { order: PANEL_ORDER, panels: r.panels } }
}

/// `∫_a^b φ_0² = (erf b − erf a)/2`, written through `erfc` on one-signed
/// intervals so far tails keep full relative accuracy.
fn ground_mass<T: Real>(a: &T, b: &T) -> T {
    let zero = T::zero();
    if *a >= zero {
        (a.erfc() - b.erfc()) * T::half()
    } else if *b <= zero {
        ((-b.clone()).erfc() - (-a.clone()).erfc()) * T::half()
    } else {
        (b.erf() - a.erf()) * T::half()
    }
}

/// Interval Gram block in any scalar type, without quadrature.
pub fn interval_block<T: Real>(a: f64, b: f64, kmax: usize) -> IntervalBlock<T> {
    let mut values = Mat::from_fn(kmax + 1, kmax + 1, |_, _| T::zero());
    let errors = Mat::<f64>::zeros(kmax + 1, kmax + 1);
    if b > a {
        let (ta, tb) = (T::from_f64(a), T::from_f64(b));
        let (pa, pb) = wronskian_entries(&ta, &tb, kmax, &mut values);
        let mut mass = ground_mass(&ta, &tb);
        for k in 0..=kmax {
            values[(k, k)] = mass.clone();
            let jump = pb[k].clone() * pb[k + 1].clone() - pa[k].clone() * pa[k + 1].clone();
            mass = mass - jump / T::from_usize(2 * (k + 1)).sqrt();
        }
    }
    let mut errors = errors;
    let eps = T::epsilon().to_f64();
    for j in 0..=kmax {
        for k in 0..=kmax {
            errors[(j, k)] = 8.0 * (kmax + 4) as f64 * eps * (1.0 + values[(j, k)].to_f64().abs());
        }
    }
    IntervalBlock { a, b, values, errors, diagonal: QuadMethod::DiagonalRecurrence }
}

/// `∫_ω φ_jφ_k` over a one-dimensional region.
pub fn integrate_pair(region: &Region, j: usize, k: usize) -> Result<QuadratureAccount> {
    let intervals = region.intervals()?;
    let kmax = j.max(k);
    let mut parts = Vec::with_capacity(intervals.len());
    let mut err = 0.0;
    let mut panels = 0;
    for (a, b) in intervals {
        let block = interval_block_f64(a, b, kmax);
        parts.push(block.values[(j, k)]);
        err += block.errors[(j, k)];
        if let QuadMethod::PanelGl { panels: p, .. } = block.diagonal {
            panels += p;
        }
    }
    let method = if j == k { QuadMethod::PanelGl { order: PANEL_ORDER, panels } } else { QuadMethod::WronskianExact };
    Ok(QuadratureAccount { value: compensated_sum(parts), abs_error_bound: err, method })
}

/// `safety · c_n √(N+1)`: outside this radius any `f ∈ E_N` keeps at most
/// a quarter of its mass when `safety = 1`.
pub fn truncate_radius(cutoff: usize, n: usize, safety: f64) -> Result<f64> {
    if !(safety >= 1.0) {
        return Err(Error::domain(format!("safety factor {safety} must be at least 1")));
    }
    Ok(safety * tail_constant_cn(n)?.c_n * ((cutoff + 1) as f64).sqrt())
}

/// Bound on `|∫_{ℝⁿ∖[−R,R]ⁿ} Φ_αΦ_β|` over `|α|, |β| ≤ N`: Cauchy-Schwarz
/// with a union over coordinates of the one-dimensional Hermite tails.
pub fn entry_truncation_error(n: usize, cutoff: usize, r: f64) -> f64 {
    let worst = (0..=cutoff)
        .map(|k| {
            if r >= ((2 * k + 1) as f64).sqrt() {
                let ln_fact: f64 = (2..=k).map(|i| (i as f64).ln()).sum();
                let ln = (k + 1) as f64 * std::f64::consts::LN_2 - ln_fact - 0.5 * std::f64::consts::PI.ln()
                    + (2.0 * k as f64 - 1.0) * r.ln()
                    - r * r;
                ln.exp().min(1.0)
            } else {
                1.0
            }
        })
        .fold(0.0f64, f64::max);
    n as f64 * worst
}
