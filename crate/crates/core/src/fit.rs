//! Ordinary least squares for `y ≈ a + b·x`.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Residual sum of squares.
    pub rss: f64,
    pub r_squared: f64,
    pub points: usize,
}

impl LinearFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Fits `y = a + b x`. Returns `None` with fewer than two distinct abscissae.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let m = x.len().min(y.len());
    if m < 2 {
        return None;
    }
    let mx = x[..m].iter().sum::<f64>() / m as f64;
    let my = y[..m].iter().sum::<f64>() / m as f64;
    let sxx: f64 = x[..m].iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x[..m].iter().zip(&y[..m]).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x[..m].iter().zip(&y[..m]).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let tss: f64 = y[..m].iter().map(|b| (b - my).powi(2)).sum();
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };
    Some(LinearFit { slope, intercept, rss, r_squared, points: m })
}
