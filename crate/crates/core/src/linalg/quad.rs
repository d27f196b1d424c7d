//! Gauss rules and adaptive panel integration.

use super::eigen::SymTridiag;
use crate::hermite::eval::hermite_column;
use crate::scalar::Real;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(k: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = Vec::with_capacity(k);
    let mut weights = Vec::with_capacity(k);
    let legendre = |x: &T| -> (T, T) {
        let mut p0 = T::one();
        let mut p1 = x.clone();
        if k == 0 {
            return (p0, T::zero());
        }
        for j in 2..=k {
            let jj = T::from_usize(j);
            let p2 = (T::from_usize(2 * j - 1) * x.clone() * p1.clone() - T::from_usize(j - 1) * p0) / jj;
            p0 = p1;
            p1 = p2;
        }
        let kk = T::from_usize(k);
        let dp = kk * (x.clone() * p1.clone() - p0) / (x.clone() * x.clone() - T::one());
        (p1, dp)
    };
    let max_newton = 8 + (T::mantissa_bits() as usize) / 16;
    for i in 0..k {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut x = T::from_f64(guess);
        for _ in 0..max_newton {
            let (p, dp) = legendre(&x);
            let dx = p / dp;
            x -= dx.clone();
            if dx.abs() <= T::epsilon() * T::from_f64(4.0) {
                break;
            }
        }
        let (_, dp) = legendre(&x);
        let w = T::two() / ((T::one() - x.clone() * x.clone()) * dp.clone() * dp);
        nodes.push(x);
        weights.push(w);
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// Gauss-Hermite rule in "function form": `∫ h(x) dx ≈ Σ W_i h(x_i)`, exact
/// when `h = P·e^{-x²}` with `deg P ≤ 2k-1`.
pub fn gauss_hermite_function_form<T: Real>(k: usize) -> (Vec<T>, Vec<T>) {
    let jac = SymTridiag {
        d: vec![0.0f64; k],
        e: (1..k).map(|i| (i as f64 / 2.0).sqrt()).collect(),
    };
    let guesses = jac.eigenvalues();
    let mut nodes = Vec::with_capacity(k);
    let mut weights = Vec::with_capacity(k);
    let max_newton = 8 + (T::mantissa_bits() as usize) / 16;
    for g in guesses {
        let mut x = T::from_f64(g);
        for _ in 0..max_newton {
            let col = hermite_column(k, &x);
            let phi_k = col[k].clone();
            let dphi = T::from_usize(2 * k).sqrt() * col[k - 1].clone() - x.clone() * phi_k.clone();
            let dx = phi_k / dphi;
            x -= dx.clone();
            if dx.abs() <= T::epsilon() * T::from_f64(4.0) * (x.abs() + T::one()) {
                break;
            }
        }
        let col = hermite_column(k, &x);
        let w = T::one() / (T::from_usize(k) * col[k - 1].clone() * col[k - 1].clone());
        nodes.push(x);
        weights.push(w);
    }
    (nodes, weights)
}

/// Result of an adaptive vector integration.
#[derive(Clone, Debug)]
pub struct PanelIntegral {
    pub values: Vec<f64>,
    pub abs_error: Vec<f64>,
    pub panels: usize,
    pub order: usize,
}

/// Fixed Gauss-Legendre rule mapped to an interval.
#[derive(Clone, Debug)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn legendre(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre::<f64>(order);
        GaussRule { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (c + h * x, h * w))
    }

    fn apply(&self, f: &mut impl FnMut(f64, &mut [f64]), a: f64, b: f64, dim: usize) -> Vec<f64> {
        let mut acc = vec![0.0; dim];
        let mut buf = vec![0.0; dim];
        for (x, w) in self.mapped(a, b) {
            f(x, &mut buf);
            for (s, v) in acc.iter_mut().zip(&buf) {
                *s += w * v;
            }
        }
        acc
    }
}

/// Adaptive Gauss-Legendre panels for a vector-valued integrand. `f(x, out)`
/// fills `out` with the integrand components. A panel is accepted when the
/// difference between the rule on it and on its two halves is below the
/// per-unit-length share of `tol`; that difference is the reported error.
pub fn adaptive_panels(
    mut f: impl FnMut(f64, &mut [f64]),
    dim: usize,
    a: f64,
    b: f64,
    tol: f64,
    order: usize,
    initial_width: f64,
) -> PanelIntegral {
    let rule = GaussRule::legendre(order);
    let mut values = vec![0.0; dim];
    let mut abs_error = vec![0.0; dim];
    let mut panels = 0;
    if b <= a {
        return PanelIntegral { values, abs_error, panels, order };
    }
    let total = b - a;
    let first = ((total / initial_width).ceil() as usize).max(1);
    let mut stack: Vec<(f64, f64, Vec<f64>, u32)> = Vec::new();
    for i in (0..first).rev() {
        let lo = a + total * i as f64 / first as f64;
        let hi = if i + 1 == first { b } else { a + total * (i + 1) as f64 / first as f64 };
        let est = rule.apply(&mut f, lo, hi, dim);
        stack.push((lo, hi, est, 0));
    }
    while let Some((lo, hi, coarse, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.apply(&mut f, lo, mid, dim);
        let right = rule.apply(&mut f, mid, hi, dim);
        let share = tol * (hi - lo) / total;
        let mut worst = 0.0f64;
        for i in 0..dim {
            worst = worst.max((left[i] + right[i] - coarse[i]).abs());
        }
        if worst <= share || depth >= 40 {
            for i in 0..dim {
                let fine = left[i] + right[i];
                values[i] += fine;
                abs_error[i] += (fine - coarse[i]).abs();
            }
            panels += 2;
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    PanelIntegral { values, abs_error, panels, order }
}

/// Scalar convenience wrapper around [`adaptive_panels`]; returns `(value, error)`.
pub fn adaptive_scalar(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let r = adaptive_panels(|x, out| out[0] = f(x), 1, a, b, tol, 16, (b - a).min(1.0).max(1e-300));
    (r.values[0], r.abs_error[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{with_precision, Mp};

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre::<f64>(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-15);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn legendre_extended_precision() {
        with_precision(256, || {
            let (x, w) = gauss_legendre::<Mp>(8);
            let mut s = Mp::from_f64(0.0);
            for (xi, wi) in x.iter().zip(&w) {
                s += wi.clone() * xi.powi(10);
            }
            let err = (s - Mp::from_ratio(2, 11)).abs().to_f64();
            assert!(err < 1e-70, "{err}");
        });
    }

    #[test]
    fn hermite_rule_weights_sum_to_sqrt_pi() {
        let (x, w) = gauss_hermite_function_form::<f64>(20);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * (-x * x).exp()).sum();
        assert!((s - std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn adaptive_handles_peaks() {
        let (v, e) = adaptive_scalar(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12);
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v - exact).abs() < 1e-9, "{v} vs {exact}");
        assert!(e >= 0.0);
    }
}
