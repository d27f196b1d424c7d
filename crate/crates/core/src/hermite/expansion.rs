use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::eval::hermite_column;
use super::multiindex::{space_dim, Basis, MultiIndex};
use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

/// `f = Σ_{|α|≤N} c_α Φ_α ∈ E_N`, coefficients in graded-lex order.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteExpansion<T: Real> {
    n: usize,
    cutoff: usize,
    coeffs: Vec<Complex<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectionMode {
    /// `ℙ_k`: keep `|α| = k`.
    Single,
    /// `π_k`: keep `|α| ≤ k`.
    Cumulative,
}

impl<T: Real> HermiteExpansion<T> {
    pub fn new(n: usize, cutoff: usize, coeffs: Vec<Complex<T>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("dimension must be positive"));
        }
        let want = space_dim(n, cutoff);
        if coeffs.len() != want {
            return Err(Error::contract(format!("expected {want} coefficients, got {}", coeffs.len())));
        }
        Ok(HermiteExpansion { n, cutoff, coeffs })
    }

    pub fn zeros(n: usize, cutoff: usize) -> Self {
        HermiteExpansion { n, cutoff, coeffs: vec![Complex::zero(); space_dim(n, cutoff)] }
    }

    /// `c·Φ_α`.
    pub fn basis_vector(n: usize, cutoff: usize, alpha: &MultiIndex, c: Complex<T>) -> Result<Self> {
        let mut f = Self::zeros(n, cutoff);
        let pos = f
            .basis()
            .position(alpha)
            .ok_or_else(|| Error::contract(format!("{alpha:?} is not in E_{cutoff}")))?;
        f.coeffs[pos] = c;
        Ok(f)
    }

    pub fn from_real(n: usize, cutoff: usize, coeffs: Vec<T>) -> Result<Self> {
        Self::new(n, cutoff, coeffs.into_iter().map(|c| Complex::new(c, T::zero())).collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex<T>> {
        self.coeffs
    }

    pub fn basis(&self) -> Arc<Basis> {
        Basis::get(self.n, self.cutoff)
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Complex<T> {
        match self.basis().position(alpha) {
            Some(p) => self.coeffs[p].clone(),
            None => Complex::zero(),
        }
    }

    /// `‖f‖²_{L²(ℝⁿ)} = Σ|c_α|²`.
    pub fn norm_sqr(&self) -> T {
        let mut s = T::zero();
        for c in &self.coeffs {
            s += c.abs_sqr();
        }
        s
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// `⟨self, other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        let mut acc = Complex::zero();
        let b = other.basis();
        for (alpha, c) in self.basis().indices.iter().zip(&self.coeffs) {
            if let Some(p) = b.position(alpha) {
                acc += Scalar::conj(c) * other.coeffs[p].clone();
            }
        }
        acc
    }

    /// Re-indexes into `E_M`, dropping modes above `M` or padding with zeros.
    pub fn with_cutoff(&self, cutoff: usize) -> Self {
        let len = space_dim(self.n, cutoff);
        let mut coeffs: Vec<Complex<T>> = self.coeffs.iter().take(len).cloned().collect();
        coeffs.resize(len, Complex::zero());
        HermiteExpansion { n: self.n, cutoff, coeffs }
    }

    pub fn project_energy(&self, k: usize, mode: ProjectionMode) -> Self {
        let basis = self.basis();
        let coeffs = basis
            .indices
            .iter()
            .zip(&self.coeffs)
            .map(|(a, c)| {
                let keep = match mode {
                    ProjectionMode::Single => a.order() == k,
                    ProjectionMode::Cumulative => a.order() <= k,
                };
                if keep {
                    c.clone()
                } else {
                    Complex::zero()
                }
            })
            .collect();
        HermiteExpansion { n: self.n, cutoff: self.cutoff, coeffs }
    }

    pub fn scale(&self, s: &Complex<T>) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c.clone() * s.clone()).collect();
        HermiteExpansion { n: self.n, cutoff: self.cutoff, coeffs }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(HermiteExpansion { n: self.n, cutoff: self.cutoff, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() - b.clone()).collect();
        Ok(HermiteExpansion { n: self.n, cutoff: self.cutoff, coeffs })
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.cutoff != other.cutoff {
            return Err(Error::contract(format!(
                "expansion shapes differ: (n={}, N={}) vs (n={}, N={})",
                self.n, self.cutoff, other.n, other.cutoff
            )));
        }
        Ok(())
    }

    /// `f(x) = Σ c_α Π_j φ_{α_j}(x_j)`, sharing the 1D columns across `α`.
    pub fn eval(&self, x: &[T]) -> Result<Complex<T>> {
        if x.len() != self.n {
            return Err(Error::contract(format!("point has {} coordinates, expected {}", x.len(), self.n)));
        }
        let cols: Vec<Vec<T>> = x.iter().map(|xi| hermite_column(self.cutoff, xi)).collect();
        let mut acc = Complex::zero();
        for (alpha, c) in self.basis().indices.iter().zip(&self.coeffs) {
            let mut w = T::one();
            for (j, &a) in alpha.0.iter().enumerate() {
                w *= cols[j][a as usize].clone();
            }
            acc += c.mul_re(&w);
        }
        Ok(acc)
    }
}

/// JSON record `{n, N, order: "grlex", coeffs: [[re, im], …]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionRecord {
    pub n: usize,
    #[serde(rename = "N")]
    pub cutoff: usize,
    pub order: String,
    pub coeffs: Vec<[f64; 2]>,
}

impl HermiteExpansion<f64> {
    pub fn to_record(&self) -> ExpansionRecord {
        ExpansionRecord {
            n: self.n,
            cutoff: self.cutoff,
            order: "grlex".into(),
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }

    pub fn from_record(r: &ExpansionRecord) -> Result<Self> {
        if r.order != "grlex" {
            return Err(Error::domain(format!("unsupported coefficient order '{}'", r.order)));
        }
        Self::new(r.n, r.cutoff, r.coeffs.iter().map(|c| Complex::new(c[0], c[1])).collect())
    }
}

impl<T: Real> HermiteExpansion<T> {
    /// Converts coefficient precision through `f64`-exact values.
    pub fn map_real<U: Real>(&self, f: impl Fn(&T) -> U) -> HermiteExpansion<U> {
        HermiteExpansion {
            n: self.n,
            cutoff: self.cutoff,
            coeffs: self.coeffs.iter().map(|c| Complex::new(f(&c.re), f(&c.im))).collect(),
        }
    }
}
