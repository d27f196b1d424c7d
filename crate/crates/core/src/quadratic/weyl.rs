use num_complex::Complex;

use super::symbol::QuadraticSymbol;
use crate::error::Result;
use crate::hermite::{apply_linear, Basis, HermiteExpansion};
use crate::linalg::Mat;
use crate::scalar::Real;

/// Matrix `A_{βα} = ⟨Φ_β, q^w Φ_α⟩` on `E_N`.
#[derive(Clone, Debug)]
pub struct GalerkinOperator<T: Real> {
    pub n: usize,
    pub cutoff: usize,
    pub matrix: Mat<Complex<T>>,
    pub symbol: QuadraticSymbol,
}

/// `(c₊, c₋)` with `X̂_i = c₊ a_{k,+} + c₋ a_{k,−}`: positions are
/// `(a₊ + a₋)/√2`, momenta `D = i(a₊ − a₋)/√2`.
fn ladder_coefficients<T: Real>(n: usize, i: usize) -> (usize, Complex<T>, Complex<T>) {
    let s = T::half().sqrt();
    if i < n {
        (i, Complex::new(s.clone(), T::zero()), Complex::new(s, T::zero()))
    } else {
        (i - n, Complex::new(T::zero(), s.clone()), Complex::new(T::zero(), -s))
    }
}

/// Weyl quantization on `E_N`. Symmetry of `Q` makes
/// `Σ Q_ij X̂_iX̂_j` equal to the symmetrized ordering, and composing on the
/// buffered cutoff `N+2` keeps every entry exact.
pub fn weyl_quantize<T: Real>(q: &QuadraticSymbol, cutoff: usize) -> Result<GalerkinOperator<T>> {
    let n = q.n;
    let m = 2 * n;
    let basis = Basis::get(n, cutoff);
    let dim = basis.len();
    let qt: Vec<Vec<Complex<T>>> = (0..m)
        .map(|i| (0..m).map(|j| Complex::new(T::from_f64(q.q[(i, j)].re), T::from_f64(q.q[(i, j)].im))).collect())
        .collect();
    let coeffs: Vec<(usize, Complex<T>, Complex<T>)> = (0..m).map(|i| ladder_coefficients::<T>(n, i)).collect();
    let mut matrix = Mat::from_fn(dim, dim, |_, _| Complex::new(T::zero(), T::zero()));
    for (p, alpha) in basis.indices.iter().enumerate() {
        let e = HermiteExpansion::<T>::basis_vector(n, cutoff, alpha, Complex::new(T::one(), T::zero()))?;
        for j in 0..m {
            if (0..m).all(|i| q.q[(i, j)].norm() == 0.0) {
                continue;
            }
            let (aj, pj, mj) = &coeffs[j];
            let v = apply_linear(&e, *aj, pj, mj, cutoff + 1)?;
            for i in 0..m {
                if q.q[(i, j)].norm() == 0.0 {
                    continue;
                }
                let (ai, pi, mi) = &coeffs[i];
                let w = apply_linear(&v, *ai, pi, mi, cutoff + 2)?;
                for (r, c) in w.coeffs()[..dim].iter().enumerate() {
                    matrix[(r, p)] += qt[i][j].clone() * c.clone();
                }
            }
        }
    }
    Ok(GalerkinOperator { n, cutoff, matrix, symbol: q.clone() })
}

impl<T: Real> GalerkinOperator<T> {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `min Re⟨Ac, c⟩/‖c‖²`, the smallest eigenvalue of the Hermitian part.
    pub fn accretivity_margin(&self) -> T {
        crate::linalg::hermitian_extremes(&self.matrix.hermitian_part()).0
    }

    pub fn apply(&self, f: &HermiteExpansion<T>) -> Result<HermiteExpansion<T>> {
        if f.cutoff() != self.cutoff || f.dim() != self.n {
            return Err(crate::error::Error::contract("expansion does not live on the operator's space"));
        }
        HermiteExpansion::new(self.n, self.cutoff, self.matrix.matvec(f.coeffs()))
    }

    pub fn map_real<U: Real>(&self, f: impl Fn(&T) -> U) -> GalerkinOperator<U> {
        GalerkinOperator {
            n: self.n,
            cutoff: self.cutoff,
            matrix: self.matrix.map(|z| Complex::new(f(&z.re), f(&z.im))),
            symbol: self.symbol.clone(),
        }
    }
}
