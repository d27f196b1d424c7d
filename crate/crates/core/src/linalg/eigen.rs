//! Symmetric and Hermitian eigenvalues by Householder reduction to
//! tridiagonal form followed by Sturm-sequence bisection.
//!
//! Bisection keeps full relative accuracy on the tridiagonal matrix, so small
//! eigenvalues come out as accurately as the reduction allows.

use num_complex::Complex;

use super::lu::Lu;
use super::mat::{norm2, Mat};
use crate::error::Result;
use crate::scalar::{Real, Scalar};
use num_traits::{One, Zero};

/// Symmetric tridiagonal matrix: diagonal `d`, off-diagonal `e` (`e[i]` couples `i`, `i+1`).
#[derive(Clone, Debug)]
pub struct SymTridiag<T> {
    pub d: Vec<T>,
    pub e: Vec<T>,
}

pub fn tridiagonalize<T: Real>(a: &Mat<T>) -> SymTridiag<T> {
    let n = a.rows();
    let mut m = a.clone();
    let two = T::two();
    for k in 0..n.saturating_sub(2) {
        let mut sigma = T::zero();
        for i in k + 1..n {
            sigma += m[(i, k)].clone() * m[(i, k)].clone();
        }
        if sigma.is_zero() {
            continue;
        }
        let x0 = m[(k + 1, k)].clone();
        let norm = sigma.sqrt();
        let alpha = if x0 >= T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k + 1..n).map(|i| m[(i, k)].clone()).collect();
        v[0] -= alpha.clone();
        let vtv: T = v.iter().fold(T::zero(), |s, x| s + x.clone() * x.clone());
        if vtv.is_zero() {
            continue;
        }
        let beta = two.clone() / vtv;
        let len = n - k - 1;
        let mut p = vec![T::zero(); len];
        for (i, pi) in p.iter_mut().enumerate() {
            let mut s = T::zero();
            for (j, vj) in v.iter().enumerate() {
                s += m[(k + 1 + i, k + 1 + j)].clone() * vj.clone();
            }
            *pi = s * beta.clone();
        }
        let vp: T = v.iter().zip(&p).fold(T::zero(), |s, (a, b)| s + a.clone() * b.clone());
        let kk = beta.clone() * vp / two.clone();
        let q: Vec<T> = p.iter().zip(&v).map(|(pi, vi)| pi.clone() - kk.clone() * vi.clone()).collect();
        for i in 0..len {
            for j in 0..=i {
                let delta = v[i].clone() * q[j].clone() + q[i].clone() * v[j].clone();
                let val = m[(k + 1 + i, k + 1 + j)].clone() - delta;
                m[(k + 1 + i, k + 1 + j)] = val.clone();
                m[(k + 1 + j, k + 1 + i)] = val;
            }
        }
        m[(k + 1, k)] = alpha.clone();
        m[(k, k + 1)] = alpha;
        for i in k + 2..n {
            m[(i, k)] = T::zero();
            m[(k, i)] = T::zero();
        }
    }
    SymTridiag {
        d: (0..n).map(|i| m[(i, i)].clone()).collect(),
        e: (0..n.saturating_sub(1)).map(|i| m[(i + 1, i)].clone()).collect(),
    }
}

impl<T: Real> SymTridiag<T> {
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: &T) -> usize {
        let n = self.d.len();
        let tiny = T::epsilon() * T::epsilon() * (self.gershgorin_radius() + T::one());
        let mut count = 0;
        let mut q = T::zero();
        for i in 0..n {
            q = if i == 0 {
                self.d[0].clone() - x.clone()
            } else {
                self.d[i].clone()
                    - x.clone()
                    - self.e[i - 1].clone() * self.e[i - 1].clone() / q.clone()
            };
            if q.is_zero() {
                q = -tiny.clone();
            }
            if q < T::zero() {
                count += 1;
            }
        }
        count
    }

    fn gershgorin_radius(&self) -> T {
        let mut r = T::zero();
        for i in 0..self.d.len() {
            let mut s = self.d[i].abs();
            if i > 0 {
                s += self.e[i - 1].abs();
            }
            if i + 1 < self.d.len() {
                s += self.e[i].abs();
            }
            if s > r {
                r = s;
            }
        }
        r
    }

    /// The `k`-th smallest eigenvalue (0-based) to full working accuracy.
    pub fn eigenvalue(&self, k: usize) -> T {
        let r = self.gershgorin_radius();
        let mut lo = -r.clone() - T::one();
        let mut hi = r.clone() + T::one();
        let eps = T::epsilon();
        let floor = eps.clone() * eps.clone() * eps.clone() * (r + T::one());
        let max_iter = 4 * T::mantissa_bits() as usize + 2200;
        for _ in 0..max_iter {
            let mid = (lo.clone() + hi.clone()) * T::half();
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(&mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            let width = hi.clone() - lo.clone();
            let scale = lo.abs().max_of(hi.abs());
            if width <= eps.clone() * scale || width <= floor {
                break;
            }
        }
        (lo + hi) * T::half()
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        (0..self.len()).map(|k| self.eigenvalue(k)).collect()
    }
}

/// All eigenvalues of a real symmetric matrix, ascending.
pub fn sym_eigenvalues<T: Real>(a: &Mat<T>) -> Vec<T> {
    tridiagonalize(a).eigenvalues()
}

/// Smallest and largest eigenvalue of a real symmetric matrix.
pub fn sym_extremes<T: Real>(a: &Mat<T>) -> (T, T) {
    let t = tridiagonalize(a);
    if t.is_empty() {
        return (T::zero(), T::zero());
    }
    (t.eigenvalue(0), t.eigenvalue(t.len() - 1))
}

/// Real symmetric embedding `[[Re, -Im], [Im, Re]]` of a Hermitian matrix.
/// Each eigenvalue of the input appears twice.
pub fn real_embedding<T: Real>(a: &Mat<Complex<T>>) -> Mat<T> {
    let n = a.rows();
    Mat::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, ii) = (i / n, i % n);
        let (bj, jj) = (j / n, j % n);
        let z = &a[(ii, jj)];
        match (bi, bj) {
            (0, 0) | (1, 1) => z.re.clone(),
            (0, 1) => -z.im.clone(),
            _ => z.im.clone(),
        }
    })
}

/// Eigenvalues of a Hermitian matrix over any supported field, ascending.
pub fn hermitian_eigenvalues<E: Scalar>(a: &Mat<E>) -> Vec<E::Re> {
    if E::is_complex() {
        let c = a.map(|z| Complex::new(z.re(), z.im()));
        let all = sym_eigenvalues(&real_embedding(&c));
        all.into_iter().step_by(2).collect()
    } else {
        sym_eigenvalues(&a.map(|z| z.re()))
    }
}

/// `(λ_min, λ_max)` of a Hermitian matrix.
pub fn hermitian_extremes<E: Scalar>(a: &Mat<E>) -> (E::Re, E::Re) {
    if E::is_complex() {
        let c = a.map(|z| Complex::new(z.re(), z.im()));
        sym_extremes(&real_embedding(&c))
    } else {
        sym_extremes(&a.map(|z| z.re()))
    }
}

/// Unit eigenvector for an (approximate) eigenvalue `lambda` by inverse
/// iteration on the shifted matrix.
pub fn eigenvector_for<E: Scalar>(a: &Mat<E>, lambda: &E::Re) -> Result<Vec<E>> {
    let n = a.rows();
    let scale = a.max_abs() + E::Re::one();
    let mut shift = lambda.clone() + scale.clone() * E::Re::epsilon() * E::Re::from_f64(8.0);
    let mut lu = None;
    for _ in 0..8 {
        let mut m = a.clone();
        for i in 0..n {
            m[(i, i)] -= E::from_re(shift.clone());
        }
        if let Ok(f) = Lu::new(&m) {
            lu = Some(f);
            break;
        }
        shift += scale.clone() * E::Re::epsilon() * E::Re::from_f64(64.0);
    }
    let lu = match lu {
        Some(f) => f,
        None => return Err(crate::error::Error::numerical("inverse iteration failed")),
    };
    let mut x: Vec<E> = (0..n)
        .map(|i| E::from_re(E::Re::one() + E::Re::from_f64(((i * 7919) % 113) as f64 / 113.0)))
        .collect();
    for _ in 0..4 {
        let y = lu.solve(&x);
        let nrm = norm2(&y);
        if nrm.is_zero() || !nrm.is_finite() {
            break;
        }
        let inv = E::Re::one() / nrm;
        x = y.into_iter().map(|v| v.mul_re(&inv)).collect();
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{with_precision, Mp};

    fn oracle(a: &Mat<f64>) -> Vec<f64> {
        let n = a.rows();
        let m = nalgebra::DMatrix::from_row_slice(n, n, a.as_slice());
        let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    #[test]
    fn matches_nalgebra_on_dense_symmetric() {
        let n = 9;
        let a = Mat::from_fn(n, n, |i, j| {
            let (i, j) = (i.min(j) as f64, i.max(j) as f64);
            (1.0 + i * 0.37 + j * 0.11).sin() + if i == j { 2.0 } else { 0.0 }
        });
        let ours = sym_eigenvalues(&a);
        for (x, y) in ours.iter().zip(oracle(&a)) {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
    }

    #[test]
    fn hilbert_min_eigenvalue_in_extended_precision() {
        // λ_min of the 10x10 Hilbert matrix is about 1.0931538193797e-13 (mpmath, 60 digits).
        let n = 10;
        let v = with_precision(256, || {
            let h = Mat::from_fn(n, n, |i, j| Mp::from_ratio(1, (i + j + 1) as i64));
            sym_extremes(&h).0.to_f64()
        });
        assert!((v / 1.093_153_819_379_665_8e-13 - 1.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn hermitian_via_embedding() {
        let a = Mat::from_vec(
            2,
            2,
            vec![
                Complex::new(2.0, 0.0),
                Complex::new(0.0, -1.0),
                Complex::new(0.0, 1.0),
                Complex::new(2.0, 0.0),
            ],
        );
        let ev = hermitian_eigenvalues(&a);
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
        let v = eigenvector_for(&a, &ev[0]).unwrap();
        let av = a.matvec(&v);
        for (x, y) in av.iter().zip(&v) {
            assert!((x - y).norm() < 1e-10);
        }
    }
}
