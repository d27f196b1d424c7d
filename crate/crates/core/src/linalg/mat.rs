use std::ops::{Index, IndexMut};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::{Real, Scalar};
use num_traits::Zero;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E> Index<(usize, usize)> for Mat<E> {
    type Output = E;
    fn index(&self, (i, j): (usize, usize)) -> &E {
        &self.data[i * self.cols + j]
    }
}

impl<E> IndexMut<(usize, usize)> for Mat<E> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        &mut self.data[i * self.cols + j]
    }
}

impl<E> Mat<E> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[E] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<E>) -> Self {
        assert_eq!(data.len(), rows * cols, "shape mismatch");
        Mat { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn map<F>(&self, f: impl Fn(&E) -> F) -> Mat<F> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<E: Scalar> Mat<E> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![E::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = E::one();
        }
        m
    }

    pub fn diag(d: &[E]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn matmul(&self, other: &Mat<E>) -> Mat<E> {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let (m, k, n) = (self.rows, self.cols, other.cols);
        let mut out = vec![E::zero(); m * n];
        for i in 0..m {
            let orow = &mut out[i * n..(i + 1) * n];
            for p in 0..k {
                let a = &self.data[i * k + p];
                if a.is_zero() {
                    continue;
                }
                let brow = &other.data[p * n..(p + 1) * n];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a.clone() * b.clone();
                }
            }
        }
        Mat { rows: m, cols: n, data: out }
    }

    pub fn matvec(&self, v: &[E]) -> Vec<E> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = E::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() {
                        acc += a.clone() * b.clone();
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Mat<E>) -> Mat<E> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Mat<E>) -> Mat<E> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b.clone()).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: &E) -> Mat<E> {
        self.map(|v| v.clone() * s.clone())
    }

    pub fn scale_re(&self, s: &E::Re) -> Mat<E> {
        self.map(|v| v.mul_re(s))
    }

    pub fn add_assign_scaled(&mut self, other: &Mat<E>, s: &E) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b.clone() * s.clone();
        }
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> E::Re {
        let mut best = E::Re::zero();
        for j in 0..self.cols {
            let mut s = E::Re::zero();
            for i in 0..self.rows {
                s += self[(i, j)].modulus();
            }
            if s > best {
                best = s;
            }
        }
        best
    }

    pub fn frobenius(&self) -> E::Re {
        let mut s = E::Re::zero();
        for v in &self.data {
            s += v.abs_sqr();
        }
        s.sqrt()
    }

    pub fn max_abs(&self) -> E::Re {
        let mut best = E::Re::zero();
        for v in &self.data {
            let a = v.modulus();
            if a > best {
                best = a;
            }
        }
        best
    }

    /// `max |A - A^H|` over all entries.
    pub fn hermitian_defect(&self) -> E::Re {
        let mut best = E::Re::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = (self[(i, j)].clone() - self[(j, i)].conj()).modulus();
                if d > best {
                    best = d;
                }
            }
        }
        best
    }

    /// Averages `A` with its adjoint.
    pub fn hermitian_part(&self) -> Mat<E> {
        let half = E::Re::half();
        Mat::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)].clone() + self[(j, i)].conj()).mul_re(&half)
        })
    }

    /// Leading principal `k x k` block.
    pub fn leading(&self, k: usize) -> Mat<E> {
        Mat::from_fn(k, k, |i, j| self[(i, j)].clone())
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Mat<E> {
        Mat::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }
}

impl<T: Real> Mat<T> {
    pub fn to_complex(&self) -> Mat<Complex<T>> {
        self.map(|v| Complex::new(v.clone(), T::zero()))
    }
}

impl<T: Real> Mat<Complex<T>> {
    pub fn re_part(&self) -> Mat<T> {
        self.map(|v| v.re.clone())
    }

    pub fn im_part(&self) -> Mat<T> {
        self.map(|v| v.im.clone())
    }
}

pub fn dot<E: Scalar>(a: &[E], b: &[E]) -> E {
    let mut acc = E::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x.conj() * y.clone();
    }
    acc
}

pub fn norm2<E: Scalar>(v: &[E]) -> E::Re {
    let mut s = E::Re::zero();
    for x in v {
        s += x.abs_sqr();
    }
    s.sqrt()
}

pub fn axpy<E: Scalar>(y: &mut [E], a: &E, x: &[E]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a.clone() * xi.clone();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_and_adjoint() {
        let a = Mat::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]);
        let b = a.matmul(&Mat::identity(2));
        assert_eq!(a, b);
        let c = a.matmul(&a.transpose());
        assert_eq!(c.as_slice(), &[5.0, 11.0, 11.0, 25.0]);
        let z = Mat::from_vec(1, 2, vec![Complex::new(1.0, 2.0), Complex::new(0.0, -1.0)]);
        let zh = z.adjoint();
        assert_eq!(zh[(0, 0)], Complex::new(1.0, -2.0));
        assert_eq!(zh[(1, 0)], Complex::new(0.0, 1.0));
    }

    #[test]
    fn norms() {
        let a: Mat<f64> = Mat::from_vec(2, 2, vec![1.0, -2.0, 3.0, 4.0]);
        assert_eq!(a.norm1(), 6.0);
        assert_eq!(a.max_abs(), 4.0);
        assert!((a.frobenius() - 30f64.sqrt()).abs() < 1e-15);
        assert_eq!(a.hermitian_defect(), 5.0);
    }
}
