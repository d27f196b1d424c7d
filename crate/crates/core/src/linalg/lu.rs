use super::mat::Mat;
use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};
use num_traits::{One, Zero};

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu<E> {
    lu: Mat<E>,
    perm: Vec<usize>,
}

impl<E: Scalar> Lu<E> {
    pub fn new(a: &Mat<E>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::contract("LU requires a square matrix"));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].modulus();
            for i in k + 1..n {
                let m = lu[(i, k)].modulus();
                if m > best {
                    best = m;
                    p = i;
                }
            }
            if best.is_zero() {
                return Err(Error::numerical(format!("singular matrix at pivot {k}")));
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)].clone();
                    lu[(k, j)] = lu[(p, j)].clone();
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)].clone();
            for i in k + 1..n {
                if lu[(i, k)].is_zero() {
                    continue;
                }
                let f = lu[(i, k)].clone() / pivot.clone();
                lu[(i, k)] = f.clone();
                for j in k + 1..n {
                    let v = f.clone() * lu[(k, j)].clone();
                    lu[(i, j)] -= v;
                }
            }
        }
        Ok(Lu { lu, perm })
    }

    pub fn solve(&self, b: &[E]) -> Vec<E> {
        let n = self.lu.rows();
        let mut x: Vec<E> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                let v = self.lu[(i, j)].clone() * x[j].clone();
                x[i] -= v;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let v = self.lu[(i, j)].clone() * x[j].clone();
                x[i] -= v;
            }
            x[i] = x[i].clone() / self.lu[(i, i)].clone();
        }
        x
    }

    pub fn solve_mat(&self, b: &Mat<E>) -> Mat<E> {
        let n = b.rows();
        let mut out = Mat::zeros(n, b.cols());
        for j in 0..b.cols() {
            let col: Vec<E> = (0..n).map(|i| b[(i, j)].clone()).collect();
            let x = self.solve(&col);
            for (i, v) in x.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }

    /// Smallest pivot modulus relative to the largest, a cheap conditioning hint.
    pub fn pivot_ratio(&self) -> E::Re {
        let n = self.lu.rows();
        let mut lo: Option<E::Re> = None;
        let mut hi = E::Re::zero();
        for i in 0..n {
            let m = self.lu[(i, i)].modulus();
            if m > hi {
                hi = m.clone();
            }
            lo = Some(match lo {
                Some(l) if l < m => l,
                _ => m,
            });
        }
        match lo {
            Some(l) if !hi.is_zero() => l / hi,
            _ => E::Re::one(),
        }
    }
}

pub fn solve<E: Scalar>(a: &Mat<E>, b: &[E]) -> Result<Vec<E>> {
    Ok(Lu::new(a)?.solve(b))
}

pub fn inverse<E: Scalar>(a: &Mat<E>) -> Result<Mat<E>> {
    Ok(Lu::new(a)?.solve_mat(&Mat::identity(a.rows())))
}

/// Cholesky factor `L` (lower, real positive diagonal) of a Hermitian
/// positive definite matrix.
pub fn cholesky<E: Scalar>(a: &Mat<E>) -> Result<Mat<E>> {
    let n = a.rows();
    let mut l = Mat::<E>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re();
        for k in 0..j {
            d -= l[(j, k)].abs_sqr();
        }
        if !(d > E::Re::zero()) {
            return Err(Error::numerical(format!("matrix not positive definite at column {j}")));
        }
        let djj = d.sqrt();
        l[(j, j)] = E::from_re(djj.clone());
        for i in j + 1..n {
            let mut s = a[(i, j)].clone();
            for k in 0..j {
                let v = l[(i, k)].clone() * l[(j, k)].conj();
                s -= v;
            }
            l[(i, j)] = s.mul_re(&(E::Re::one() / djj.clone()));
        }
    }
    Ok(l)
}

/// Solves `L X = B` for lower-triangular `L`.
pub fn solve_lower<E: Scalar>(l: &Mat<E>, b: &Mat<E>) -> Mat<E> {
    let n = l.rows();
    let mut x = b.clone();
    for c in 0..b.cols() {
        for i in 0..n {
            let mut s = x[(i, c)].clone();
            for k in 0..i {
                let v = l[(i, k)].clone() * x[(k, c)].clone();
                s -= v;
            }
            x[(i, c)] = s / l[(i, i)].clone();
        }
    }
    x
}
