//! Exact rational linear algebra for kernel computations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// Exact rational value of a finite `f64`.
pub fn rational_from_f64(x: f64) -> Rational {
    BigRational::from_float(x).unwrap_or_else(Rational::zero)
}

pub fn rational(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / m[r][c].clone();
        for v in m[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let delta = f.clone() * m[r][j].clone();
                    m[i][j] = m[i][j].clone() - delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the right kernel `{v : M v = 0}`.
pub fn kernel(m: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut work: Vec<Vec<Rational>> = m.to_vec();
    let pivots = rref(&mut work);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -work[row][f].clone();
            }
            v
        })
        .collect()
}

pub fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let k = b.len();
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    let mut s = Rational::zero();
                    for p in 0..k {
                        if !row[p].is_zero() && !b[p][j].is_zero() {
                            s += row[p].clone() * b[p][j].clone();
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn max_abs(m: &[Vec<Rational>]) -> Rational {
    let mut best = Rational::zero();
    for row in m {
        for v in row {
            if v.abs() > best {
                best = v.abs();
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_rank_one() {
        let m = vec![vec![rational(1, 1), rational(2, 1), rational(3, 1)], vec![rational(2, 1), rational(4, 1), rational(6, 1)]];
        let k = kernel(&m, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: Rational = (0..3).map(|j| m[0][j].clone() * v[j].clone()).sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn float_conversion_is_exact() {
        assert_eq!(rational_from_f64(0.5), rational(1, 2));
        assert_eq!(rational_from_f64(-0.25), rational(-1, 4));
    }
}
