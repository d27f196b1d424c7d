use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::Basis;
use crate::linalg::Mat;
use crate::regions::{entry_truncation_error, interval_block, interval_block_f64, truncate_radius, IntervalBlock, Region};
use crate::scalar::{with_precision, Mp, Real};

/// Smallest truncation safety factor accepted by [`gram_matrix`].
pub const MIN_SAFETY: f64 = 1.5;

/// `G_{αβ} = ∫_ω Φ_αΦ_β` on `E_N`.
#[derive(Clone, Debug)]
pub struct GramOperator<T> {
    pub n: usize,
    pub cutoff: usize,
    pub matrix: Mat<T>,
    /// Worst absolute error of an entry from quadrature and rounding.
    pub entry_error: f64,
    /// Bound on `|∫_{ω∖boxes} Φ_αΦ_β|` when ω was truncated, else 0.
    pub truncation_error: f64,
    pub region: Region,
    /// Mantissa width the entries were computed with.
    pub precision_bits: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramSummary {
    pub n: usize,
    pub cutoff: usize,
    pub dim: usize,
    pub entry_error: f64,
    pub truncation_error: f64,
    pub precision_bits: u32,
    pub boxes: usize,
}

impl<T: Real> GramOperator<T> {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn summary(&self) -> GramSummary {
        GramSummary {
            n: self.n,
            cutoff: self.cutoff,
            dim: self.dim(),
            entry_error: self.entry_error,
            truncation_error: self.truncation_error,
            precision_bits: self.precision_bits,
            boxes: self.region.boxes.len(),
        }
    }

    /// `max |G − Gᵀ|`.
    pub fn symmetry_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut worst = 0.0f64;
        for i in 0..m.rows() {
            for j in 0..i {
                worst = worst.max((m[(i, j)].clone() - m[(j, i)].clone()).abs().to_f64());
            }
        }
        worst
    }

    /// `cᵀGc` for a real coefficient vector.
    pub fn quadratic_form(&self, c: &[T]) -> T {
        let m = &self.matrix;
        let mut acc = T::zero();
        for i in 0..m.rows() {
            let mut row = T::zero();
            for j in 0..m.cols() {
                row += m[(i, j)].clone() * c[j].clone();
            }
            acc += c[i].clone() * row;
        }
        acc
    }
}

/// Neumaier summation in iteration order for any real type.
pub fn compensated<T: Real>(terms: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut c = T::zero();
    for v in terms {
        let t = sum.clone() + v.clone();
        if sum.abs() >= v.abs() {
            c += (sum.clone() - t.clone()) + v;
        } else {
            c += (v - t.clone()) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Rejects regions cut off closer than `1.5·c_n√(N+1)`.
pub fn check_truncation(region: &Region, cutoff: usize) -> Result<f64> {
    match region.truncation {
        None => Ok(0.0),
        Some(r) => {
            let need = truncate_radius(cutoff, region.n, MIN_SAFETY)?;
            if r < need * (1.0 - 1e-12) {
                return Err(Error::contract(format!(
                    "region truncated at radius {r} but N = {cutoff} in dimension {} requires radius ≥ {need}",
                    region.n
                )));
            }
            // ω∖boxes lies outside B(0, R), hence in ∪_i {|x_i| ≥ R/√n}.
            Ok(entry_truncation_error(region.n, cutoff, r / (region.n as f64).sqrt()))
        }
    }
}

/// Gram operator in `f64`: Wronskian off-diagonal entries and adaptive
/// Gauss-Legendre panels on the diagonal of each one-dimensional factor.
pub fn gram_matrix(region: &Region, n: usize, cutoff: usize) -> Result<GramOperator<f64>> {
    gram_matrix_with(region, n, cutoff, 53, interval_block_f64)
}

/// Gram operator in software floating point with `bits` of mantissa.
pub fn gram_matrix_mp(region: &Region, n: usize, cutoff: usize, bits: u32) -> Result<GramOperator<Mp>> {
    gram_matrix_with(region, n, cutoff, bits, interval_block::<Mp>)
}

/// Tensorized assembly from per-axis interval blocks. The same interval on
/// the same axis is integrated once; every entry sums its box contributions
/// in box order with compensation, so results do not depend on scheduling.
pub fn gram_matrix_with<T: Real>(
    region: &Region,
    n: usize,
    cutoff: usize,
    bits: u32,
    block: fn(f64, f64, usize) -> IntervalBlock<T>,
) -> Result<GramOperator<T>> {
    if region.n != n {
        return Err(Error::contract(format!("region has dimension {} but n = {n}", region.n)));
    }
    let truncation_error = check_truncation(region, cutoff)?;
    let basis = Basis::get(n, cutoff);
    let dim = basis.len();

    let mut keys: Vec<(u64, u64)> = Vec::new();
    let mut slot: HashMap<(u64, u64), usize> = HashMap::new();
    let box_slots: Vec<Vec<usize>> = region
        .boxes
        .iter()
        .map(|b| {
            (0..n)
                .map(|i| {
                    let key = (b.lo[i].to_bits(), b.hi[i].to_bits());
                    *slot.entry(key).or_insert_with(|| {
                        keys.push(key);
                        keys.len() - 1
                    })
                })
                .collect()
        })
        .collect();
    let blocks: Vec<IntervalBlock<T>> = keys
        .par_iter()
        .map(|&(a, b)| with_precision(bits, || block(f64::from_bits(a), f64::from_bits(b), cutoff)))
        .collect();

    let eps = T::epsilon().to_f64();
    let rows: Vec<(Vec<T>, f64)> = (0..dim)
        .into_par_iter()
        .map(|p| {
            with_precision(bits, || {
                let alpha = &basis.indices[p];
                let mut row = Vec::with_capacity(p + 1);
                let mut worst = 0.0f64;
                for q in 0..=p {
                    let beta = &basis.indices[q];
                    let mut err = 0.0;
                    let mut mag = 0.0;
                    let terms = box_slots.iter().map(|slots| {
                        let mut prod = T::one();
                        for (i, &s) in slots.iter().enumerate() {
                            let (a, b) = (alpha.get(i) as usize, beta.get(i) as usize);
                            prod *= blocks[s].values[(a, b)].clone();
                            // Each one-dimensional factor is at most 1 in modulus.
                            err += blocks[s].errors[(a, b)];
                        }
                        mag += prod.to_f64().abs();
                        prod
                    });
                    let v = compensated(terms.collect::<Vec<_>>());
                    worst = worst.max(err + 4.0 * (n + 1) as f64 * eps * mag);
                    row.push(v);
                }
                (row, worst)
            })
        })
        .collect();

    let mut matrix = Mat::from_fn(dim, dim, |_, _| T::zero());
    let mut entry_error = 0.0f64;
    for (p, (row, worst)) in rows.into_iter().enumerate() {
        entry_error = entry_error.max(worst);
        for (q, v) in row.into_iter().enumerate() {
            matrix[(q, p)] = v.clone();
            matrix[(p, q)] = v;
        }
    }
    Ok(GramOperator { n, cutoff, matrix, entry_error, truncation_error, region: region.clone(), precision_bits: bits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::{explicit, full_space, half_space, Cuboid};

    #[test]
    fn full_plane_is_identity() {
        let r = truncate_radius(3, 2, 2.0).unwrap();
        let g = gram_matrix(&full_space(2, r).unwrap(), 2, 3).unwrap();
        assert_eq!(g.dim(), 10);
        for i in 0..10 {
            for j in 0..10 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g.matrix[(i, j)] - want).abs() < 1e-10, "({i},{j})");
            }
        }
        assert!(g.truncation_error < 1e-10);
    }

    #[test]
    fn half_line_two_by_two() {
        let g = gram_matrix(&half_space(1, 0, 0.0, 40.0).unwrap(), 1, 1).unwrap();
        let off = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((g.matrix[(0, 0)] - 0.5).abs() < 1e-12);
        assert!((g.matrix[(1, 1)] - 0.5).abs() < 1e-12);
        assert!((g.matrix[(0, 1)] - off).abs() < 1e-12);
        assert_eq!(g.symmetry_defect(), 0.0);
    }

    #[test]
    fn empty_region_gives_zero() {
        let g = gram_matrix(&Region::empty(2), 2, 2).unwrap();
        assert!(g.matrix.as_slice().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn short_truncation_is_refused_with_radius() {
        let err = gram_matrix(&half_space(1, 0, 0.0, 3.0).unwrap(), 1, 20).unwrap_err();
        let need = truncate_radius(20, 1, MIN_SAFETY).unwrap();
        assert!(err.to_string().contains(&format!("{need}")), "{err}");
    }

    #[test]
    fn two_dimensional_boxes_tensorize() {
        use crate::hermite::eval_hermite_1d;
        use crate::linalg::adaptive_scalar;
        let b = Cuboid::new(vec![-0.4, 0.2], vec![1.1, 1.7]).unwrap();
        let g = gram_matrix(&explicit(2, vec![b]).unwrap(), 2, 3).unwrap();
        let basis = Basis::get(2, 3);
        let one_d = |j: usize, k: usize, a: f64, b: f64| {
            adaptive_scalar(|x| eval_hermite_1d(j, &x) * eval_hermite_1d(k, &x), a, b, 1e-15).0
        };
        for (p, al) in basis.indices.iter().enumerate() {
            for (q, be) in basis.indices.iter().enumerate() {
                let want = one_d(al.get(0) as usize, be.get(0) as usize, -0.4, 1.1)
                    * one_d(al.get(1) as usize, be.get(1) as usize, 0.2, 1.7);
                assert!((g.matrix[(p, q)] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn extended_precision_assembly_agrees() {
        let region = crate::regions::make_periodic_thick(1, 1.0, 0.5, truncate_radius(12, 1, 1.5).unwrap()).unwrap();
        let g = gram_matrix(&region, 1, 12).unwrap();
        let h = gram_matrix_mp(&region, 1, 12, 200).unwrap();
        for i in 0..13 {
            for j in 0..13 {
                assert!((g.matrix[(i, j)] - h.matrix[(i, j)].to_f64()).abs() <= g.entry_error + 1e-15);
            }
        }
        assert!(h.entry_error < 1e-50);
    }
}
