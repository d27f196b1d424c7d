use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::symbol::QuadraticSymbol;
use crate::error::{Error, Result};
use crate::linalg::exact::{kernel, mat_mul, rational_from_f64, Rational};
use crate::linalg::Mat;

/// `F` with `q(X, Y) = σ(X, FY)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonMap {
    pub n: usize,
    pub f: Mat<Complex64>,
    pub re: Mat<f64>,
    pub im: Mat<f64>,
    /// Largest `|σ(e_i, F e_j) − q(e_i, e_j)|` over canonical pairs.
    pub identity_defect: f64,
}

/// `σ((x, ξ), (y, η)) = ⟨ξ, y⟩ − ⟨x, η⟩`.
pub fn symplectic(n: usize, a: &[Complex64], b: &[Complex64]) -> Complex64 {
    (0..n).map(|j| a[n + j] * b[j] - a[j] * b[n + j]).sum()
}

pub const HAMILTON_TOL: f64 = 1e-12;

/// With `Q = [[Qxx, Qxξ], [Qξx, Qξξ]]` the second derivatives of `q` are
/// `2Q`, so `F = [[Qξx, Qξξ], [−Qxx, −Qxξ]]`.
pub fn hamilton_map(q: &QuadraticSymbol) -> Result<HamiltonMap> {
    let n = q.n;
    let m = 2 * n;
    for i in 0..m {
        for j in 0..i {
            if (q.q[(i, j)] - q.q[(j, i)]).norm() > 1e-14 * q.q.max_abs().max(1.0) {
                return Err(Error::domain("Hamilton map needs a symmetric Q"));
            }
        }
    }
    let f = Mat::from_fn(m, m, |i, j| {
        let (bi, ii) = (i / n, i % n);
        let (bj, jj) = (j / n, j % n);
        match (bi, bj) {
            (0, 0) => q.q[(n + ii, jj)],
            (0, 1) => q.q[(n + ii, n + jj)],
            (1, 0) => -q.q[(ii, jj)],
            _ => -q.q[(ii, n + jj)],
        }
    });
    let mut defect = 0.0f64;
    let unit = |k: usize| -> Vec<Complex64> {
        (0..m).map(|i| Complex64::new(if i == k { 1.0 } else { 0.0 }, 0.0)).collect()
    };
    for a in 0..m {
        for b in 0..m {
            let fy = f.matvec(&unit(b));
            let lhs = symplectic(n, &unit(a), &fy);
            defect = defect.max((lhs - q.q[(a, b)]).norm());
        }
    }
    if defect > HAMILTON_TOL * q.q.max_abs().max(1.0) {
        return Err(Error::numerical(format!("σ(X, FY) differs from q(X, Y) by {defect:e}")));
    }
    Ok(HamiltonMap { n, re: f.map(|z| z.re), im: f.map(|z| z.im), f, identity_defect: defect })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularSpace {
    /// Orthonormal basis of `S` (each vector of length `2n`).
    pub basis: Vec<Vec<f64>>,
    /// Smallest `j` with a trivial intersection, `None` if `S ≠ {0}`.
    pub k0: Option<usize>,
    /// Dimension of `∩_{i≤j} Ker[ReF(ImF)^i]` for `j = 0..2n−1`.
    pub kernel_dims: Vec<usize>,
    /// Relative rank tolerance.
    pub tol: f64,
    /// Some singular value lies within a factor 10 of the threshold.
    pub tolerance_sensitive: bool,
    /// Answers at `tol/10` and `10·tol` when sensitive: `(dim S, k0)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alternatives: Option<[(usize, Option<usize>); 2]>,
    pub method: String,
}

impl SingularSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }
}

pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Stacked matrices `[ReF; ReF·ImF; …; ReF(ImF)^j]` for `j = 0..2n−1`.
fn stacks(h: &HamiltonMap) -> Vec<DMatrix<f64>> {
    let m = 2 * h.n;
    let re = DMatrix::from_fn(m, m, |i, j| h.re[(i, j)]);
    let im = DMatrix::from_fn(m, m, |i, j| h.im[(i, j)]);
    let mut blocks: Vec<DMatrix<f64>> = Vec::new();
    let mut power = DMatrix::<f64>::identity(m, m);
    let mut out = Vec::new();
    for _ in 0..m {
        blocks.push(&re * &power);
        power = &power * &im;
        let mut stack = DMatrix::<f64>::zeros(blocks.len() * m, m);
        for (b, blk) in blocks.iter().enumerate() {
            stack.view_mut((b * m, 0), (m, m)).copy_from(blk);
        }
        out.push(stack);
    }
    out
}

struct KernelAt {
    dims: Vec<usize>,
    basis: Vec<Vec<f64>>,
    sensitive: bool,
}

fn kernels(stacks: &[DMatrix<f64>], tol: f64) -> KernelAt {
    let mut dims = Vec::new();
    let mut basis = Vec::new();
    let mut sensitive = false;
    for stack in stacks {
        let m = stack.ncols();
        let svd = stack.clone().svd(false, true);
        let sv = &svd.singular_values;
        let top = sv.iter().cloned().fold(0.0f64, f64::max);
        let thr = tol * top;
        if sv.iter().any(|&s| s > thr / 10.0 && s <= thr * 10.0 && top > 0.0) {
            sensitive = true;
        }
        let vt = svd.v_t.expect("requested V");
        let null: Vec<Vec<f64>> = (0..sv.len())
            .filter(|&k| sv[k] <= thr)
            .map(|k| (0..m).map(|c| vt[(k, c)]).collect())
            .collect();
        dims.push(null.len());
        basis = null;
    }
    KernelAt { dims, basis, sensitive }
}

fn first_trivial(dims: &[usize]) -> Option<usize> {
    dims.iter().position(|&d| d == 0)
}

/// `S = ∩_{j<2n} Ker[ReF(ImF)^j] ∩ ℝ^{2n}` by singular value decompositions
/// of the stacked matrices, with rank threshold `tol·‖stack‖₂`.
pub fn singular_space(h: &HamiltonMap, tol: f64) -> Result<SingularSpace> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("rank tolerance {tol} must be positive")));
    }
    let st = stacks(h);
    let main = kernels(&st, tol);
    let alternatives = if main.sensitive {
        let strict = kernels(&st, tol / 10.0);
        let loose = kernels(&st, tol * 10.0);
        Some([
            (*strict.dims.last().unwrap_or(&0), first_trivial(&strict.dims)),
            (*loose.dims.last().unwrap_or(&0), first_trivial(&loose.dims)),
        ])
    } else {
        None
    };
    Ok(SingularSpace {
        k0: first_trivial(&main.dims),
        basis: main.basis,
        kernel_dims: main.dims,
        tol,
        tolerance_sensitive: main.sensitive,
        alternatives,
        method: "svd".into(),
    })
}

fn rational_matrix(m: &Mat<f64>) -> Vec<Vec<Rational>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| rational_from_f64(m[(i, j)])).collect()).collect()
}

/// Same space in exact rational arithmetic: every `f64` entry of `Q` is a
/// dyadic rational, so no rank decision involves a tolerance.
pub fn singular_space_exact(h: &HamiltonMap) -> SingularSpace {
    let m = 2 * h.n;
    let re = rational_matrix(&h.re);
    let im = rational_matrix(&h.im);
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut block = re.clone();
    let mut dims = Vec::new();
    let mut last = Vec::new();
    for _ in 0..m {
        rows.extend(block.iter().cloned());
        last = kernel(&rows, m);
        dims.push(last.len());
        block = mat_mul(&block, &im);
    }
    // Orthonormalize the rational kernel basis in floating point.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in &last {
        let mut w: Vec<f64> = v.iter().map(|r| r.to_f64().unwrap_or(0.0)).collect();
        for b in &basis {
            let d: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
            w.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
        }
        let nrm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm > 0.0 {
            basis.push(w.into_iter().map(|x| x / nrm).collect());
        }
    }
    debug_assert!(last.iter().all(|v| v.iter().any(|x| !x.is_zero())));
    SingularSpace {
        k0: first_trivial(&dims),
        basis,
        kernel_dims: dims,
        tol: 0.0,
        tolerance_sensitive: false,
        alternatives: None,
        method: "exact_rational".into(),
    }
}
