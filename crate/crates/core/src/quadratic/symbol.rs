use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;

/// `q(X) = XᵀQX` on phase space, `X = (x₁…xₙ, ξ₁…ξₙ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticSymbol {
    pub n: usize,
    pub q: Mat<Complex64>,
    pub name: String,
}

/// On-disk form `{n, Q_re, Q_im}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolFile {
    pub n: usize,
    #[serde(rename = "Q_re")]
    pub q_re: Vec<Vec<f64>>,
    #[serde(rename = "Q_im", default)]
    pub q_im: Vec<Vec<f64>>,
}

pub const SYMMETRY_TOL: f64 = 1e-14;

impl QuadraticSymbol {
    pub fn new(n: usize, q: Mat<Complex64>, name: impl Into<String>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("phase-space dimension must be at least 1"));
        }
        if q.rows() != 2 * n || q.cols() != 2 * n {
            return Err(Error::domain(format!("Q must be {0}×{0}, got {1}×{2}", 2 * n, q.rows(), q.cols())));
        }
        let scale = q.max_abs().max(1.0);
        let mut defect = 0.0f64;
        for i in 0..2 * n {
            for j in 0..i {
                defect = defect.max((q[(i, j)] - q[(j, i)]).norm());
            }
        }
        if defect > SYMMETRY_TOL * scale {
            return Err(Error::domain(format!("Q is not symmetric (defect {defect:e})")));
        }
        if q.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("Q has non-finite entries"));
        }
        Ok(QuadraticSymbol { n, q, name: name.into() })
    }

    pub fn from_parts(n: usize, re: &[Vec<f64>], im: &[Vec<f64>], name: &str) -> Result<Self> {
        let m = 2 * n;
        let shape_ok = |a: &[Vec<f64>]| a.len() == m && a.iter().all(|r| r.len() == m);
        if !shape_ok(re) || !(im.is_empty() || shape_ok(im)) {
            return Err(Error::domain(format!("Q_re and Q_im must be {m}×{m}")));
        }
        let q = Mat::from_fn(m, m, |i, j| Complex64::new(re[i][j], if im.is_empty() { 0.0 } else { im[i][j] }));
        QuadraticSymbol::new(n, q, name)
    }

    pub fn from_file(f: &SymbolFile) -> Result<Self> {
        QuadraticSymbol::from_parts(f.n, &f.q_re, &f.q_im, "file")
    }

    pub fn to_file(&self) -> SymbolFile {
        let m = 2 * self.n;
        SymbolFile {
            n: self.n,
            q_re: (0..m).map(|i| (0..m).map(|j| self.q[(i, j)].re).collect()).collect(),
            q_im: (0..m).map(|i| (0..m).map(|j| self.q[(i, j)].im).collect()).collect(),
        }
    }

    /// `|x|² + |ξ|²`.
    pub fn harmonic(n: usize) -> Result<Self> {
        QuadraticSymbol::new(n, Mat::identity(2 * n), "harmonic")
    }

    /// `|ξ|²`, the symbol of `−Δ`.
    pub fn free_laplacian(n: usize) -> Result<Self> {
        let m = 2 * n;
        let q = Mat::from_fn(m, m, |i, j| if i == j && i >= n { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
        QuadraticSymbol::new(n, q, "laplacian")
    }

    /// Kramers-Fokker-Planck symbol on `(x, v; ξ, η)` with potential `a x²/2`:
    /// `η² + v²/4 + i(vξ − a x η)`.
    pub fn kramers_fokker_planck(a: f64) -> Result<Self> {
        let mut q = Mat::<Complex64>::zeros(4, 4);
        // indices: x = 0, v = 1, ξ = 2, η = 3
        q[(3, 3)] = Complex64::new(1.0, 0.0);
        q[(1, 1)] = Complex64::new(0.25, 0.0);
        q[(1, 2)] = Complex64::new(0.0, 0.5);
        q[(2, 1)] = Complex64::new(0.0, 0.5);
        q[(0, 3)] = Complex64::new(0.0, -0.5 * a);
        q[(3, 0)] = Complex64::new(0.0, -0.5 * a);
        QuadraticSymbol::new(2, q, format!("kfp:a={a}"))
    }

    /// `q(X) = XᵀQX` at a real phase-space point.
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.polar(x, x)
    }

    /// Polarized form `q(X, Y) = XᵀQY`.
    pub fn polar(&self, x: &[f64], y: &[f64]) -> Complex64 {
        let m = 2 * self.n;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..m {
            for j in 0..m {
                acc += self.q[(i, j)] * x[i] * y[j];
            }
        }
        acc
    }

    pub fn scaled(&self, c: f64) -> Self {
        QuadraticSymbol { n: self.n, q: self.q.scale(&Complex64::new(c, 0.0)), name: format!("{}*{c}", self.name) }
    }

    pub fn conjugate(&self) -> Self {
        QuadraticSymbol { n: self.n, q: self.q.conj(), name: format!("conj({})", self.name) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::contract("symbols live on different phase spaces"));
        }
        QuadraticSymbol::new(self.n, self.q.add(&other.q), format!("{}+{}", self.name, other.name))
    }

    pub fn re_matrix(&self) -> Mat<f64> {
        self.q.map(|z| z.re)
    }

    pub fn im_matrix(&self) -> Mat<f64> {
        self.q.map(|z| z.im)
    }

    /// `Re q ≥ 0`, i.e. `Re Q ⪰ 0` up to `tol·‖Re Q‖`.
    pub fn is_accretive(&self, tol: f64) -> bool {
        let re = self.re_matrix();
        let (lo, _) = crate::linalg::sym_extremes(&re);
        lo >= -tol * re.max_abs().max(1.0)
    }
}

/// Parses `harmonic`, `laplacian`, `kfp:a=<real>`; `n` applies to the first two.
pub fn parse_symbol_spec(spec: &str, n: usize) -> Result<QuadraticSymbol> {
    let (name, args) = match spec.split_once(':') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (spec.trim(), ""),
    };
    let mut kv = BTreeMap::new();
    for part in args.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::domain(format!("expected key=value in symbol spec, got `{part}`")))?;
        let v: f64 = v.trim().parse().map_err(|_| Error::domain(format!("symbol parameter `{}` is not a number", k.trim())))?;
        kv.insert(k.trim().to_ascii_lowercase(), v);
    }
    let allow = |keys: &[&str]| -> Result<()> {
        match kv.keys().find(|k| !keys.contains(&k.as_str())) {
            Some(k) => Err(Error::domain(format!("symbol `{name}` does not take `{k}`"))),
            None => Ok(()),
        }
    };
    match name {
        "harmonic" => {
            allow(&[])?;
            QuadraticSymbol::harmonic(n)
        }
        "laplacian" | "free" => {
            allow(&[])?;
            QuadraticSymbol::free_laplacian(n)
        }
        "kfp" => {
            allow(&["a"])?;
            let a = *kv.get("a").unwrap_or(&1.0);
            if a == 0.0 {
                return Err(Error::domain("the Kramers-Fokker-Planck potential needs a ≠ 0"));
            }
            QuadraticSymbol::kramers_fokker_planck(a)
        }
        _ => Err(Error::domain(format!("unknown symbol `{name}`"))),
    }
}
