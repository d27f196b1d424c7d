//! Hermite functions, multi-indices, expansions in `E_N` and ladder algebra.

pub mod eval;
pub mod expansion;
pub mod ladder;
pub mod multiindex;

pub use eval::{eval_hermite_1d, hermite_column, hermite_column_with_derivative};
pub use expansion::{ExpansionRecord, HermiteExpansion, ProjectionMode};
pub use ladder::{apply_ladder, apply_linear, harmonic_oscillator, LadderKind, LadderMap};
pub use multiindex::{binomial, enumerate_multiindices, space_dim, Basis, MultiIndex};

/// Evaluates `f` at a point of ℝⁿ.
pub fn eval_expansion<T: crate::scalar::Real>(
    f: &HermiteExpansion<T>,
    x: &[T],
) -> crate::error::Result<num_complex::Complex<T>> {
    f.eval(x)
}

pub fn project_energy<T: crate::scalar::Real>(
    f: &HermiteExpansion<T>,
    k: usize,
    mode: ProjectionMode,
) -> HermiteExpansion<T> {
    f.project_energy(k, mode)
}
