//! Spectral inequalities for finite combinations of Hermite functions and
//! null-controllability of hypoelliptic quadratic operators at Galerkin scale.

pub mod control;
pub mod error;
pub mod fit;
pub mod gram;
pub mod hermite;
pub mod linalg;
pub mod poly;
pub mod quadratic;
pub mod regions;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{with_precision, working_precision, Mp, Real, Scalar};

/// Expansions and operators at the three supported precisions.
pub type Expansion32 = hermite::HermiteExpansion<f32>;
pub type Expansion64 = hermite::HermiteExpansion<f64>;
pub type ExpansionMp = hermite::HermiteExpansion<Mp>;
pub type Galerkin32 = quadratic::GalerkinOperator<f32>;
pub type Galerkin64 = quadratic::GalerkinOperator<f64>;
pub type GalerkinMp = quadratic::GalerkinOperator<Mp>;
pub type Gram32 = gram::GramOperator<f32>;
pub type Gram64 = gram::GramOperator<f64>;
pub type GramMp = gram::GramOperator<Mp>;
pub type Matrix64 = linalg::Mat<f64>;
pub type ComplexMatrix64 = linalg::Mat<num_complex::Complex64>;
