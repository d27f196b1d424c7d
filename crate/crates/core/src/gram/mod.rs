//! Restriction Gram operators on `E_N`, the sharp constant `C_N(ω)`, the
//! explicit upper bounds and scaling studies in `N`.

pub mod bounds;
pub mod operator;
pub mod scaling;
pub mod spectral;

pub use bounds::{theoretical_bound, BoundParams, BoundValue, BoundVariant, DEFAULT_C_KOV, DEFAULT_C_SOBOLEV};
pub use operator::{check_truncation, gram_matrix, gram_matrix_mp, gram_matrix_with, GramOperator, GramSummary, MIN_SAFETY};
pub use scaling::{fit_growth, scaling_study, GrowthModel, ModelFit, ScalingReport, ScalingRow};
pub use spectral::{
    spectral_constant, spectral_constant_fixed, PrecisionPolicy, SpectralConstant, SpectralStatus, MAX_PRECISION_BITS,
};
