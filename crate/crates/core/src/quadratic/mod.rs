//! Quadratic symbols, Hamilton maps, singular spaces, Weyl quantization on
//! `E_N` and the truncated semigroup.

pub mod evolve;
pub mod hamilton;
pub mod symbol;
pub mod weyl;

pub use evolve::{
    dissipation_check, evolve, galerkin_convergence, propagator, semigroup_at, semigroup_matrix, DissipationFit, DissipationReport, DissipationRow,
    Evolution,
};
pub use hamilton::{
    hamilton_map, singular_space, singular_space_exact, symplectic, HamiltonMap, SingularSpace, DEFAULT_RANK_TOL,
};
pub use symbol::{parse_symbol_spec, QuadraticSymbol, SymbolFile};
pub use weyl::{weyl_quantize, GalerkinOperator};
