//! Dense linear algebra generic over [`crate::scalar::Scalar`].

pub mod eigen;
pub mod exact;
pub mod expm;
pub mod lu;
pub mod mat;
pub mod quad;

pub use eigen::{hermitian_eigenvalues, hermitian_extremes, sym_eigenvalues, sym_extremes};
pub use expm::expm;
pub use lu::{cholesky, inverse, solve, solve_lower, Lu};
pub use mat::{axpy, dot, norm2, Mat};
pub use quad::{adaptive_panels, adaptive_scalar, gauss_hermite_function_form, gauss_legendre, GaussRule, PanelIntegral};
