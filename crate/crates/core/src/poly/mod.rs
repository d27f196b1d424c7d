//! Chebyshev and Remez machinery, Bernstein-type and weighted estimates on
//! `E_N`, and Hermite tail bounds.

pub mod bernstein;
pub mod chebyshev;
pub mod remez;
pub mod tails;

pub use bernstein::{
    bernstein_check, derivative, fourier_coefficients, monomial, weighted_check, weighted_norm, BernsteinCheck, Verdict,
    WeightedCheck, WeightedNorm,
};
pub use chebyshev::{chebyshev_value, ChebyshevEval, ChebyshevKind};
pub use remez::{kovrijkine_interval_bound, remez_ball_bound, remez_bound, remez_f, RemezBound};
pub use tails::{hermite_tail_bound, tail_constant_cn, TailBound, TailConstants};
