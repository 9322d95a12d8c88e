//! Complex-analytic building blocks: sparse polynomials and their roots,
//! damped Newton refinement, Chebyshev polynomials and argument-principle
//! zero counting.

mod chebyshev;
mod newton;
mod polynomial;
mod roots;
mod winding;

use num_complex::Complex64;
use thiserror::Error;

pub use chebyshev::{chebyshev_u, chebyshev_u_tail};
pub use newton::{newton_refine, Evaluation, HolomorphicMap};
pub use polynomial::{powu, PolyEval, SparsePolynomial};
pub use roots::{
    cluster_radius, solve_polynomial, solve_polynomial_with, Root, RootSet, SolveOptions,
};
pub use winding::{count_zeros, Rectangle};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("the zero polynomial has no well-defined roots")]
    ZeroPolynomial,
    #[error("root iteration did not converge; worst backward error {worst_residual:e}")]
    NoConvergence { worst_residual: f64 },
    #[error("Newton iteration diverged near {last}")]
    Diverged { last: Complex64 },
    #[error("derivative vanished at {last}")]
    FlatDerivative { last: Complex64 },
    #[error("Newton iteration stalled at {last} with relative residual {residual:e}")]
    NewtonStalled { last: Complex64, residual: f64 },
    #[error("a zero lies on or near the contour (near {near}, |f| = {min_modulus:e})")]
    BoundaryProximity { near: Complex64, min_modulus: f64 },
    #[error("winding number {turns} is not an integer")]
    WindingNotIntegral { turns: f64 },
}
