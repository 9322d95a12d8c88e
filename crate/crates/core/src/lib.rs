//! Spectra of non-self-adjoint Schrödinger operators with a rectangular
//! barrier of purely imaginary height, on the lattice and on the line, and
//! the Lieb–Thirring type sums evaluated over them.
//!
//! * [`numeric`]: sparse polynomial roots, Newton refinement, Chebyshev
//!   polynomials, zero counting.
//! * [`jacobi`]: the lattice operator `J_0 + ih P_n`.
//! * [`schrodinger`]: the continuum operator `−d²/dx² + ih χ_[−1,1]`.
//! * [`functionals`]: distances, weighted eigenvalue sums and parameter scans.
//! * [`asymptotics`]: leading-order eigenvalue predictors and their validation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod functionals;
pub mod jacobi;
pub mod numeric;
pub mod schrodinger;

pub use num_complex::Complex64;
