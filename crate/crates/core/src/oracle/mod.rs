//! Exact per-mode evolution of the two-quadrature Gaussian vacuum.
//!
//! Each mode `k` is a pair of oscillators `(Q, Qbar)` with frequency `omega(t) = eps(t)/hbar`.
//! The evolved vacuum stays a product of identical Gaussians, carried by the mode
//! function `u` with `u'' + omega^2 u = 0`. [`grid`] solves the same problem on a
//! spatial grid as an independent check.

pub mod basis;
pub mod gaussian;
pub mod grid;

pub use basis::{basis_derivative_check, basis_derivative_residual, fock_expansion, overlap_basis, InstantaneousBasis};
pub use gaussian::{evolve_mode, evolve_mode_at, GaussianModeState};
pub use grid::{grid_evolve_mode, GridOverlaps, GridParams};
