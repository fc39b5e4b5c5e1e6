//! Numerical kernels shared by the physics modules.

pub mod ode;
pub mod quad;
pub mod special;
pub mod sum;
pub mod tridiag;
