//! Vacuum persistence and pair creation for a Klein-Gordon field in a homogeneous,
//! time-dependent potential, mode by mode and aggregated over the momentum lattice.
//!
//! The crate is split along the computation:
//! [`potential`] builds the external field, [`mode`] evaluates dispersions and the
//! semiclassical amplitude expansion, [`oracle`] evolves each mode exactly,
//! [`lattice`] aggregates modes into pair-count distributions, and [`limits`]
//! checks the small-hbar behaviour.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod calibration;
pub mod error;
pub mod lattice;
pub mod limits;
pub mod mode;
pub mod numerics;
pub mod oracle;
pub mod pipeline;
pub mod potential;

pub use calibration::{calibrate, Calibration, CalibrationEntry};
pub use error::{Error, Result};
pub use lattice::{
    build_mode_set, build_mode_set_with_cutoff, pair_distribution, product_sum_inequality_check, vacuum_persistence, ModeSet,
    PairDistribution,
};
pub use limits::{lambda_intensity, limit_verdict, poisson_law, riemann_check_1d, riemann_check_2d, LimitReport, Verdict};
pub use mode::{
    amplitude_square_expansion, coeff_table, dispersion, pair_amplitude, survival_amplitude, CoeffTable, Dispersion, ModeAmplitudes,
    ModeIndex,
};
pub use num_complex::Complex64 as C64;
pub use oracle::{basis_derivative_check, evolve_mode, grid_evolve_mode, overlap_basis, GaussianModeState, GridParams, InstantaneousBasis};
pub use pipeline::{AmplitudeSource, CutoffRule, SweepOptions, SweepPoint};
pub use potential::{eval_potential, eval_potential_deriv, make_bump, sup_norms, BumpShape, PotentialSpec};
