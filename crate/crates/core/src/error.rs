use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {0}: expected 1, 2 or 3")]
    InvalidDimension(usize),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("quadrature did not reach tolerance {tol:e} on [{a}, {b}] (error estimate {err:e})")]
    QuadratureNonConvergence { a: f64, b: f64, err: f64, tol: f64 },
    #[error("ODE step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("Wronskian drift {drift:e} exceeds {limit:e} at t = {t}")]
    WronskianDrift { t: f64, drift: f64, limit: f64 },
    #[error("non-normalizable Gaussian width (real part {0})")]
    NonNormalizable(f64),
    #[error("grid norm drift {drift:e} per unit time exceeds {limit:e}")]
    NormDrift { drift: f64, limit: f64 },
    #[error("grid half-width {half_width} is below 8 standard deviations ({needed})")]
    GridTooNarrow { half_width: f64, needed: f64 },
    #[error("basis not orthonormal: Gram deviation {0:e}")]
    BasisNotOrthonormal(f64),
    #[error("cutoff radius {radius} needs about {modes:.3e} modes, above the cap {cap}; use a larger hbar or a looser tail tolerance")]
    CutoffCap { radius: f64, modes: f64, cap: usize },
    #[error("non-positive survival probability {q} at mode position {index}")]
    NonPositiveProbability { q: f64, index: usize },
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

pub type Result<T> = std::result::Result<T, Error>;
