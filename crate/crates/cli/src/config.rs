use std::path::{Path, PathBuf};

use kgvac_core::{AmplitudeSource, CutoffRule, ModeIndex, SweepOptions};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse config {path}: {source}")]
    Parse { path: PathBuf, source: toml::de::Error },
    #[error("invalid config field `{field}`: {reason}")]
    Field { field: &'static str, reason: String },
}

fn field(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Field { field, reason: reason.into() }
}

/// One experiment, read from a flat TOML file. Times are in units of the inverse
/// mass, energies and momenta in units of the mass; `hbar` is dimensionless.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dim: usize,
    /// Support end of the bump.
    #[serde(rename = "T")]
    pub t_end: f64,
    /// Bump amplitude vector, `dim` components.
    pub amplitude: Vec<f64>,
    pub t_eval: Vec<f64>,
    pub hbar_list: Vec<f64>,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
    #[serde(default = "default_ode_tol")]
    pub ode_tol: f64,
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default)]
    pub oracle_sample: Vec<Vec<i64>>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub source: AmplitudeSource,
    /// Fixed cutoff radius; overrides `tail_tol` when set.
    pub cutoff_radius: Option<f64>,
    #[serde(default = "default_max_modes")]
    pub max_modes: usize,
    /// Extra modes drawn from `seed` for `mode-check`.
    #[serde(default)]
    pub random_modes: usize,
    #[serde(default = "default_random_k_max")]
    pub random_k_max: i64,
    #[serde(default = "default_riemann_dims")]
    pub riemann_dims: Vec<usize>,
}

fn default_tail_tol() -> f64 {
    1e-3
}
fn default_ode_tol() -> f64 {
    1e-11
}
fn default_quad_tol() -> f64 {
    1e-10
}
fn default_n_max() -> usize {
    6
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("kgvac-out")
}
fn default_max_modes() -> usize {
    kgvac_core::lattice::DEFAULT_MAX_MODES
}
fn default_random_k_max() -> i64 {
    16
}
fn default_riemann_dims() -> Vec<usize> {
    vec![1, 2]
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        let cfg: Self = toml::from_str(&text).map_err(|source| ConfigError::Parse { path: path.into(), source })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(1..=3).contains(&self.dim) {
            return Err(field("dim", format!("{} is not 1, 2 or 3", self.dim)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(field("T", format!("must be positive and finite, got {}", self.t_end)));
        }
        if self.amplitude.len() != self.dim {
            return Err(field("amplitude", format!("has {} components, dim is {}", self.amplitude.len(), self.dim)));
        }
        if self.amplitude.iter().any(|a| !a.is_finite()) {
            return Err(field("amplitude", "components must be finite"));
        }
        if self.t_eval.is_empty() {
            return Err(field("t_eval", "must not be empty"));
        }
        if let Some(t) = self.t_eval.iter().find(|t| !(**t >= 0.0 && **t <= 2.0 * self.t_end)) {
            return Err(field("t_eval", format!("{t} outside [0, 2T] = [0, {}]", 2.0 * self.t_end)));
        }
        if self.hbar_list.is_empty() {
            return Err(field("hbar_list", "must not be empty"));
        }
        if self.hbar_list.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(field("hbar_list", "entries must be positive and finite"));
        }
        if self.hbar_list.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(field("hbar_list", "must be strictly decreasing"));
        }
        if !(self.tail_tol > 1e-12 && self.tail_tol < 1.0) {
            return Err(field("tail_tol", format!("{:e} outside (1e-12, 1)", self.tail_tol)));
        }
        if !(self.ode_tol >= 1e-14 && self.ode_tol <= 1e-6) {
            return Err(field("ode_tol", format!("{:e} outside [1e-14, 1e-6]", self.ode_tol)));
        }
        if !(self.quad_tol > 1e-14 && self.quad_tol < 1e-4) {
            return Err(field("quad_tol", format!("{:e} outside (1e-14, 1e-4)", self.quad_tol)));
        }
        if !(1..=64).contains(&self.n_max) {
            return Err(field("n_max", format!("{} outside 1..=64", self.n_max)));
        }
        if let Some(k) = self.oracle_sample.iter().find(|k| k.len() != self.dim) {
            return Err(field("oracle_sample", format!("mode {k:?} does not have {} components", self.dim)));
        }
        if let Some(r) = self.cutoff_radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(field("cutoff_radius", format!("must be positive and finite, got {r}")));
            }
        }
        if self.max_modes == 0 {
            return Err(field("max_modes", "must be positive"));
        }
        if self.random_k_max < 0 {
            return Err(field("random_k_max", "must be non-negative"));
        }
        if let Some(d) = self.riemann_dims.iter().find(|d| !(1..=2).contains(*d)) {
            return Err(field("riemann_dims", format!("{d} is not 1 or 2")));
        }
        Ok(())
    }

    pub fn sweep_options(&self) -> SweepOptions {
        SweepOptions {
            source: self.source,
            quad_tol: self.quad_tol,
            ode_tol: self.ode_tol,
            n_max: self.n_max,
            residual_c: 0.0,
            cutoff: match self.cutoff_radius {
                Some(r) => CutoffRule::Radius(r),
                None => CutoffRule::TailTolerance(self.tail_tol),
            },
            max_modes: self.max_modes,
        }
    }

    pub fn sample_modes(&self) -> Vec<ModeIndex> {
        // dimensions were checked in validate
        self.oracle_sample.iter().map(|k| ModeIndex::new(k).expect("validated mode")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        toml::from_str("dim = 2\nT = 1.0\namplitude = [1.0, 0.0]\nt_eval = [0.3]\nhbar_list = [0.4, 0.2]\n").unwrap()
    }

    #[test]
    fn minimal_config_validates() {
        base().validate().unwrap();
    }

    #[test]
    fn required_fields_have_no_defaults() {
        for missing in ["dim", "T", "amplitude"] {
            let text: String = ["dim = 1", "T = 1.0", "amplitude = [1.0]", "t_eval = [1.0]", "hbar_list = [0.1]"]
                .iter()
                .filter(|l| !l.starts_with(missing))
                .map(|l| format!("{l}\n"))
                .collect();
            assert!(toml::from_str::<ExperimentConfig>(&text).is_err(), "{missing}");
        }
    }

    #[test]
    fn field_errors_name_the_field() {
        let mut c = base();
        c.hbar_list = vec![0.1, 0.2];
        assert!(c.validate().unwrap_err().to_string().contains("`hbar_list`"));
        let mut c = base();
        c.t_eval = vec![2.5];
        assert!(c.validate().unwrap_err().to_string().contains("`t_eval`"));
        let mut c = base();
        c.ode_tol = 1e-3;
        assert!(c.validate().unwrap_err().to_string().contains("`ode_tol`"));
        let mut c = base();
        c.oracle_sample = vec![vec![1]];
        assert!(c.validate().unwrap_err().to_string().contains("`oracle_sample`"));
    }
}
