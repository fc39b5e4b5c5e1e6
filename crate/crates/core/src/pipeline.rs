//! Per-hbar lattice sweeps: mode set, per-mode amplitudes, pair distribution.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{build_mode_set_with_cutoff, cutoff_for_tolerance, pair_distribution, ModeSet, PairDistribution, DEFAULT_MAX_MODES};
use crate::mode::{coeff_table, leading_pair_intensity, ModeAmplitudes, ModeIndex};
use crate::numerics::sum::NeumaierSum;
use crate::oracle::evolve_mode;
use crate::potential::PotentialSpec;

/// Where per-mode probabilities come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum AmplitudeSource {
    /// Truncated expansion in hbar.
    #[default]
    Semiclassical,
    /// Mode-function evolution.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffRule {
    /// Smallest radius whose tail estimate is below the tolerance.
    TailTolerance(f64),
    /// Fixed radius in `hbar k` units.
    Radius(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub source: AmplitudeSource,
    pub quad_tol: f64,
    pub ode_tol: f64,
    pub n_max: usize,
    /// Constant in `residual_bound = c hbar^3 / eps0^4`.
    pub residual_c: f64,
    pub cutoff: CutoffRule,
    pub max_modes: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            source: AmplitudeSource::Semiclassical,
            quad_tol: 1e-10,
            ode_tol: 1e-11,
            n_max: 6,
            residual_c: 0.0,
            cutoff: CutoffRule::TailTolerance(1e-3),
            max_modes: DEFAULT_MAX_MODES,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub dim: usize,
    pub hbar: f64,
    pub t: f64,
    pub cutoff_radius: f64,
    pub tail_log_mass: f64,
    pub n_modes: usize,
    /// Number of distinct per-mode computations after symmetry reduction.
    pub n_evaluated: usize,
    pub distribution: PairDistribution,
    /// `sum_k hbar^2 epsdot^2 / (16 eps^4)` over the mode set.
    pub leading_intensity: f64,
}

/// Amplitudes for one mode at time `t`.
pub fn mode_amplitudes(k: &ModeIndex, hbar: f64, spec: &PotentialSpec, t: f64, opts: &SweepOptions) -> Result<ModeAmplitudes> {
    if spec.is_zero() {
        return Ok(ModeAmplitudes::vacuum());
    }
    match opts.source {
        AmplitudeSource::Semiclassical => {
            let table = coeff_table(k, hbar, spec, t.min(spec.support_end()), opts.quad_tol)?;
            Ok(table.amplitudes(t, opts.residual_c))
        }
        AmplitudeSource::Exact => {
            let st = evolve_mode(k, hbar, spec, t, opts.ode_tol)?;
            let survive = st.overlap(0);
            let pair = st.overlap(1);
            Ok(ModeAmplitudes { survive, pair, q: survive.norm_sqr(), p: pair.norm_sqr(), residual_bound: 0.0 })
        }
    }
}

fn symmetry_key(k: &ModeIndex, axis: Option<usize>) -> (i64, i64, i64) {
    let c = k.components();
    match axis {
        Some(a) => {
            let perp: i64 = c.iter().enumerate().filter(|(i, _)| *i != a).map(|(_, x)| x * x).sum();
            (c[a], perp, 0)
        }
        None => (c[0], *c.get(1).unwrap_or(&0), *c.get(2).unwrap_or(&0)),
    }
}

/// Mode set for the given rule.
pub fn mode_set(spec: &PotentialSpec, hbar: f64, opts: &SweepOptions) -> Result<ModeSet> {
    let dim = spec.dim();
    let r = match opts.cutoff {
        CutoffRule::Radius(r) => r,
        CutoffRule::TailTolerance(tol) => {
            if !(tol > 1e-12 && tol < 1.0) {
                return Err(Error::InvalidParameter { name: "tail_tol", reason: format!("{tol:e} outside (1e-12, 1)") });
            }
            cutoff_for_tolerance(dim, hbar, spec, tol)
        }
    };
    if !r.is_finite() {
        return Err(Error::CutoffCap { radius: r, modes: f64::INFINITY, cap: opts.max_modes });
    }
    build_mode_set_with_cutoff(dim, hbar, spec, r, opts.max_modes)
}

/// One lattice point: all modes of the set, aggregated at time `t`.
pub fn lattice_point(spec: &PotentialSpec, hbar: f64, t: f64, opts: &SweepOptions) -> Result<SweepPoint> {
    let set = mode_set(spec, hbar, opts)?;
    let axis = spec.single_axis();
    let mut reps: Vec<ModeIndex> = Vec::new();
    let mut slot: HashMap<(i64, i64, i64), usize> = HashMap::new();
    let index: Vec<usize> = set
        .modes
        .iter()
        .map(|k| {
            *slot.entry(symmetry_key(k, axis)).or_insert_with(|| {
                reps.push(*k);
                reps.len() - 1
            })
        })
        .collect();
    let values: Vec<Result<(ModeAmplitudes, f64)>> =
        reps.par_iter().map(|k| Ok((mode_amplitudes(k, hbar, spec, t, opts)?, leading_pair_intensity(k, t, hbar, spec)))).collect();
    let values: Vec<(ModeAmplitudes, f64)> = values.into_iter().collect::<Result<_>>()?;
    let mut lead = NeumaierSum::new();
    let pq: Vec<(f64, f64)> = index
        .iter()
        .map(|&i| {
            lead.add(values[i].1);
            (values[i].0.p, values[i].0.q)
        })
        .collect();
    let distribution = pair_distribution(t, hbar, &pq, opts.n_max, set.tail_log_mass)?;
    Ok(SweepPoint {
        dim: set.dim,
        hbar,
        t,
        cutoff_radius: set.cutoff_radius,
        tail_log_mass: set.tail_log_mass,
        n_modes: set.modes.len(),
        n_evaluated: reps.len(),
        distribution,
        leading_intensity: lead.value(),
    })
}

/// Lattice points for every `hbar` (computed in order).
pub fn sweep(spec: &PotentialSpec, hbars: &[f64], t: f64, opts: &SweepOptions) -> Result<Vec<SweepPoint>> {
    hbars.iter().map(|&h| lattice_point(spec, h, t, opts)).collect()
}
