//! Empirical constants for the per-mode error bounds, estimated against the exact oracle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::loglog_slope;
use crate::mode::{coeff_table, ModeIndex};
use crate::oracle::evolve_mode;
use crate::potential::PotentialSpec;

/// Multiplier applied to the largest observed ratio.
pub const SAFETY: f64 = 4.0;

/// A potential and a fixed momentum `hbar k` to sample across hbar.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationEntry {
    pub spec: PotentialSpec,
    pub momentum: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    pub entry: usize,
    pub dim: usize,
    pub momentum: Vec<f64>,
    pub hbar: f64,
    pub t: f64,
    pub eps0: f64,
    pub q_semiclassical: f64,
    pub q_exact: f64,
    pub p_semiclassical: f64,
    pub p_exact: f64,
    /// `|A_semiclassical - <phi^{0,0}|psi>|`.
    pub survive_error: f64,
    /// `|c_semiclassical - <phi^{1,1}|psi>|`.
    pub pair_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// `K` in `|1 - q| <= K hbar^2 / eps0^4` (exact `q`).
    pub survival_k: f64,
    /// `c` in `|A_semi - A_exact| <= c hbar^3 / eps0^4`.
    pub residual_c: f64,
    /// `c` in `|q_semi - q_exact| <= c hbar^4 / eps0^4`.
    pub order_c: f64,
    pub records: Vec<CalibrationRecord>,
}

/// Mode index for momentum `p` at `hbar`; `p / hbar` must be an integer vector.
pub fn mode_for_momentum(p: &[f64], hbar: f64) -> Result<ModeIndex> {
    let k: Vec<i64> = p.iter().map(|x| (x / hbar).round() as i64).collect();
    if k.iter().zip(p).any(|(&k, &x)| (k as f64 * hbar - x).abs() > 1e-9 * (1.0 + x.abs())) {
        return Err(Error::InvalidParameter { name: "momentum", reason: format!("{p:?} is not a lattice point at hbar = {hbar}") });
    }
    ModeIndex::new(&k)
}

pub fn calibrate(entries: &[CalibrationEntry], hbars: &[f64], times: &[f64], quad_tol: f64, ode_tol: f64) -> Result<Calibration> {
    use rayon::prelude::*;
    let mut jobs = Vec::new();
    for (e, entry) in entries.iter().enumerate() {
        for &h in hbars {
            for &t in times {
                jobs.push((e, entry, h, t));
            }
        }
    }
    let records: Vec<Result<CalibrationRecord>> = jobs
        .par_iter()
        .map(|&(e, entry, h, t)| {
            let k = mode_for_momentum(&entry.momentum, h)?;
            let st = evolve_mode(&k, h, &entry.spec, t, ode_tol)?;
            let table = coeff_table(&k, h, &entry.spec, t.min(entry.spec.support_end()), quad_tol)?;
            let a = table.amplitudes(t, 0.0);
            let (ov0, ov1) = (st.overlap(0), st.overlap(1));
            Ok(CalibrationRecord {
                entry: e,
                dim: entry.spec.dim(),
                momentum: entry.momentum.clone(),
                hbar: h,
                t,
                eps0: k.eps0(h),
                q_semiclassical: a.q,
                q_exact: ov0.norm_sqr(),
                p_semiclassical: a.p,
                p_exact: ov1.norm_sqr(),
                survive_error: (a.survive - ov0).norm(),
                pair_error: (a.pair - ov1).norm(),
            })
        })
        .collect();
    let records: Vec<CalibrationRecord> = records.into_iter().collect::<Result<_>>()?;
    let max_ratio = |f: &dyn Fn(&CalibrationRecord) -> f64| records.iter().map(f).fold(0.0, f64::max);
    let survival_k = SAFETY * max_ratio(&|r| (1.0 - r.q_exact).abs() * r.eps0.powi(4) / r.hbar.powi(2));
    let residual_c = SAFETY * max_ratio(&|r| r.survive_error * r.eps0.powi(4) / r.hbar.powi(3));
    let order_c = SAFETY * max_ratio(&|r| (r.q_semiclassical - r.q_exact).abs() * r.eps0.powi(4) / r.hbar.powi(4));
    Ok(Calibration { survival_k, residual_c, order_c, records })
}

impl Calibration {
    /// Log-log slope of `|q_semi - q_exact|` against hbar, per `(entry, t)`.
    pub fn order_slopes(&self) -> Vec<(usize, f64, f64)> {
        let mut keys: Vec<(usize, f64)> = self.records.iter().map(|r| (r.entry, r.t)).collect();
        keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        keys.dedup();
        keys.into_iter()
            .map(|(e, t)| {
                let rs: Vec<&CalibrationRecord> = self.records.iter().filter(|r| r.entry == e && r.t == t).collect();
                let h: Vec<f64> = rs.iter().map(|r| r.hbar).collect();
                let err: Vec<f64> = rs.iter().map(|r| (r.q_semiclassical - r.q_exact).abs().max(1e-300)).collect();
                (e, t, loglog_slope(&h, &err))
            })
            .collect()
    }
}

/// Six fixed-momentum modes: `hbar k` in {0, 0.4, 0.8} for a unit bump in d=1, and
/// {(0,0.4), (0.4,0.4), (0,0.8)} for the bump along the first axis in d=2.
pub fn standard_sample(t_end: f64) -> Result<Vec<CalibrationEntry>> {
    let one = crate::potential::make_bump(1, &[1.0], t_end)?;
    let two = crate::potential::make_bump(2, &[1.0, 0.0], t_end)?;
    let mut v = Vec::new();
    for p in [0.0, 0.4, 0.8] {
        v.push(CalibrationEntry { spec: one, momentum: vec![p] });
    }
    for p in [[0.0, 0.4], [0.4, 0.4], [0.0, 0.8]] {
        v.push(CalibrationEntry { spec: two, momentum: p.to_vec() });
    }
    Ok(v)
}
