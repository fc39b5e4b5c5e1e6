use std::f64::consts::PI;
use std::path::Path;

use anyhow::{Context, Result};
use kgvac_core::lattice::{cutoff_for_tolerance, tail_log_mass};
use kgvac_core::limits::{loglog_slope, riemann_cutoff, riemann_tail_error};
use kgvac_core::pipeline::{lattice_point, mode_amplitudes};
use kgvac_core::{
    coeff_table, evolve_mode, limit_verdict, make_bump, riemann_check_1d, riemann_check_2d, AmplitudeSource, LimitReport, ModeIndex,
    PotentialSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::ExperimentConfig;

/// 17 significant digits, enough to round-trip an `f64`.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn mode_label(k: &ModeIndex) -> String {
    k.components().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";")
}

struct Table {
    writer: csv::Writer<std::fs::File>,
}

impl Table {
    fn create(dir: &Path, name: &str, header: Vec<String>) -> Result<Self> {
        let path = dir.join(name);
        let mut writer = csv::Writer::from_path(&path).with_context(|| format!("cannot create {}", path.display()))?;
        writer.write_record(&header)?;
        Ok(Self { writer })
    }

    fn row(&mut self, fields: Vec<String>) -> Result<()> {
        self.writer.write_record(&fields)?;
        Ok(())
    }

    fn finish(mut self) -> Result<()> {
        self.writer.flush()?;
        Ok(())
    }
}

const PROVENANCE: [&str; 5] = ["dim", "hbar", "t", "cutoff", "tail_error"];

fn header(rest: &[&str]) -> Vec<String> {
    PROVENANCE.iter().chain(rest).map(|s| s.to_string()).collect()
}

fn provenance(dim: usize, hbar: f64, t: f64, cutoff: f64, tail_error: f64) -> Vec<String> {
    vec![dim.to_string(), num(hbar), num(t), num(cutoff), num(tail_error)]
}

fn potential(cfg: &ExperimentConfig) -> Result<PotentialSpec> {
    make_bump(cfg.dim, &cfg.amplitude, cfg.t_end).context("potential")
}

/// Cutoff a lattice sweep would use at `hbar`, with the excluded-mode mass `1 - e^{-tail}`.
fn lattice_provenance(cfg: &ExperimentConfig, spec: &PotentialSpec, hbar: f64) -> (f64, f64) {
    let r = cfg.cutoff_radius.unwrap_or_else(|| cutoff_for_tolerance(cfg.dim, hbar, spec, cfg.tail_tol));
    let tail = tail_log_mass(cfg.dim, hbar, spec, r);
    (r, -(-tail).exp_m1())
}

pub fn sweep(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let spec = potential(cfg)?;
    let opts = cfg.sweep_options();
    let pn: Vec<String> = (0..=cfg.n_max).map(|n| format!("p{n}")).collect();
    let pn_ref: Vec<&str> = pn.iter().map(String::as_str).collect();
    let mut table = Table::create(out, "sweep.csv", header(&pn_ref))?;
    for &t in &cfg.t_eval {
        for &h in &cfg.hbar_list {
            let p = lattice_point(&spec, h, t, &opts).with_context(|| format!("lattice-aggregate: hbar = {h}, t = {t}"))?;
            let d = &p.distribution;
            let mut row = provenance(p.dim, h, t, p.cutoff_radius, d.tail_error);
            row.push(num(d.p0));
            row.extend((1..=cfg.n_max).map(|n| num(d.get(n))));
            table.row(row)?;
            println!("t = {t} hbar = {h}: {} modes, P0 = {:.6}, tail error {:.2e}", p.n_modes, d.p0, d.tail_error);
        }
    }
    table.finish()
}

fn random_modes(cfg: &ExperimentConfig) -> Vec<ModeIndex> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.random_modes)
        .map(|_| {
            let k: Vec<i64> = (0..cfg.dim).map(|_| rng.gen_range(-cfg.random_k_max..=cfg.random_k_max)).collect();
            ModeIndex::new(&k).expect("dimension in 1..=3")
        })
        .collect()
}

pub fn mode_check(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let spec = potential(cfg)?;
    let mut modes = cfg.sample_modes();
    modes.extend(random_modes(cfg));
    if modes.is_empty() {
        anyhow::bail!("mode-check needs `oracle_sample` or `random_modes`");
    }
    let mut items: Vec<(f64, f64, ModeIndex)> = Vec::new();
    for &t in &cfg.t_eval {
        for &h in &cfg.hbar_list {
            items.extend(modes.iter().map(|k| (t, h, *k)));
        }
    }
    // (s, j, re, im, scaled)
    type Row = (usize, usize, f64, f64, f64);
    let results: Vec<Result<Vec<Row>>> = items
        .par_iter()
        .map(|&(t, h, k)| {
            let table =
                coeff_table(&k, h, &spec, t, cfg.quad_tol).with_context(|| format!("mode-core: mode {k:?}, hbar = {h}, t = {t}"))?;
            let e0 = k.eps0(h);
            Ok(table
                .at(t)
                .entries()
                .into_iter()
                .filter(|&(s, j, _)| s + j > 0)
                .map(|(s, j, a)| {
                    let power = if s > 0 { 2 * s + j } else { 2 + j };
                    (s, j, a.re, a.im, a.norm() * e0.powi(power as i32))
                })
                .collect())
        })
        .collect();
    let mut table = Table::create(out, "mode_check.csv", header(&["mode", "eps0", "s", "j", "re", "im", "abs", "scaled"]))?;
    let mut worst = std::collections::BTreeMap::new();
    for (&(t, h, k), res) in items.iter().zip(results) {
        let (cutoff, tail) = lattice_provenance(cfg, &spec, h);
        for (s, j, re, im, scaled) in res? {
            let mut row = provenance(cfg.dim, h, t, cutoff, tail);
            row.extend([mode_label(&k), num(k.eps0(h)), s.to_string(), j.to_string(), num(re), num(im), num(re.hypot(im)), num(scaled)]);
            table.row(row)?;
            let w: &mut f64 = worst.entry((s, j)).or_insert(0.0);
            *w = w.max(scaled);
        }
    }
    table.finish()?;
    for ((s, j), w) in worst {
        println!("max |A^{j}_{s}| eps0^p = {w:.6e}");
    }
    Ok(())
}

pub fn oracle_compare(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let spec = potential(cfg)?;
    let modes = cfg.sample_modes();
    if modes.is_empty() {
        anyhow::bail!("oracle-compare needs a non-empty `oracle_sample`");
    }
    let mut opts = cfg.sweep_options();
    opts.source = AmplitudeSource::Semiclassical;
    // grouped by (t, mode) so each group is one error-vs-hbar series
    let mut items: Vec<(f64, ModeIndex, f64)> = Vec::new();
    for &t in &cfg.t_eval {
        for k in &modes {
            items.extend(cfg.hbar_list.iter().map(|&h| (t, *k, h)));
        }
    }
    let results: Vec<Result<(f64, f64)>> = items
        .par_iter()
        .map(|&(t, k, h)| {
            let semi = mode_amplitudes(&k, h, &spec, t, &opts).with_context(|| format!("mode-core: mode {k:?}, hbar = {h}, t = {t}"))?;
            let exact =
                evolve_mode(&k, h, &spec, t, cfg.ode_tol).with_context(|| format!("gaussian-oracle: mode {k:?}, hbar = {h}, t = {t}"))?;
            Ok((semi.q, exact.vacuum_probability()))
        })
        .collect();
    let results: Vec<(f64, f64)> = results.into_iter().collect::<Result<_>>()?;
    let mut table = Table::create(out, "oracle.csv", header(&["mode", "q_semicl", "q_oracle", "abs_err", "fitted_order"]))?;
    for (group, chunk) in items.chunks(cfg.hbar_list.len()).zip(results.chunks(cfg.hbar_list.len())) {
        let (hs, errs): (Vec<f64>, Vec<f64>) =
            group.iter().zip(chunk).map(|(&(_, _, h), &(a, b))| (h, (a - b).abs())).filter(|&(_, e)| e > 0.0).unzip();
        let order = if hs.len() >= 2 { loglog_slope(&hs, &errs) } else { f64::NAN };
        let (t, k, _) = group[0];
        for (&(_, _, h), &(qs, qo)) in group.iter().zip(chunk) {
            let (cutoff, tail) = lattice_provenance(cfg, &spec, h);
            let mut row = provenance(cfg.dim, h, t, cutoff, tail);
            row.extend([mode_label(&k), num(qs), num(qo), num((qs - qo).abs()), num(order)]);
            table.row(row)?;
        }
        println!("t = {t} mode {}: fitted order {order:.3}", mode_label(&k));
    }
    table.finish()
}

pub fn limits(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let spec = potential(cfg)?;
    let opts = cfg.sweep_options();
    let mut reports: Vec<LimitReport> = Vec::new();
    for &t in &cfg.t_eval {
        let mut points = Vec::new();
        for &h in &cfg.hbar_list {
            let p = lattice_point(&spec, h, t, &opts).with_context(|| format!("lattice-aggregate: hbar = {h}, t = {t}"))?;
            points.push((h, p.distribution));
        }
        let r = limit_verdict(cfg.dim, &spec, t, &points).with_context(|| format!("continuum-limits: t = {t}"))?;
        println!(
            "t = {t}: verdict {}, lambda = {:.6}, P0 limit = {:.6}, extrapolated P0 = {:.6}, deviation {:.4}",
            serde_json::to_string(&r.verdict)?.trim_matches('"'),
            r.lambda,
            r.p0_limit,
            r.p0_extrapolated,
            r.deviation
        );
        reports.push(r);
    }
    let path = out.join("limits.json");
    let mut text = serde_json::to_string_pretty(&reports)?;
    text.push('\n');
    std::fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn riemann(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let mut table = Table::create(out, "riemann.csv", header(&["value", "pi_diff", "lower", "upper", "within"]))?;
    for &dim in &cfg.riemann_dims {
        for &h in &cfg.hbar_list {
            let (value, lower, upper) = match dim {
                1 => (riemann_check_1d(h), PI - 2.0 * h, PI + h),
                _ => (riemann_check_2d(h), PI - 2.0 * h, PI + 2.0 * h),
            };
            let within = value > lower && value <= upper;
            // the sums do not depend on time
            let mut row = vec![dim.to_string(), num(h), String::new(), num(riemann_cutoff(dim, h)), num(riemann_tail_error(dim, h))];
            row.extend([num(value), num(value - PI), num(lower), num(upper), within.to_string()]);
            table.row(row)?;
            println!("dim {dim} hbar = {h}: {value:.12} (pi + {:.3e}){}", value - PI, if within { "" } else { " OUTSIDE BOUNDS" });
        }
    }
    table.finish()
}
