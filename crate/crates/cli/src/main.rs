//! `kgvac`: runs sweeps, oracle comparisons and limit checks from a TOML config.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "kgvac", version, about = "Vacuum persistence experiments for a Klein-Gordon field in a homogeneous potential")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `output_dir` from the config.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides `seed` from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Pair-count distribution per hbar and evaluation time (sweep.csv).
    Sweep,
    /// Scaled semiclassical coefficients for the sample modes (mode_check.csv).
    ModeCheck,
    /// Semiclassical against exact survival probabilities, with fitted order (oracle.csv).
    OracleCompare,
    /// Small-hbar verdict and extrapolation per evaluation time (limits.json).
    Limits,
    /// Lattice sums converging to pi (riemann.csv).
    Riemann,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let path = cli.config.context("--config <path> is required")?;
    let mut cfg = ExperimentConfig::load(&path)?;
    if let Some(dir) = cli.output_dir {
        cfg.output_dir = dir;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("thread pool")?;
    }
    let out = cfg.output_dir.clone();
    std::fs::create_dir_all(&out).with_context(|| format!("cannot create output directory {}", out.display()))?;
    match cli.command {
        Command::Sweep => commands::sweep(&cfg, &out),
        Command::ModeCheck => commands::mode_check(&cfg, &out),
        Command::OracleCompare => commands::oracle_compare(&cfg, &out),
        Command::Limits => commands::limits(&cfg, &out),
        Command::Riemann => commands::riemann(&cfg, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
