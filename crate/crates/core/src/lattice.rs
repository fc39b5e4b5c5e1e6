//! Truncation of the momentum lattice and aggregation of per-mode probabilities.
//!
//! Modes are independent, so the number of pairs is Poisson-binomial:
//! `P^0 = prod q_k` and `P^n = P^0 e_n(p_k / q_k)` with `e_n` the elementary
//! symmetric polynomials.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mode::ModeIndex;
use crate::numerics::sum::NeumaierSum;
use crate::potential::{sup_norms, PotentialSpec};

/// Upper bound on materialized modes.
pub const DEFAULT_MAX_MODES: usize = 20_000_000;
/// Safety factor on the continuum tail estimate.
pub const TAIL_SAFETY: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    pub dim: usize,
    pub hbar: f64,
    /// Sorted by `|k|^2`, then lexicographically.
    pub modes: Vec<ModeIndex>,
    pub cutoff_radius: f64,
    pub tail_log_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDistribution {
    pub t: f64,
    pub hbar: f64,
    pub p0: f64,
    /// `P^1..=P^{n_max}`.
    pub pn: Vec<f64>,
    /// Excluded-mode mass, plus mass beyond `n_max`, plus any excess of `prod(q + p)` over 1.
    pub tail_error: f64,
    pub n_max: usize,
}

impl PairDistribution {
    /// `P^n` for `0 <= n <= n_max`.
    pub fn get(&self, n: usize) -> f64 {
        if n == 0 {
            self.p0
        } else {
            self.pn[n - 1]
        }
    }
}

/// `int_{|x| > r} d^n x / (|x|^2 + 1)^2`.
pub fn outer_integral(dim: usize, r: f64) -> f64 {
    let r = r.max(0.0);
    let r2 = r * r + 1.0;
    match dim {
        1 => (PI / 2.0 - r.atan()) - r / r2,
        2 => PI / r2,
        _ => 2.0 * PI * ((PI / 2.0 - r.atan()) + r / r2),
    }
}

/// Continuum estimate of `sum_{|hbar k| > R} |log q_k|`.
pub fn tail_log_mass(dim: usize, hbar: f64, spec: &PotentialSpec, cutoff: f64) -> f64 {
    let (fmax, fdmax) = sup_norms(spec);
    if fdmax == 0.0 {
        return 0.0;
    }
    TAIL_SAFETY * hbar.powi(2 - dim as i32) * fdmax * fdmax / 16.0 * outer_integral(dim, cutoff - fmax)
}

fn check(dim: usize, hbar: f64, spec: &PotentialSpec) -> Result<()> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidDimension(dim));
    }
    if dim != spec.dim() {
        return Err(Error::InvalidParameter { name: "dim", reason: format!("{dim} differs from potential dimension {}", spec.dim()) });
    }
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidParameter { name: "hbar", reason: format!("must be positive, got {hbar}") });
    }
    Ok(())
}

/// Approximate number of lattice points with `|hbar k| <= r`.
pub fn mode_count_estimate(dim: usize, hbar: f64, r: f64) -> f64 {
    let m = r / hbar + 1.0;
    match dim {
        1 => 2.0 * m,
        2 => PI * m * m,
        _ => 4.0 / 3.0 * PI * m * m * m,
    }
}

/// All modes with `|hbar k| <= cutoff`.
pub fn build_mode_set_with_cutoff(dim: usize, hbar: f64, spec: &PotentialSpec, cutoff: f64, max_modes: usize) -> Result<ModeSet> {
    check(dim, hbar, spec)?;
    if !(cutoff >= 0.0 && cutoff.is_finite()) {
        return Err(Error::InvalidParameter { name: "cutoff", reason: format!("must be non-negative, got {cutoff}") });
    }
    let est = mode_count_estimate(dim, hbar, cutoff);
    if est > max_modes as f64 {
        return Err(Error::CutoffCap { radius: cutoff, modes: est, cap: max_modes });
    }
    let kmax = (cutoff / hbar).floor() as i64;
    let r2 = cutoff * cutoff;
    let inside = |n2: i64| (n2 as f64) * hbar * hbar <= r2;
    let mut modes = Vec::with_capacity(est as usize + 16);
    let range = -kmax..=kmax;
    match dim {
        1 => {
            for a in range {
                if inside(a * a) {
                    modes.push(ModeIndex::new(&[a])?);
                }
            }
        }
        2 => {
            for a in range.clone() {
                for b in range.clone() {
                    if inside(a * a + b * b) {
                        modes.push(ModeIndex::new(&[a, b])?);
                    }
                }
            }
        }
        _ => {
            for a in range.clone() {
                for b in range.clone() {
                    if !inside(a * a + b * b) {
                        continue;
                    }
                    for c in range.clone() {
                        if inside(a * a + b * b + c * c) {
                            modes.push(ModeIndex::new(&[a, b, c])?);
                        }
                    }
                }
            }
        }
    }
    modes.sort_by(|x, y| x.norm_sq().cmp(&y.norm_sq()).then_with(|| x.components().cmp(y.components())));
    Ok(ModeSet { dim, hbar, modes, cutoff_radius: cutoff, tail_log_mass: tail_log_mass(dim, hbar, spec, cutoff) })
}

/// Smallest cutoff whose tail estimate is below `tail_tol`.
pub fn cutoff_for_tolerance(dim: usize, hbar: f64, spec: &PotentialSpec, tail_tol: f64) -> f64 {
    if tail_log_mass(dim, hbar, spec, 0.0) <= tail_tol {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while tail_log_mass(dim, hbar, spec, hi) > tail_tol {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return f64::INFINITY;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if tail_log_mass(dim, hbar, spec, mid) > tail_tol {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    hi
}

pub fn build_mode_set(dim: usize, hbar: f64, spec: &PotentialSpec, tail_tol: f64) -> Result<ModeSet> {
    check(dim, hbar, spec)?;
    if !(tail_tol > 1e-12 && tail_tol < 1.0) {
        return Err(Error::InvalidParameter { name: "tail_tol", reason: format!("{tail_tol:e} outside (1e-12, 1)") });
    }
    let r = cutoff_for_tolerance(dim, hbar, spec, tail_tol);
    if !r.is_finite() {
        return Err(Error::CutoffCap { radius: r, modes: f64::INFINITY, cap: DEFAULT_MAX_MODES });
    }
    build_mode_set_with_cutoff(dim, hbar, spec, r, DEFAULT_MAX_MODES)
}

fn sorted_pairs(mode_pq: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut v = mode_pq.to_vec();
    v.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));
    v
}

/// `(prod q_k, width of the tail-induced interval)`, with the log-sum in sorted order.
pub fn vacuum_persistence(mode_q: &[(ModeIndex, f64)], tail_log_mass: f64) -> Result<(f64, f64)> {
    let mut v: Vec<(ModeIndex, f64)> = mode_q.to_vec();
    v.sort_by(|a, b| a.0.norm_sq().cmp(&b.0.norm_sq()).then_with(|| a.0.components().cmp(b.0.components())));
    let mut s = NeumaierSum::new();
    for (i, (_, q)) in v.iter().enumerate() {
        if !(*q > 0.0) {
            return Err(Error::NonPositiveProbability { q: *q, index: i });
        }
        s.add(q.ln());
    }
    let p0 = s.value().exp();
    Ok((p0, p0 * -(-tail_log_mass.max(0.0)).exp_m1()))
}

/// `P^0..=P^{n_max}` from per-mode `(p, q)`.
pub fn pair_distribution(t: f64, hbar: f64, mode_pq: &[(f64, f64)], n_max: usize, tail_log_mass: f64) -> Result<PairDistribution> {
    if n_max == 0 {
        return Err(Error::InvalidParameter { name: "n_max", reason: "must be at least 1".into() });
    }
    let v = sorted_pairs(mode_pq);
    let mut log_q = NeumaierSum::new();
    let mut log_total = NeumaierSum::new();
    let mut e = vec![0.0; n_max + 1];
    e[0] = 1.0;
    for (i, &(p, q)) in v.iter().enumerate() {
        if !(q > 0.0) {
            return Err(Error::NonPositiveProbability { q, index: i });
        }
        if !(p >= 0.0) {
            return Err(Error::InvalidParameter { name: "p", reason: format!("negative pair probability {p}") });
        }
        log_q.add(q.ln());
        log_total.add((p + q).ln());
        let r = p / q;
        if r != 0.0 {
            for n in (1..=n_max).rev() {
                e[n] += r * e[n - 1];
            }
        }
    }
    let p0 = log_q.value().exp();
    let pn: Vec<f64> = e[1..].iter().map(|x| p0 * x).collect();
    let covered = p0 + pn.iter().sum::<f64>();
    let total = log_total.value().exp();
    let beyond = (total - covered).max(0.0);
    // truncated amplitudes can give q + p > 1; the excess is reported, not hidden
    let excess = (total - 1.0).max(0.0);
    let tail = -(-tail_log_mass.max(0.0)).exp_m1();
    Ok(PairDistribution { t, hbar, p0, pn, tail_error: tail + beyond + excess, n_max })
}

/// `P^1` from the explicit sum `sum_k p_k prod_{l != k} q_l`.
pub fn single_pair_explicit(mode_pq: &[(f64, f64)]) -> f64 {
    let n = mode_pq.len();
    let mut prefix = vec![1.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] * mode_pq[i].1;
    }
    let mut suffix = 1.0;
    let mut total = NeumaierSum::new();
    for i in (0..n).rev() {
        total.add(mode_pq[i].0 * prefix[i] * suffix);
        suffix *= mode_pq[i].1;
    }
    total.value()
}

fn distinct_products(f: &[f64], n: usize, start: usize, acc: f64, out: &mut f64) {
    if n == 0 {
        *out += acc;
        return;
    }
    for i in start..f.len() {
        distinct_products(f, n - 1, i + 1, acc * f[i], out);
    }
}

fn ordered_distinct_sum(f: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    distinct_products(f, n, 0, 1.0, &mut s);
    s * (1..=n).map(|x| x as f64).product::<f64>()
}

/// Checks `(sum f)^n - sum_{distinct k_1..k_n} f_{k_1}..f_{k_n} <= n(n-1)/2 (sum f)^{n-2} sum f^2`
/// by enumeration; the distinct sum runs over ordered tuples.
pub fn product_sum_inequality_check(f_values: &[f64], n: usize) -> bool {
    assert!((2..=5).contains(&n) && f_values.len() <= 15);
    assert!(f_values.iter().all(|&x| x >= 0.0));
    let s: f64 = f_values.iter().sum();
    let s2: f64 = f_values.iter().map(|x| x * x).sum();
    let lhs = s.powi(n as i32) - ordered_distinct_sum(f_values, n);
    let rhs = (n * (n - 1)) as f64 / 2.0 * s.powi(n as i32 - 2) * s2;
    lhs <= rhs * (1.0 + 1e-12) + 1e-300
}
