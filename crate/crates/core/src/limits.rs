//! Riemann-sum limits, the pair intensity `lambda(t)`, the limiting Poisson law and
//! the small-hbar verdict for each dimension.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::PairDistribution;
use crate::numerics::quad::{gauss_kronrod, gauss_kronrod_half_line};
use crate::numerics::special::ln_factorial;
use crate::numerics::sum::NeumaierSum;
use crate::potential::{sup_norms, PotentialSpec};

/// `int_{R^2} x_1^2/(|x|^2+1)^3`, confirmed against [`radial_constant`] in tests.
pub const RADIAL_C2: f64 = PI / 4.0;
/// `int_{R^3} x_1^2/(|x|^2+1)^3`, confirmed against [`radial_constant`] in tests.
pub const RADIAL_C3: f64 = PI * PI / 4.0;
/// Relative threshold below which `|fdot(t)|` counts as zero.
pub const FDOT_ZERO: f64 = 1e-12;

const SUM_REACH: f64 = 1000.0;
const SUM_REACH_2D: f64 = 100.0;

/// `sum_k hbar/(hbar^2 k^2 + 1)` over `Z`, with an integral tail beyond `|hbar k| ~ 1000`.
pub fn riemann_check_1d(hbar: f64) -> f64 {
    let n = (SUM_REACH / hbar).ceil() as i64;
    let g = |k: i64| {
        let x = hbar * k as f64;
        hbar / (x * x + 1.0)
    };
    let mut s = NeumaierSum::new();
    for k in (1..=n).rev() {
        s.add(2.0 * g(k));
    }
    s.add(g(0));
    let x = hbar * (n as f64 + 0.5);
    // midpoint-rule tail with its first Euler-Maclaurin correction
    let gp = -2.0 * hbar * hbar * x / ((x * x + 1.0) * (x * x + 1.0));
    s.add(2.0 * (PI / 2.0 - x.atan()));
    s.add(2.0 * gp / 24.0);
    s.value()
}

fn row_sum(hbar: f64, a: f64, n: i64) -> f64 {
    let c2 = a * a + 1.0;
    let mut s = NeumaierSum::new();
    for k in (1..=n).rev() {
        let y = hbar * k as f64;
        let d = c2 + y * y;
        s.add(2.0 * hbar * hbar / (d * d));
    }
    s.add(hbar * hbar / (c2 * c2));
    let y = hbar * (n as f64 + 0.5);
    let c = c2.sqrt();
    let tail = (PI / 2.0 - (y / c).atan()) / (c2 * c) - y / (c2 * (c2 + y * y));
    s.add(hbar * tail);
    s.value()
}

/// `sum_{k in Z^2} hbar^2/(|hbar k|^2 + 1)^2` by rows, with integral tails.
pub fn riemann_check_2d(hbar: f64) -> f64 {
    let n = (SUM_REACH_2D / hbar).ceil() as i64;
    let mut s = NeumaierSum::new();
    for k in (1..=n).rev() {
        s.add(2.0 * row_sum(hbar, hbar * k as f64, n));
    }
    s.add(row_sum(hbar, 0.0, n));
    let x = hbar * (n as f64 + 0.5);
    s.add(PI * (1.0 - x / (x * x + 1.0).sqrt()));
    s.value()
}

/// Radius `hbar n` where the explicit part of the `dim`-dimensional Riemann sum stops.
pub fn riemann_cutoff(dim: usize, hbar: f64) -> f64 {
    let reach = if dim == 2 { SUM_REACH_2D } else { SUM_REACH };
    hbar * (reach / hbar).ceil()
}

/// Estimated error left in the analytic tails of the Riemann sums: the next
/// Euler-Maclaurin term in one dimension, the first (uncorrected) one in two.
pub fn riemann_tail_error(dim: usize, hbar: f64) -> f64 {
    let x = riemann_cutoff(dim, hbar) + 0.5 * hbar;
    let h2 = hbar * hbar;
    if dim == 2 {
        let outer = h2 * PI * x / (8.0 * (x * x + 1.0).powf(2.5));
        let rows = h2 * PI / (8.0 * x.powi(4));
        outer + rows
    } else {
        let g3 = 24.0 * x * (x * x - 1.0) / (x * x + 1.0).powi(4);
        2.0 * 7.0 * h2 * h2 / 5760.0 * g3
    }
}

/// `c_n = int_{R^n} <e, x>^2/(|x|^2+1)^3` for a unit vector `e`, via the radial integral.
pub fn radial_constant(dim: usize) -> Result<f64> {
    let (sphere, power) = match dim {
        2 => (2.0 * PI, 3),
        3 => (4.0 * PI, 4),
        _ => return Err(Error::InvalidDimension(dim)),
    };
    let r = gauss_kronrod_half_line(|r| r.powi(power) / (r * r + 1.0).powi(3), 0.0, 1e-15, 1e-13)?;
    Ok(sphere / dim as f64 * r.value)
}

/// `|fdot|^2 c_n / 16` using the confirmed closed forms.
pub fn lambda_closed_form(dim: usize, fdot: &[f64]) -> Result<f64> {
    let c = match dim {
        2 => RADIAL_C2,
        3 => RADIAL_C3,
        _ => return Err(Error::InvalidDimension(dim)),
    };
    Ok(fdot.iter().map(|x| x * x).sum::<f64>() * c / 16.0)
}

/// `lambda = (1/16) int <fdot, x>^2/(|x|^2+1)^3 d^n x` by nested adaptive quadrature
/// in polar (d=2) or spherical (d=3) coordinates.
pub fn lambda_intensity(dim: usize, fdot: &[f64]) -> Result<f64> {
    if dim == 1 {
        return Err(Error::InvalidParameter { name: "dim", reason: "the intensity is defined for dimension 2 and 3 only".into() });
    }
    if dim > 3 {
        return Err(Error::InvalidDimension(dim));
    }
    if fdot.len() != dim {
        return Err(Error::InvalidParameter { name: "fdot", reason: format!("length {} differs from dimension {dim}", fdot.len()) });
    }
    if fdot.iter().all(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let radial = |proj: f64, power: i32| -> Result<f64> {
        let r = gauss_kronrod_half_line(|r| r.powi(power) / (r * r + 1.0).powi(3), 0.0, 1e-16, 1e-12)?;
        Ok(proj * proj * r.value)
    };
    let mut err = None;
    let total = if dim == 2 {
        gauss_kronrod(
            |th| {
                let proj = fdot[0] * th.cos() + fdot[1] * th.sin();
                radial(proj, 3).unwrap_or_else(|e| {
                    err = Some(e);
                    0.0
                })
            },
            0.0,
            2.0 * PI,
            1e-16,
            1e-11,
        )?
    } else {
        gauss_kronrod(
            |th| {
                let (st, ct) = th.sin_cos();
                let inner = gauss_kronrod(
                    |ph| {
                        let proj = fdot[0] * st * ph.cos() + fdot[1] * st * ph.sin() + fdot[2] * ct;
                        radial(proj, 4).unwrap_or_else(|e| {
                            err = Some(e);
                            0.0
                        })
                    },
                    0.0,
                    2.0 * PI,
                    1e-16,
                    1e-11,
                );
                match inner {
                    Ok(v) => v.value * st,
                    Err(e) => {
                        err = Some(e);
                        0.0
                    }
                }
            },
            0.0,
            PI,
            1e-16,
            1e-11,
        )?
    };
    if let Some(e) = err {
        return Err(e);
    }
    Ok(total.value / 16.0)
}

/// `lambda^n e^{-lambda} / n!`, evaluated in log space.
pub fn poisson_law(lambda: f64, n: usize) -> f64 {
    if lambda == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (n as f64 * lambda.ln() - lambda - ln_factorial(n)).exp()
}

/// Richardson extrapolation to `h = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub value: f64,
    pub order: f64,
    /// Whether `order` was fitted from three points (otherwise the default was used).
    pub fitted: bool,
}

/// Extrapolates `values(h)` using the last three points (last two with `default_order`
/// if the order cannot be fitted). `h` must be decreasing.
pub fn richardson(h: &[f64], values: &[f64], default_order: f64) -> Extrapolation {
    let n = h.len();
    assert!(n >= 2 && values.len() == n);
    let (h2, h3, v2, v3) = (h[n - 2], h[n - 1], values[n - 2], values[n - 1]);
    let mut order = default_order;
    let mut fitted = false;
    if n >= 3 {
        let (h1, v1) = (h[n - 3], values[n - 3]);
        let ratio = (v1 - v2) / (v2 - v3);
        let g = |p: f64| (h1.powf(p) - h2.powf(p)) / (h2.powf(p) - h3.powf(p)) - ratio;
        let (mut lo, mut hi) = (0.1, 12.0);
        if ratio.is_finite() && g(lo) < 0.0 && g(hi) > 0.0 {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if g(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            order = 0.5 * (lo + hi);
            fitted = true;
        }
    }
    let a = h3.powf(order);
    let b = h2.powf(order);
    Extrapolation { value: v3 + (v3 - v2) * a / (b - a), order, fitted }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    LimitOne,
    LimitExp,
    LimitZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub hbar: f64,
    pub p0: f64,
    pub pn: Vec<f64>,
    pub tail_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub dim: usize,
    pub t: f64,
    pub fdot_norm: f64,
    pub lambda: f64,
    pub verdict: Verdict,
    /// Expected `lim P^0`: 1, `e^{-lambda}` or 0.
    pub p0_limit: f64,
    pub p0_extrapolated: f64,
    pub fitted_order: f64,
    pub order_was_fitted: bool,
    /// `|p0_extrapolated - p0_limit| / p0_limit`, or the absolute value when the limit is 0.
    pub deviation: f64,
    /// `lambda^n e^{-lambda}/n!` for `n = 0..=n_max`.
    pub poisson: Vec<f64>,
    /// Per sweep point, `|P^n - poisson_n|` for `n = 1..=n_max`.
    pub poisson_error: Vec<Vec<f64>>,
    /// Per sweep point, `-hbar ln P^0`.
    pub scaled_log_p0: Vec<f64>,
    pub sweep: Vec<SweepRow>,
}

pub fn fdot_is_zero(spec: &PotentialSpec, t: f64) -> bool {
    let (_, fd_max) = sup_norms(spec);
    fd_max == 0.0 || spec.derivative_norm(t) < FDOT_ZERO * fd_max
}

pub fn limit_verdict(dim: usize, spec: &PotentialSpec, t: f64, sweep: &[(f64, PairDistribution)]) -> Result<LimitReport> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidDimension(dim));
    }
    if sweep.len() < 3 {
        return Err(Error::InvalidSweep(format!("need at least 3 hbar values, got {}", sweep.len())));
    }
    if sweep.windows(2).any(|w| !(w[1].0 < w[0].0)) || sweep.iter().any(|s| !(s.0 > 0.0)) {
        return Err(Error::InvalidSweep("hbar values must be positive and strictly decreasing".into()));
    }
    let zero = fdot_is_zero(spec, t);
    let verdict = match (dim, zero) {
        (1, _) | (_, true) => Verdict::LimitOne,
        (2, false) => Verdict::LimitExp,
        _ => Verdict::LimitZero,
    };
    let fdot = spec.derivative(t);
    let lambda = if dim >= 2 && !zero { lambda_intensity(dim, &fdot)? } else { 0.0 };
    let p0_limit = match verdict {
        Verdict::LimitOne => 1.0,
        Verdict::LimitExp => (-lambda).exp(),
        Verdict::LimitZero => 0.0,
    };
    let hs: Vec<f64> = sweep.iter().map(|s| s.0).collect();
    let p0s: Vec<f64> = sweep.iter().map(|s| s.1.p0).collect();
    let default_order = if dim == 2 { 2.0 } else { 1.0 };
    let ex = richardson(&hs, &p0s, default_order);
    let deviation = if p0_limit > 0.0 { (ex.value - p0_limit).abs() / p0_limit } else { ex.value.abs() };
    let n_max = sweep.iter().map(|s| s.1.n_max).min().unwrap_or(0);
    let poisson: Vec<f64> = (0..=n_max).map(|n| poisson_law(lambda, n)).collect();
    let poisson_error = sweep.iter().map(|(_, d)| (1..=n_max).map(|n| (d.get(n) - poisson[n]).abs()).collect()).collect();
    let scaled_log_p0 = sweep.iter().map(|(h, d)| -h * d.p0.ln()).collect();
    let rows = sweep.iter().map(|(h, d)| SweepRow { hbar: *h, p0: d.p0, pn: d.pn.clone(), tail_error: d.tail_error }).collect();
    Ok(LimitReport {
        dim,
        t,
        fdot_norm: spec.derivative_norm(t),
        lambda,
        verdict,
        p0_limit,
        p0_extrapolated: ex.value,
        fitted_order: ex.order,
        order_was_fitted: ex.fitted,
        deviation,
        poisson,
        poisson_error,
        scaled_log_p0,
        sweep: rows,
    })
}
