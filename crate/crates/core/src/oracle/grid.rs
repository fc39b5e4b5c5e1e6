//! Grid solution of the one-quadrature problem with a Numerov-Crank-Nicolson scheme.
//!
//! In the scaled coordinate `x = Q / sqrt(hbar)` the equation reads
//! `i psi_t = -psi_xx/2 + omega^2 x^2 psi/2 - omega psi/2`. The Numerov-weighted
//! Cayley step `(M + i tau H) psi' = (M - i tau H) psi` is unitary; two runs at
//! `n` and `2n` steps are combined by Richardson extrapolation in time.

use num_complex::Complex64 as C64;

use super::basis::fock_overlap;
use crate::error::{Error, Result};
use crate::mode::ModeIndex;
use crate::numerics::special::hermite_functions;
use crate::numerics::tridiag::solve_tridiagonal;
use crate::potential::PotentialSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    pub points: usize,
    /// Half-width in standard deviations of the widest instantaneous ground state.
    pub extent_sd: f64,
    /// Bound on `omega_max * dt` for the coarse run.
    pub phase_step: f64,
    pub s_max: usize,
    pub norm_drift_limit: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        Self { points: 2048, extent_sd: 10.0, phase_step: 0.01, s_max: 3, norm_drift_limit: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridOverlaps {
    pub t: f64,
    /// `<phi^{s,s}|psi>` for `s = 0..=s_max`.
    pub diagonal: Vec<C64>,
    /// Largest `|<phi^{na,nb}|psi>|` with `na != nb`, `na + nb <= 2 s_max`.
    pub off_diagonal: f64,
    /// One-quadrature overlaps `g_0..=g_{2 s_max}`.
    pub one_quadrature: Vec<C64>,
    /// Difference between the fine run and the extrapolated diagonal (error indicator).
    pub time_error: f64,
    pub norm_drift: f64,
    /// Largest `sqrt(<x^2>)` seen, in units of the grid half-width.
    pub max_spread: f64,
}

struct Run {
    g: Vec<C64>,
    norm_drift: f64,
    max_spread: f64,
}

fn omega_at(p: &[f64; 3], spec: &PotentialSpec, hbar: f64, t: f64) -> f64 {
    let f = spec.jet(t).f;
    let mut xx = 0.0;
    for i in 0..spec.dim() {
        let x = p[i] + f[i];
        xx += x * x;
    }
    (xx + 1.0).sqrt() / hbar
}

#[allow(clippy::too_many_arguments)]
fn run(p: &[f64; 3], spec: &PotentialSpec, hbar: f64, t_end: f64, xs: &[f64], dx: f64, steps: usize, n_g: usize) -> Run {
    let n = xs.len();
    let w0 = omega_at(p, spec, hbar, 0.0);
    let norm0 = w0.powf(0.25);
    let mut psi: Vec<C64> = xs.iter().map(|&x| C64::new(norm0 * hermite_functions(0, w0.sqrt() * x)[0], 0.0)).collect();
    let mass0: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx;
    let dt = if steps > 0 { t_end / steps as f64 } else { 0.0 };
    let tau = 0.5 * dt;
    let kin = 1.0 / (dx * dx);
    let (mut lower, mut diag, mut upper) = (vec![C64::default(); n], vec![C64::default(); n], vec![C64::default(); n]);
    let mut rhs = vec![C64::default(); n];
    let mut scratch = vec![C64::default(); n];
    let mut pot = vec![0.0; n];
    let mut max_spread = 0.0f64;
    let half_width = xs[n - 1];
    let i = C64::new(0.0, 1.0);
    for step in 0..steps {
        let tm = (step as f64 + 0.5) * dt;
        let w = omega_at(p, spec, hbar, tm);
        for (v, &x) in pot.iter_mut().zip(xs) {
            *v = 0.5 * w * w * x * x - 0.5 * w;
        }
        for j in 0..n {
            // H = K + M V with K = -delta^2/(2 dx^2), M = 1 + delta^2/12
            let hd = kin + 10.0 / 12.0 * pot[j];
            let hl = if j > 0 { -0.5 * kin + pot[j - 1] / 12.0 } else { 0.0 };
            let hu = if j + 1 < n { -0.5 * kin + pot[j + 1] / 12.0 } else { 0.0 };
            let mut r = (10.0 / 12.0 - i * tau * hd) * psi[j];
            if j > 0 {
                r += (1.0 / 12.0 - i * tau * hl) * psi[j - 1];
            }
            if j + 1 < n {
                r += (1.0 / 12.0 - i * tau * hu) * psi[j + 1];
            }
            rhs[j] = r;
            diag[j] = 10.0 / 12.0 + i * tau * hd;
            lower[j] = 1.0 / 12.0 + i * tau * hl;
            upper[j] = 1.0 / 12.0 + i * tau * hu;
        }
        solve_tridiagonal(&lower, &diag, &upper, &mut rhs, &mut scratch);
        std::mem::swap(&mut psi, &mut rhs);
        if step % 64 == 0 || step + 1 == steps {
            let m2: f64 = psi.iter().zip(xs).map(|(z, x)| z.norm_sqr() * x * x).sum::<f64>() * dx;
            max_spread = max_spread.max(m2.sqrt() / half_width);
        }
    }
    let mass: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx;
    let norm_drift = if t_end > 0.0 { (mass - mass0).abs() / t_end } else { 0.0 };
    let wb = omega_at(p, spec, hbar, t_end);
    let sw = wb.sqrt();
    let nb = wb.powf(0.25);
    let mut g = vec![C64::default(); n_g + 1];
    for (z, &x) in psi.iter().zip(xs) {
        let h = hermite_functions(n_g, sw * x);
        for (gk, hk) in g.iter_mut().zip(h) {
            *gk += z * (hk * nb * dx);
        }
    }
    Run { g, norm_drift, max_spread }
}

/// Evolves one quadrature on a grid and projects the two-quadrature product state
/// onto the instantaneous basis at `t_end`.
pub fn grid_evolve_mode(k: &ModeIndex, hbar: f64, spec: &PotentialSpec, t_end: f64, grid: &GridParams) -> Result<GridOverlaps> {
    if !(hbar > 0.0) || grid.points < 16 || !(t_end >= 0.0) {
        return Err(Error::InvalidParameter { name: "grid", reason: "need hbar > 0, t_end >= 0 and at least 16 points".into() });
    }
    if k.dim() != spec.dim() {
        return Err(Error::InvalidParameter { name: "k", reason: "mode dimension differs from potential dimension".into() });
    }
    let p = k.momentum(hbar);
    // omega >= 1/hbar, so this is the widest ground state that can occur
    let sigma = (hbar / 2.0).sqrt();
    let half_width = grid.extent_sd * sigma;
    let n = grid.points;
    let dx = 2.0 * half_width / (n + 1) as f64;
    let xs: Vec<f64> = (1..=n).map(|j| -half_width + dx * j as f64).collect();
    let w_max = (0..=256).map(|i| omega_at(&p, spec, hbar, t_end * i as f64 / 256.0)).fold(0.0, f64::max);
    let steps = ((t_end * w_max / grid.phase_step).ceil() as usize).max(if t_end > 0.0 { 8 } else { 0 });
    let n_g = 2 * grid.s_max;
    let coarse = run(&p, spec, hbar, t_end, &xs, dx, steps, n_g);
    let fine = run(&p, spec, hbar, t_end, &xs, dx, 2 * steps, n_g);
    for r in [&coarse, &fine] {
        if r.norm_drift > grid.norm_drift_limit {
            return Err(Error::NormDrift { drift: r.norm_drift, limit: grid.norm_drift_limit });
        }
        if 8.0 * r.max_spread > 1.0 {
            return Err(Error::GridTooNarrow { half_width, needed: 8.0 * r.max_spread * half_width });
        }
    }
    let g: Vec<C64> = fine.g.iter().zip(&coarse.g).map(|(f, c)| (4.0 * f - c) / 3.0).collect();
    let diagonal: Vec<C64> = (0..=grid.s_max).map(|s| fock_overlap(&g, s, s)).collect();
    let fine_diag: Vec<C64> = (0..=grid.s_max).map(|s| fock_overlap(&fine.g, s, s)).collect();
    let time_error = diagonal.iter().zip(&fine_diag).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let mut off = 0.0f64;
    for na in 0..=n_g {
        for nb in 0..=(n_g - na) {
            if na != nb {
                off = off.max(fock_overlap(&g, na, nb).norm());
            }
        }
    }
    Ok(GridOverlaps {
        t: t_end,
        diagonal,
        off_diagonal: off,
        one_quadrature: g,
        time_error,
        norm_drift: coarse.norm_drift.max(fine.norm_drift),
        max_spread: coarse.max_spread.max(fine.max_spread),
    })
}
