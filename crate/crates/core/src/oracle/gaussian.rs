//! Mode-function evolution and closed-form overlaps.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::mode::{dispersion, ModeIndex};
use crate::numerics::ode::{integrate_to_times, StepControl};
use crate::numerics::special::factorial;
use crate::potential::PotentialSpec;

/// Relative Wronskian drift that aborts an evolution.
pub const WRONSKIAN_LIMIT: f64 = 1e-6;

/// Evolved vacuum of one mode at time `t`.
///
/// In each quadrature the state is `N exp(-width Q^2 / (2 hbar^2))`, with
/// `width = -i hbar conj(udot)/conj(u)` in energy units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianModeState {
    pub t: f64,
    pub hbar: f64,
    pub eps0: f64,
    /// Instantaneous energy at `t`.
    pub eps: f64,
    pub u: C64,
    pub udot: C64,
    /// `int_0^t omega`.
    pub phase: f64,
    pub width: C64,
    /// Total weight of the diagonal pair ladder, `eps0 / (|u|^2 Re width)`; 1 for exact evolution.
    pub norm_check: f64,
}

impl GaussianModeState {
    /// Relative deviation of `Im(conj(u) udot)` from `-omega(0)`.
    pub fn wronskian_drift(&self) -> f64 {
        let w0 = self.eps0 / self.hbar;
        ((self.u.conj() * self.udot).im + w0).abs() / w0
    }

    /// Squeeze parameter relative to a basis of energy `eps_b`.
    pub fn squeeze_at(&self, eps_b: f64) -> C64 {
        (eps_b - self.width) / (eps_b + self.width)
    }

    /// Overlap with the instantaneous vacuum of energy `eps_b`.
    pub fn vacuum_overlap_at(&self, eps_b: f64) -> C64 {
        let rot = C64::from_polar(1.0, self.phase) / self.u.conj();
        (eps_b * self.eps0).sqrt() * 2.0 / (eps_b + self.width) * rot
    }

    /// `<phi^{s,s}|psi>` for the instantaneous basis at `t`.
    pub fn overlap(&self, s: usize) -> C64 {
        self.vacuum_overlap_at(self.eps) * self.squeeze_at(self.eps).powi(s as i32)
    }

    pub fn vacuum_probability(&self) -> f64 {
        self.overlap(0).norm_sqr()
    }

    pub fn pair_probability(&self) -> f64 {
        self.overlap(1).norm_sqr()
    }

    /// One-quadrature Hermite components `g_0..=g_{n_max}` against energy `eps_b`.
    /// `g_0` uses the principal square root of the two-quadrature vacuum overlap, so
    /// only products `g_m g_n` are branch independent.
    pub fn one_quadrature_overlaps(&self, eps_b: f64, n_max: usize) -> Vec<C64> {
        let g0 = self.vacuum_overlap_at(eps_b).sqrt();
        let z = self.squeeze_at(eps_b);
        (0..=n_max)
            .map(|n| {
                if n % 2 == 1 {
                    C64::new(0.0, 0.0)
                } else {
                    let m = n / 2;
                    g0 * (z * 0.5).powi(m as i32) * (factorial(2 * m).sqrt() / factorial(m))
                }
            })
            .collect()
    }
}

fn state_from(y: &[f64; 5], t: f64, hbar: f64, eps0: f64, eps: f64) -> Result<GaussianModeState> {
    let u = C64::new(y[0], y[1]);
    let udot = C64::new(y[2], y[3]);
    let width = C64::new(0.0, -hbar) * udot.conj() / u.conj();
    if !(width.re > 0.0) {
        return Err(Error::NonNormalizable(width.re));
    }
    let norm_check = eps0 / (u.norm_sqr() * width.re);
    Ok(GaussianModeState { t, hbar, eps0, eps, u, udot, phase: y[4], width, norm_check })
}

/// Evolves the vacuum of mode `k` and returns the state at each of `times` (increasing, `>= 0`).
pub fn evolve_mode_at(k: &ModeIndex, hbar: f64, spec: &PotentialSpec, times: &[f64], tol: f64) -> Result<Vec<GaussianModeState>> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidParameter { name: "hbar", reason: format!("must be positive, got {hbar}") });
    }
    if !(tol > 1e-13 && tol < 1e-6) {
        return Err(Error::InvalidParameter { name: "tol", reason: format!("{tol:e} outside (1e-13, 1e-6)") });
    }
    if k.dim() != spec.dim() {
        return Err(Error::InvalidParameter { name: "k", reason: "mode dimension differs from potential dimension".into() });
    }
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidParameter { name: "times", reason: "must be non-negative and increasing".into() });
    }
    let d0 = dispersion(k, 0.0, hbar, spec);
    let w0 = d0.omega;
    let t_max = times.last().copied().unwrap_or(0.0);
    // interior checkpoints for the Wronskian
    let mut grid: Vec<(f64, Option<usize>)> = (1..32).map(|i| (t_max * i as f64 / 32.0, None)).collect();
    grid.extend(times.iter().enumerate().map(|(i, &t)| (t, Some(i))));
    grid.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.is_none().cmp(&b.1.is_none())));
    let grid_times: Vec<f64> = grid.iter().map(|g| g.0).collect();

    let p = k.momentum(hbar);
    let dim = spec.dim();
    let omega = |t: f64| -> f64 {
        let f = spec.jet(t).f;
        let mut xx = 0.0;
        for i in 0..dim {
            let x = p[i] + f[i];
            xx += x * x;
        }
        (xx + 1.0).sqrt() / hbar
    };
    let mut ctl = StepControl::new(tol);
    ctl.atol = tol * 1e-2;
    ctl.h_init = Some(0.01 / w0);
    let ys = integrate_to_times(
        |t, y: &[f64; 5]| {
            let w = omega(t);
            let w2 = w * w;
            [y[2], y[3], -w2 * y[0], -w2 * y[1], w]
        },
        0.0,
        [1.0, 0.0, 0.0, -w0, 0.0],
        &grid_times,
        &ctl,
    )?;
    let mut out = vec![None; times.len()];
    for (y, (t, slot)) in ys.iter().zip(&grid) {
        let drift = ((y[0] * y[3] - y[1] * y[2]) + w0).abs() / w0;
        if drift > WRONSKIAN_LIMIT || !drift.is_finite() {
            return Err(Error::WronskianDrift { t: *t, drift, limit: WRONSKIAN_LIMIT });
        }
        if let Some(i) = slot {
            let eps = omega(*t) * hbar;
            out[*i] = Some(state_from(y, *t, hbar, d0.eps0, eps)?);
        }
    }
    Ok(out.into_iter().map(|s| s.expect("every output time visited")).collect())
}

pub fn evolve_mode(k: &ModeIndex, hbar: f64, spec: &PotentialSpec, t_end: f64, tol: f64) -> Result<GaussianModeState> {
    Ok(evolve_mode_at(k, hbar, spec, &[t_end.max(0.0)], tol)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::make_bump;

    #[test]
    fn static_vacuum_is_stationary() {
        let spec = make_bump(2, &[0.0, 0.0], 1.0).unwrap();
        let k = ModeIndex::new(&[2, -1]).unwrap();
        let states = evolve_mode_at(&k, 0.3, &spec, &[0.0, 0.5, 1.0, 2.0], 1e-11).unwrap();
        for s in states {
            let ov = s.overlap(0);
            assert!((ov - C64::new(1.0, 0.0)).norm() < 1e-8, "{ov}");
            assert!((s.width - C64::new(s.eps0, 0.0)).norm() < 1e-8 * s.eps0);
            assert!(s.wronskian_drift() < 1e-9);
        }
    }

    #[test]
    fn initial_state_is_vacuum() {
        let spec = make_bump(1, &[1.0], 1.0).unwrap();
        let s = evolve_mode(&ModeIndex::new(&[3]).unwrap(), 0.2, &spec, 0.0, 1e-11).unwrap();
        assert_eq!(s.phase, 0.0);
        assert!((s.width.re - s.eps0).abs() < 1e-14 && s.width.im.abs() < 1e-14);
        assert!((s.overlap(0) - 1.0).norm() < 1e-14);
    }

    #[test]
    fn ladder_weights_sum_to_one() {
        let spec = make_bump(1, &[1.0], 1.0).unwrap();
        let s = evolve_mode(&ModeIndex::zero(1), 0.3, &spec, 0.4, 1e-11).unwrap();
        let z2 = s.squeeze_at(s.eps).norm_sqr();
        let total = s.vacuum_probability() / (1.0 - z2);
        assert!((total - 1.0).abs() < 1e-8);
        assert!((s.norm_check - 1.0).abs() < 1e-8);
    }
}
