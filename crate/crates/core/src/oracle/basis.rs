//! Instantaneous pair basis `phi^{s,s}` as explicit functions of `(Q, Qbar)`.
//!
//! With one-quadrature raising operators `c+` (Hermite ladder in `Q` and `Qbar`),
//! `a+ = (c+_Q - i c+_Qbar)/sqrt 2` and `b+ = (c+_Q + i c+_Qbar)/sqrt 2`, and
//! `|na, nb> = (a+)^na (b+)^nb / sqrt(na! nb!) |0, 0>`; `phi^{s,s} = |s, s>`.

use num_complex::Complex64 as C64;

use super::gaussian::GaussianModeState;
use crate::error::{Error, Result};
use crate::mode::{dispersion, ModeIndex};
use crate::numerics::special::{binomial, factorial, hermite_functions};
use crate::potential::PotentialSpec;

/// Expansion of `|na, nb>` over products `|P>_Q |R>_Qbar` as `(P, R, coefficient)`.
pub fn fock_expansion(na: usize, nb: usize) -> Vec<(usize, usize, C64)> {
    let n = na + nb;
    let mut acc = vec![C64::new(0.0, 0.0); n + 1];
    let mi = C64::new(0.0, -1.0);
    let pi = C64::new(0.0, 1.0);
    for i in 0..=na {
        for j in 0..=nb {
            let r = i + j;
            let p = n - r;
            let c = binomial(na, i) * binomial(nb, j) * (factorial(p) * factorial(r)).sqrt();
            acc[r] += mi.powi(i as i32) * pi.powi(j as i32) * c;
        }
    }
    let pre = 2f64.powf(-(n as f64) / 2.0) / (factorial(na) * factorial(nb)).sqrt();
    acc.into_iter().enumerate().filter(|(_, c)| c.norm() > 0.0).map(|(r, c)| (n - r, r, c * pre)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstantaneousBasis {
    pub omega: f64,
    pub eps: f64,
    pub hbar: f64,
    pub s_max: usize,
}

impl InstantaneousBasis {
    /// Builds the basis and checks one-quadrature orthonormality of `h_0..=h_{2 s_max + 1}`.
    pub fn new(eps: f64, hbar: f64, s_max: usize) -> Result<Self> {
        if !(eps > 0.0 && hbar > 0.0) {
            return Err(Error::InvalidParameter { name: "eps", reason: "energy and hbar must be positive".into() });
        }
        let b = Self { omega: eps / hbar, eps, hbar, s_max };
        let dev = b.gram_deviation();
        if dev > 1e-10 {
            return Err(Error::BasisNotOrthonormal(dev));
        }
        Ok(b)
    }

    pub fn at(k: &ModeIndex, t: f64, hbar: f64, spec: &PotentialSpec, s_max: usize) -> Result<Self> {
        Self::new(dispersion(k, t, hbar, spec).eps, hbar, s_max)
    }

    /// Largest deviation of the one-quadrature Gram matrix from the identity (trapezoid rule).
    pub fn gram_deviation(&self) -> f64 {
        let n = 2 * self.s_max + 1;
        let dxi = 0.02;
        let mut g = vec![vec![0.0; n + 1]; n + 1];
        let mut i = -800i32;
        while i <= 800 {
            let h = hermite_functions(n, dxi * i as f64);
            for a in 0..=n {
                for b in 0..=a {
                    g[a][b] += h[a] * h[b] * dxi;
                }
            }
            i += 1;
        }
        let mut dev = 0.0f64;
        for a in 0..=n {
            for b in 0..=a {
                let e = if a == b { 1.0 } else { 0.0 };
                dev = dev.max((g[a][b] - e).abs());
            }
        }
        dev
    }

    fn scale(&self) -> f64 {
        self.eps.sqrt() / self.hbar
    }

    /// Normalized one-quadrature functions `h_0..=h_{n_max}` at coordinate `q`.
    pub fn hermite(&self, n_max: usize, q: f64) -> Vec<f64> {
        let s = self.scale();
        let norm = s.sqrt();
        hermite_functions(n_max, q * s).into_iter().map(|h| h * norm).collect()
    }

    /// `phi^{na,nb}(q, qbar)`.
    pub fn state(&self, na: usize, nb: usize, q: f64, qbar: f64) -> C64 {
        let n = na + nb;
        let hq = self.hermite(n, q);
        let hb = self.hermite(n, qbar);
        fock_expansion(na, nb).into_iter().map(|(p, r, c)| c * (hq[p] * hb[r])).sum()
    }

    /// `phi^{s,s}(q, qbar)`, which is real.
    pub fn pair_state(&self, s: usize, q: f64, qbar: f64) -> f64 {
        self.state(s, s, q, qbar).re
    }
}

/// `<phi^{na,nb}|psi>` from one-quadrature overlaps `g` (needs `g.len() > na + nb`).
pub fn fock_overlap(g: &[C64], na: usize, nb: usize) -> C64 {
    fock_expansion(na, nb).into_iter().map(|(p, r, c)| c.conj() * g[p] * g[r]).sum()
}

/// `<phi^{s,s}|psi>` against the given basis.
pub fn overlap_basis(state: &GaussianModeState, basis: &InstantaneousBasis, s: usize) -> Result<C64> {
    if s > basis.s_max {
        return Err(Error::InvalidParameter { name: "s", reason: format!("{s} exceeds basis s_max {}", basis.s_max) });
    }
    if !(state.width.re > 0.0) {
        return Err(Error::NonNormalizable(state.width.re));
    }
    Ok(state.vacuum_overlap_at(basis.eps) * state.squeeze_at(basis.eps).powi(s as i32))
}

/// Sup-norm residual of `d/dt phi^{s,s} = (epsdot/2eps)(s phi^{s-1,s-1} - (s+1) phi^{s+1,s+1})`
/// with a central difference of step `step`, relative to the size of the right-hand terms.
pub fn basis_derivative_residual(k: &ModeIndex, t: f64, hbar: f64, spec: &PotentialSpec, s: usize, step: f64) -> Result<f64> {
    if s == 0 || s > 2 {
        return Err(Error::InvalidParameter { name: "s", reason: format!("{s} outside 1..=2") });
    }
    let d = dispersion(k, t, hbar, spec);
    let here = InstantaneousBasis::new(d.eps, hbar, s + 1)?;
    let plus = InstantaneousBasis::new(dispersion(k, t + step, hbar, spec).eps, hbar, s)?;
    let minus = InstantaneousBasis::new(dispersion(k, t - step, hbar, spec).eps, hbar, s)?;
    let c = d.eps_dot / (2.0 * d.eps);
    let sigma = 1.0 / here.scale();
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    const M: i32 = 24;
    for i in -M..=M {
        for j in -M..=M {
            let q = 6.0 * sigma * i as f64 / M as f64;
            let qb = 6.0 * sigma * j as f64 / M as f64;
            let fd = (plus.pair_state(s, q, qb) - minus.pair_state(s, q, qb)) / (2.0 * step);
            let lo = s as f64 * here.pair_state(s - 1, q, qb);
            let hi = (s + 1) as f64 * here.pair_state(s + 1, q, qb);
            worst = worst.max((fd - c * (lo - hi)).abs());
            scale = scale.max(c.abs() * (lo.abs() + hi.abs()));
        }
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

/// [`basis_derivative_residual`] at the default step `1e-6`.
pub fn basis_derivative_check(k: &ModeIndex, t: f64, hbar: f64, spec: &PotentialSpec, s: usize) -> Result<f64> {
    basis_derivative_residual(k, t, hbar, spec, s, 1e-6)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_pair_state_closed_form() {
        let b = InstantaneousBasis::new(1.0, 1.0, 2).unwrap();
        for &(x, y) in &[(0.0, 0.0), (0.3, -1.1), (1.7, 0.4)] {
            let phi00 = b.pair_state(0, x, y);
            let want = (x * x + y * y - 1.0) * phi00;
            assert!((b.pair_state(1, x, y) - want).abs() < 1e-14);
            assert!(b.state(1, 1, x, y).im.abs() < 1e-15);
        }
    }

    #[test]
    fn fock_expansion_is_normalized() {
        for na in 0..4 {
            for nb in 0..4 {
                let n: f64 = fock_expansion(na, nb).iter().map(|(_, _, c)| c.norm_sqr()).sum();
                assert!((n - 1.0).abs() < 1e-13, "{na} {nb} {n}");
            }
        }
    }

    #[test]
    fn overlap_rejects_large_s() {
        let spec = crate::potential::make_bump(1, &[0.0], 1.0).unwrap();
        let st = crate::oracle::evolve_mode(&ModeIndex::zero(1), 0.5, &spec, 0.1, 1e-10).unwrap();
        let b = InstantaneousBasis::new(1.0, 0.5, 1).unwrap();
        assert!(overlap_basis(&st, &b, 2).is_err());
        assert!((overlap_basis(&st, &b, 0).unwrap().norm() - 1.0).abs() < 1e-9);
    }
}
