//! Per-mode dispersion and the semiclassical amplitude expansion.
//!
//! For a mode `k` the instantaneous energy is `eps = sqrt(|hbar k + f(t)|^2 + 1)`.
//! The evolved vacuum is expanded as `sum hbar^(s+j) A^j_s(t) phi^{s,s}(t)` with
//! `s + j <= 3`. With `w = epsdot/(4 eps^2)`, `r = epsdot/(2 eps)` and
//! `I(t) = int_0^t epsdot^2/(8 eps^3)` the coefficients are
//!
//! ```text
//! A^0_0 = 1            A^0_1 = -i w          A^0_2 = -w^2        A^0_3 = i w^3
//! A^1_0 = i I          A^1_1 = B = (wdot + r I)/(2 eps)
//! A^2_0 = -int r B     A^2_1 = (i/2eps) (Adot^1_1 + r (-2 w^2 - A^2_0))
//! A^3_0 = -int r A^2_1 A^1_2 = (i/4eps) (-2 w wdot - 2 r B)
//! ```
//!
//! `A^2_0` also has the closed form `-(w^2 + I^2)/2`, which the `A^2_1` integrand
//! uses directly.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quad::{cumulative_simpson, gauss_legendre5, Cumulative};
use crate::potential::{FieldJet, PotentialSpec};

/// Integer lattice vector labelling a Fourier mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeIndex {
    dim: u8,
    k: [i64; 3],
}

impl ModeIndex {
    pub fn new(k: &[i64]) -> Result<Self> {
        if !(1..=3).contains(&k.len()) {
            return Err(Error::InvalidDimension(k.len()));
        }
        let mut a = [0; 3];
        a[..k.len()].copy_from_slice(k);
        Ok(Self { dim: k.len() as u8, k: a })
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim: dim as u8, k: [0; 3] }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn components(&self) -> &[i64] {
        &self.k[..self.dim()]
    }

    pub fn norm_sq(&self) -> i64 {
        self.components().iter().map(|x| x * x).sum()
    }

    /// `hbar k`, padded with zeros to three components.
    pub fn momentum(&self, hbar: f64) -> [f64; 3] {
        [hbar * self.k[0] as f64, hbar * self.k[1] as f64, hbar * self.k[2] as f64]
    }

    /// Static energy `sqrt(|hbar k|^2 + 1)`.
    pub fn eps0(&self, hbar: f64) -> f64 {
        (hbar * hbar * self.norm_sq() as f64 + 1.0).sqrt()
    }
}

impl std::fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.components().iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(";"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dispersion {
    pub eps: f64,
    pub eps_dot: f64,
    pub omega: f64,
    pub eps0: f64,
}

/// `eps` and its first three time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct EpsJet {
    pub eps: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

pub(crate) fn eps_jet(p: &[f64; 3], jet: &FieldJet, dim: usize) -> EpsJet {
    let (mut xx, mut d1, mut d2, mut d3) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..dim {
        let x = p[i] + jet.f[i];
        xx += x * x;
        d1 += x * jet.d1[i];
        d2 += jet.d1[i] * jet.d1[i] + x * jet.d2[i];
        d3 += 3.0 * jet.d1[i] * jet.d2[i] + x * jet.d3[i];
    }
    let eps = (xx + 1.0).sqrt();
    let e1 = d1 / eps;
    let e2 = (d2 - e1 * e1) / eps;
    let e3 = (d3 - 3.0 * e1 * e2) / eps;
    EpsJet { eps, d1: e1, d2: e2, d3: e3 }
}

pub fn dispersion(k: &ModeIndex, t: f64, hbar: f64, spec: &PotentialSpec) -> Dispersion {
    let p = k.momentum(hbar);
    let e = eps_jet(&p, &spec.jet(t), spec.dim());
    Dispersion { eps: e.eps, eps_dot: e.d1, omega: e.eps / hbar, eps0: k.eps0(hbar) }
}

/// Local quantities entering the recurrences at one time.
#[derive(Debug, Clone, Copy)]
struct Local {
    eps: f64,
    epsdot: f64,
    w: f64,
    wd: f64,
    wdd: f64,
    r: f64,
    rd: f64,
    j: f64,
}

fn local(p: &[f64; 3], spec: &PotentialSpec, t: f64) -> Local {
    let e = eps_jet(p, &spec.jet(t), spec.dim());
    let (eps, e1, e2, e3) = (e.eps, e.d1, e.d2, e.d3);
    let eps2 = eps * eps;
    let eps3 = eps2 * eps;
    let w = e1 / (4.0 * eps2);
    let wd = e2 / (4.0 * eps2) - e1 * e1 / (2.0 * eps3);
    let wdd = e3 / (4.0 * eps2) - 1.5 * e1 * e2 / eps3 + 1.5 * e1 * e1 * e1 / (eps3 * eps);
    let r = e1 / (2.0 * eps);
    let rd = e2 / (2.0 * eps) - e1 * e1 / (2.0 * eps2);
    Local { eps, epsdot: e1, w, wd, wdd, r, rd, j: r * w }
}

impl Local {
    fn b(&self, i: f64) -> f64 {
        (self.wd + self.r * i) / (2.0 * self.eps)
    }

    /// Imaginary part of `A^2_1` given `I`.
    fn im_a21(&self, i: f64) -> f64 {
        let b = self.b(i);
        let a11_dot = (self.wdd + self.rd * i + self.r * self.j) / (2.0 * self.eps) - b * self.epsdot / self.eps;
        (a11_dot + self.r * (-1.5 * self.w * self.w + 0.5 * i * i)) / (2.0 * self.eps)
    }
}

/// All ten coefficients `A^j_s` at one time: `s` counts pairs, `j` is the power of hbar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffSnapshot {
    pub t: f64,
    // indexed [j][s]
    a: [[C64; 4]; 4],
}

impl CoeffSnapshot {
    /// `A^j_s`, defined for `s + j <= 3`.
    pub fn get(&self, s: usize, j: usize) -> Option<C64> {
        (s + j <= 3).then(|| self.a[j][s])
    }

    /// Every `(s, j, A^j_s)` with `s + j <= 3`.
    pub fn entries(&self) -> Vec<(usize, usize, C64)> {
        let mut v = Vec::with_capacity(10);
        for s in 0..=3 {
            for j in 0..=(3 - s) {
                v.push((s, j, self.a[j][s]));
            }
        }
        v
    }
}

/// Semiclassical coefficient table for one mode.
///
/// Stores the adaptive partitions for `I` and for `(A^2_0, -i A^3_0)`; values between
/// nodes come from a local Gauss-Legendre integral starting at the nearest node.
#[derive(Debug, Clone)]
pub struct CoeffTable {
    mode: ModeIndex,
    hbar: f64,
    spec: PotentialSpec,
    t_end: f64,
    t_stop: f64,
    p: [f64; 3],
    first: Cumulative<1>,
    second: Cumulative<2>,
}

fn check_hbar(hbar: f64) -> Result<()> {
    if hbar > 0.0 && hbar.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "hbar", reason: format!("must be positive and finite, got {hbar}") })
    }
}

pub fn coeff_table(k: &ModeIndex, hbar: f64, spec: &PotentialSpec, t_end: f64, tol: f64) -> Result<CoeffTable> {
    check_hbar(hbar)?;
    if k.dim() != spec.dim() {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: format!("mode dimension {} differs from potential dimension {}", k.dim(), spec.dim()),
        });
    }
    if !(tol > 1e-14 && tol < 1e-4) {
        return Err(Error::InvalidParameter { name: "tol", reason: format!("{tol:e} outside (1e-14, 1e-4)") });
    }
    let t_stop = t_end.clamp(0.0, spec.support_end());
    let p = k.momentum(hbar);
    let first = cumulative_simpson(|t| [local(&p, spec, t).j], 0.0, t_stop, tol)?;
    let mut table = CoeffTable {
        mode: *k,
        hbar,
        spec: *spec,
        t_end,
        t_stop,
        p,
        first,
        second: Cumulative { nodes: vec![0.0], values: vec![[0.0; 2]] },
    };
    let second = cumulative_simpson(
        |t| {
            let l = local(&table.p, &table.spec, t);
            let i = table.integral_i(t);
            [-l.r * l.b(i), -l.r * l.im_a21(i)]
        },
        0.0,
        t_stop,
        tol,
    )?;
    table.second = second;
    Ok(table)
}

impl CoeffTable {
    pub fn mode(&self) -> &ModeIndex {
        &self.mode
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// Accepted quadrature nodes for `I`, covering `[0, min(t_end, T)]`.
    pub fn time_grid(&self) -> &[f64] {
        &self.first.nodes
    }

    fn integral_i(&self, t: f64) -> f64 {
        let n = self.first.locate(t);
        let t0 = self.first.nodes[n];
        let (p, spec) = (&self.p, &self.spec);
        self.first.values[n][0] + gauss_legendre5(|x| [local(p, spec, x).j], t0, t)[0]
    }

    fn clamp_time(&self, t: f64) -> f64 {
        assert!(t <= self.t_end || self.t_stop >= self.spec.support_end(), "time {t} beyond table range {}", self.t_end);
        t.clamp(0.0, self.t_stop)
    }

    /// All coefficients at `t` (frozen beyond the support end).
    pub fn at(&self, t: f64) -> CoeffSnapshot {
        let tau = self.clamp_time(t);
        let l = local(&self.p, &self.spec, tau);
        let i = self.integral_i(tau);
        let n = self.second.locate(tau);
        let t0 = self.second.nodes[n];
        let rest = gauss_legendre5(
            |x| {
                let lx = local(&self.p, &self.spec, x);
                let ix = self.integral_i(x);
                [-lx.r * lx.b(ix), -lx.r * lx.im_a21(ix)]
            },
            t0,
            tau,
        );
        let a20 = self.second.values[n][0] + rest[0];
        let a30 = self.second.values[n][1] + rest[1];
        let b = l.b(i);
        let zero = C64::new(0.0, 0.0);
        let mut a = [[zero; 4]; 4];
        a[0][0] = C64::new(1.0, 0.0);
        a[0][1] = C64::new(0.0, -l.w);
        a[0][2] = C64::new(-l.w * l.w, 0.0);
        a[0][3] = C64::new(0.0, l.w * l.w * l.w);
        a[1][0] = C64::new(0.0, i);
        a[1][1] = C64::new(b, 0.0);
        a[1][2] = C64::new(0.0, -(l.w * l.wd + l.r * b) / (2.0 * l.eps));
        a[2][0] = C64::new(a20, 0.0);
        a[2][1] = C64::new(0.0, l.im_a21(i));
        a[3][0] = C64::new(0.0, a30);
        CoeffSnapshot { t, a }
    }

    /// `A^j_s(t)`.
    pub fn coeff(&self, s: usize, j: usize, t: f64) -> Option<C64> {
        self.at(t).get(s, j)
    }

    /// `A^0_0 + hbar A^1_0 + hbar^2 A^2_0 + hbar^3 A^3_0`.
    pub fn survival_amplitude(&self, t: f64) -> C64 {
        survival_from(&self.at(t), self.hbar)
    }

    /// `hbar A^0_1 + hbar^2 A^1_1 + hbar^3 A^2_1`.
    pub fn pair_amplitude(&self, t: f64) -> C64 {
        pair_from(&self.at(t), self.hbar)
    }

    /// Survival and pair amplitudes with the remainder estimate `c hbar^3 / eps0^4`.
    pub fn amplitudes(&self, t: f64, residual_c: f64) -> ModeAmplitudes {
        let snap = self.at(t);
        let survive = survival_from(&snap, self.hbar);
        let pair = pair_from(&snap, self.hbar);
        let e0 = self.mode.eps0(self.hbar);
        ModeAmplitudes {
            survive,
            pair,
            q: survive.norm_sqr(),
            p: pair.norm_sqr(),
            residual_bound: residual_c * self.hbar.powi(3) / e0.powi(4),
        }
    }
}

fn survival_from(s: &CoeffSnapshot, h: f64) -> C64 {
    s.a[0][0] + (s.a[1][0] + (s.a[2][0] + s.a[3][0] * h) * h) * h
}

fn pair_from(s: &CoeffSnapshot, h: f64) -> C64 {
    (s.a[0][1] + (s.a[1][1] + s.a[2][1] * h) * h) * h
}

pub fn survival_amplitude(table: &CoeffTable, t: f64) -> C64 {
    table.survival_amplitude(t)
}

pub fn pair_amplitude(table: &CoeffTable, t: f64) -> C64 {
    table.pair_amplitude(t)
}

/// Per-mode probabilities. `q` is the squared truncated survival amplitude and may
/// exceed 1 by up to about `residual_bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeAmplitudes {
    pub survive: C64,
    pub pair: C64,
    pub q: f64,
    pub p: f64,
    pub residual_bound: f64,
}

impl ModeAmplitudes {
    pub fn vacuum() -> Self {
        let one = C64::new(1.0, 0.0);
        Self { survive: one, pair: C64::new(0.0, 0.0), q: 1.0, p: 0.0, residual_bound: 0.0 }
    }
}

/// Leading-order `|A|^2 = 1 - hbar^2 epsdot^2 / (16 eps^4)`.
pub fn amplitude_square_expansion(k: &ModeIndex, t: f64, hbar: f64, spec: &PotentialSpec) -> f64 {
    let d = dispersion(k, t, hbar, spec);
    let e2 = d.eps * d.eps;
    1.0 - hbar * hbar * d.eps_dot * d.eps_dot / (16.0 * e2 * e2)
}

/// Leading pair intensity `hbar^2 epsdot^2 / (16 eps^4)` of one mode.
pub fn leading_pair_intensity(k: &ModeIndex, t: f64, hbar: f64, spec: &PotentialSpec) -> f64 {
    1.0 - amplitude_square_expansion(k, t, hbar, spec)
}
