//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use kgvac_core::*;

/// Composite 8-point Gauss-Legendre rule on `panels` equal panels.
#[allow(clippy::excessive_precision)]
pub fn gauss_legendre<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 4] = [0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363];
    const W: [f64; 4] = [0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763];
    if b == a {
        return 0.0;
    }
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        let mut s = 0.0;
        for i in 0..4 {
            s += W[i] * (f(mid - half * X[i]) + f(mid + half * X[i]));
        }
        total += s * half;
    }
    total
}

/// Energy and its time derivative straight from the potential and the chain rule.
pub fn eps_and_rate(spec: &PotentialSpec, k: &[i64], hbar: f64, t: f64) -> (f64, f64) {
    let f = eval_potential(spec, t);
    let fd = eval_potential_deriv(spec, t);
    let mut xx = 0.0;
    let mut dot = 0.0;
    for i in 0..k.len() {
        let x = hbar * k[i] as f64 + f[i];
        xx += x * x;
        dot += x * fd[i];
    }
    let e = (xx + 1.0).sqrt();
    (e, dot / e)
}

/// Five-point first derivative.
pub fn diff1<F: Fn(f64) -> f64>(f: F, t: f64, h: f64) -> f64 {
    (f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h)
}

/// Five-point second derivative.
pub fn diff2<F: Fn(f64) -> f64>(f: F, t: f64, h: f64) -> f64 {
    (-f(t - 2.0 * h) + 16.0 * f(t - h) - 30.0 * f(t) + 16.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h * h)
}

/// The recurrence solved literally: integrals by composite quadrature, time
/// derivatives of earlier coefficients by finite differences.
pub struct RecurrenceOracle<'a> {
    pub spec: &'a PotentialSpec,
    pub k: Vec<i64>,
    pub hbar: f64,
}

impl RecurrenceOracle<'_> {
    pub fn eps(&self, t: f64) -> f64 {
        eps_and_rate(self.spec, &self.k, self.hbar, t).0
    }
    pub fn rate(&self, t: f64) -> f64 {
        eps_and_rate(self.spec, &self.k, self.hbar, t).1
    }
    /// `w = epsdot / (4 eps^2)`, so that `A^0_1 = -i w`.
    pub fn w(&self, t: f64) -> f64 {
        let (e, d) = eps_and_rate(self.spec, &self.k, self.hbar, t);
        d / (4.0 * e * e)
    }
    pub fn r(&self, t: f64) -> f64 {
        let (e, d) = eps_and_rate(self.spec, &self.k, self.hbar, t);
        d / (2.0 * e)
    }
    /// `Im A^1_0 = int_0^t epsdot^2 / (8 eps^3)`.
    pub fn a10(&self, t: f64) -> f64 {
        gauss_legendre(
            |s| {
                let (e, d) = eps_and_rate(self.spec, &self.k, self.hbar, s);
                d * d / (8.0 * e * e * e)
            },
            0.0,
            t,
            400,
        )
    }
    /// `A^1_1 = (i dA^0_1/dt - i r A^1_0) / (2 eps)`, real.
    pub fn a11(&self, t: f64) -> f64 {
        let wd = diff1(|s| self.w(s), t, 1e-3);
        (wd + self.r(t) * self.a10(t)) / (2.0 * self.eps(t))
    }
    /// `A^2_0 = -int r A^1_1`.
    pub fn a20(&self, t: f64) -> f64 {
        -gauss_legendre(|s| self.r(s) * self.a11(s), 0.0, t, 60)
    }
    /// `Im A^2_1` from `(i dA^1_1/dt + i r (2 A^0_2 - A^2_0)) / (2 eps)`.
    pub fn a21(&self, t: f64) -> f64 {
        let a11d = diff1(|s| self.a11(s), t, 1e-3);
        let w = self.w(t);
        let a02 = -w * w;
        (a11d + self.r(t) * (2.0 * a02 - self.a20(t))) / (2.0 * self.eps(t))
    }
}
