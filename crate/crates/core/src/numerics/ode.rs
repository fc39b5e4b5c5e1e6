//! Dormand-Prince 5(4) with adaptive step control.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; `None` picks a small fraction of the span.
    pub h_init: Option<f64>,
    /// Largest allowed step.
    pub h_max: f64,
    pub max_steps: usize,
}

impl StepControl {
    pub fn new(rtol: f64) -> Self {
        Self { rtol, atol: rtol * 1e-3, h_init: None, h_max: f64::INFINITY, max_steps: 50_000_000 }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        out[i] += h * s;
    }
    out
}

/// Integrates `y' = rhs(t, y)` from `t0` and returns the state at each of the
/// increasing `times` (all `>= t0`). Steps are clipped to land on every output time.
pub fn integrate_to_times<const N: usize, F>(mut rhs: F, t0: f64, y0: [f64; N], times: &[f64], ctl: &StepControl) -> Result<Vec<[f64; N]>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut out = Vec::with_capacity(times.len());
    let mut t = t0;
    let mut y = y0;
    let t_final = times.iter().copied().fold(t0, f64::max);
    let span = t_final - t0;
    let mut h = ctl.h_init.unwrap_or(if span > 0.0 { span * 1e-4 } else { 1e-6 }).min(ctl.h_max);
    let mut k1 = rhs(t, &y);
    let mut steps = 0usize;
    for &target in times {
        if target < t0 {
            return Err(Error::InvalidParameter { name: "times", reason: format!("output time {target} precedes start {t0}") });
        }
        while t < target {
            steps += 1;
            if steps > ctl.max_steps {
                return Err(Error::StepSizeUnderflow { t, h });
            }
            let mut hs = h.min(target - t);
            let land = hs >= target - t;
            if land {
                hs = target - t;
            }
            let k2 = rhs(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
            let k3 = rhs(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
            let k4 = rhs(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = rhs(t + C5 * hs, &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
            let k6 = rhs(t + hs, &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
            let y_new = axpy(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            let t_new = if land { target } else { t + hs };
            let k7 = rhs(t_new, &y_new);
            let mut acc = 0.0;
            for i in 0..N {
                let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = ctl.atol + ctl.rtol * y[i].abs().max(y_new[i].abs());
                acc += (e / sc) * (e / sc);
            }
            let err = (acc / N as f64).sqrt();
            if !err.is_finite() {
                h = 0.25 * hs;
            } else if err <= 1.0 {
                t = t_new;
                y = y_new;
                k1 = k7;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // a clipped landing step says nothing about the natural step size
                if !land || fac < 1.0 {
                    h = (hs * fac).min(ctl.h_max);
                }
            } else {
                h = hs * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            }
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { t, h });
            }
        }
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_energy() {
        let ctl = StepControl::new(1e-11);
        let ys = integrate_to_times(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], &[1.0, 10.0, 50.0], &ctl).unwrap();
        for (t, y) in [1.0f64, 10.0, 50.0].iter().zip(ys) {
            assert!((y[0] - t.cos()).abs() < 1e-8, "{t} {y:?}");
            assert!((y[1] + t.sin()).abs() < 1e-8);
        }
    }

    #[test]
    fn exponential_growth() {
        let ctl = StepControl::new(1e-12);
        let ys = integrate_to_times(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], &[2.0], &ctl).unwrap();
        assert!((ys[0][0] - 2f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn zero_span_returns_initial() {
        let ctl = StepControl::new(1e-10);
        let ys = integrate_to_times(|_, y: &[f64; 1]| [y[0]], 0.0, [3.0], &[0.0], &ctl).unwrap();
        assert_eq!(ys[0][0], 3.0);
    }
}
