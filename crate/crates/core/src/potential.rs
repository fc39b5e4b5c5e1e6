//! Smooth compactly supported homogeneous potentials `f: R -> R^dim`.
//!
//! Every potential here is `amplitude * b(t)` with a bump profile
//! `b(t) = exp(kappa * (1 - W^2 / (4 s (W - s))))`, `s = t - (center - W/2)`,
//! supported on `(center - W/2, center + W/2)` and equal to 1 at the center.
//! The canonical family uses `kappa = 4`, `W = T`, center `T/2`, which is
//! `exp(4 - T^2 / (t (T - t)))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bump profile parameters (time units except `sharpness`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpShape {
    pub center: f64,
    pub width: f64,
    pub sharpness: f64,
}

impl BumpShape {
    pub fn canonical(t_end: f64) -> Self {
        Self { center: 0.5 * t_end, width: t_end, sharpness: 4.0 }
    }
}

/// Potential value and its first three time derivatives, padded to three components.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FieldJet {
    pub f: [f64; 3],
    pub d1: [f64; 3],
    pub d2: [f64; 3],
    pub d3: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    dim: usize,
    t_end: f64,
    amplitude: [f64; 3],
    shape: BumpShape,
}

fn check_dim(dim: usize) -> Result<()> {
    if (1..=3).contains(&dim) {
        Ok(())
    } else {
        Err(Error::InvalidDimension(dim))
    }
}

impl PotentialSpec {
    pub fn with_shape(dim: usize, amplitude: &[f64], t_end: f64, shape: BumpShape) -> Result<Self> {
        check_dim(dim)?;
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::InvalidParameter { name: "T", reason: format!("must be positive and finite, got {t_end}") });
        }
        if amplitude.len() != dim {
            return Err(Error::InvalidParameter {
                name: "amplitude",
                reason: format!("length {} does not match dimension {dim}", amplitude.len()),
            });
        }
        if amplitude.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidParameter { name: "amplitude", reason: "entries must be finite".into() });
        }
        let lo = shape.center - 0.5 * shape.width;
        let hi = shape.center + 0.5 * shape.width;
        let slack = 1e-12 * t_end;
        if !(shape.width > 0.0 && shape.sharpness > 0.0 && lo >= -slack && hi <= t_end + slack) {
            return Err(Error::InvalidParameter {
                name: "shape",
                reason: format!("bump support [{lo}, {hi}] must lie in [0, {t_end}] with positive width and sharpness"),
            });
        }
        let mut a = [0.0; 3];
        a[..dim].copy_from_slice(amplitude);
        Ok(Self { dim, t_end, amplitude: a, shape })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Support endpoint `T`.
    pub fn support_end(&self) -> f64 {
        self.t_end
    }

    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude[..self.dim]
    }

    pub fn shape(&self) -> BumpShape {
        self.shape
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude.iter().all(|&a| a == 0.0)
    }

    /// Index of the only nonzero amplitude component, if there is exactly one.
    pub fn single_axis(&self) -> Option<usize> {
        let nz: Vec<usize> = (0..self.dim).filter(|&i| self.amplitude[i] != 0.0).collect();
        (nz.len() == 1).then(|| nz[0])
    }

    /// Scalar profile `b` and its first three derivatives.
    pub fn profile(&self, t: f64) -> [f64; 4] {
        let BumpShape { center, width, sharpness } = self.shape;
        let s = t - (center - 0.5 * width);
        if s <= 0.0 || s >= width {
            return [0.0; 4];
        }
        let p = s * (width - s);
        if p <= 1e-300 * self.t_end * self.t_end {
            return [0.0; 4];
        }
        let c = 0.25 * sharpness * width * width;
        let e = (sharpness - c / p).exp();
        if e == 0.0 {
            return [0.0; 4];
        }
        let pd = width - 2.0 * s;
        let p2 = p * p;
        let g1 = c * pd / p2;
        let g2 = c * (-2.0 / p2 - 2.0 * pd * pd / (p2 * p));
        let g3 = c * (12.0 * pd / (p2 * p) + 6.0 * pd * pd * pd / (p2 * p2));
        [e, g1 * e, (g2 + g1 * g1) * e, (g3 + 3.0 * g1 * g2 + g1 * g1 * g1) * e]
    }

    pub fn jet(&self, t: f64) -> FieldJet {
        let b = self.profile(t);
        let mut j = FieldJet::default();
        for i in 0..self.dim {
            let a = self.amplitude[i];
            j.f[i] = a * b[0];
            j.d1[i] = a * b[1];
            j.d2[i] = a * b[2];
            j.d3[i] = a * b[3];
        }
        j
    }

    pub fn value(&self, t: f64) -> Vec<f64> {
        let b = self.profile(t)[0];
        self.amplitude().iter().map(|a| a * b).collect()
    }

    pub fn derivative(&self, t: f64) -> Vec<f64> {
        let b = self.profile(t)[1];
        self.amplitude().iter().map(|a| a * b).collect()
    }

    pub fn amplitude_norm(&self) -> f64 {
        self.amplitude.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// Euclidean norm of `fdot(t)`.
    pub fn derivative_norm(&self, t: f64) -> f64 {
        self.amplitude_norm() * self.profile(t)[1].abs()
    }
}

/// Canonical bump `amplitude * exp(4 - T^2/(t (T - t)))` on `(0, T)`.
pub fn make_bump(dim: usize, amplitude: &[f64], t_end: f64) -> Result<PotentialSpec> {
    check_dim(dim)?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter { name: "T", reason: format!("must be positive and finite, got {t_end}") });
    }
    PotentialSpec::with_shape(dim, amplitude, t_end, BumpShape::canonical(t_end))
}

pub fn eval_potential(spec: &PotentialSpec, t: f64) -> Vec<f64> {
    spec.value(t)
}

pub fn eval_potential_deriv(spec: &PotentialSpec, t: f64) -> Vec<f64> {
    spec.derivative(t)
}

fn refine_max<F: Fn(f64) -> f64>(g: F, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    for _ in 0..80 {
        if g1 < g2 {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + r * (b - a);
            g2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - r * (b - a);
            g1 = g(x1);
        }
    }
    g1.max(g2)
}

fn sampled_max<F: Fn(f64) -> f64>(g: F, lo: f64, hi: f64) -> f64 {
    const N: usize = 4096;
    let h = (hi - lo) / N as f64;
    let (mut best, mut at) = (0.0, 0usize);
    for i in 0..=N {
        let v = g(lo + h * i as f64);
        if v > best {
            best = v;
            at = i;
        }
    }
    if best == 0.0 {
        return 0.0;
    }
    let a = lo + h * at.saturating_sub(1) as f64;
    let b = (lo + h * (at + 1) as f64).min(hi);
    best.max(refine_max(&g, a, b))
}

/// `(||f||_inf, ||fdot||_inf)` by dense sampling and golden-section refinement.
pub fn sup_norms(spec: &PotentialSpec) -> (f64, f64) {
    if spec.is_zero() {
        return (0.0, 0.0);
    }
    let BumpShape { center, width, .. } = spec.shape;
    let lo = center - 0.5 * width;
    let hi = center + 0.5 * width;
    let an = spec.amplitude_norm();
    let f = sampled_max(|t| spec.profile(t)[0].abs(), lo, hi);
    let fd = sampled_max(|t| spec.profile(t)[1].abs(), lo, hi);
    (an * f, an * fd)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_input() {
        assert_eq!(make_bump(4, &[1.0; 4], 1.0), Err(Error::InvalidDimension(4)));
        assert!(make_bump(1, &[1.0], 0.0).is_err());
        assert!(make_bump(2, &[1.0], 1.0).is_err());
        let bad = BumpShape { center: 0.9, width: 0.5, sharpness: 4.0 };
        assert!(PotentialSpec::with_shape(1, &[1.0], 1.0, bad).is_err());
    }

    #[test]
    fn midpoint_normalization() {
        let s = make_bump(1, &[2.0], 2.0).unwrap();
        assert_eq!(eval_potential(&s, 1.0), vec![2.0]);
        let s = make_bump(2, &[1.0, 0.0], 1.0).unwrap();
        assert_eq!(eval_potential(&s, 0.5), vec![1.0, 0.0]);
    }

    #[test]
    fn quarter_point_closed_form() {
        let s = make_bump(2, &[1.0, 0.0], 1.0).unwrap();
        let v = eval_potential(&s, 0.25);
        assert!((v[0] - (-4.0f64 / 3.0).exp()).abs() < 1e-15);
        assert!((v[0] - 0.263_597_138_115_727_7).abs() < 1e-15);
        assert_eq!(v[1], 0.0);
    }

    #[test]
    fn zero_outside_and_at_endpoints() {
        let s = make_bump(3, &[1.0, -2.0, 0.5], 1.0).unwrap();
        for t in [-1.0, 0.0, 1.0, 1.5] {
            assert!(eval_potential(&s, t).iter().all(|&x| x == 0.0));
            assert!(eval_potential_deriv(&s, t).iter().all(|&x| x == 0.0));
        }
        assert!(eval_potential_deriv(&s, 0.5).iter().all(|&x| x.abs() < 1e-15));
    }

    #[test]
    fn higher_derivatives_match_differences() {
        let shapes = [BumpShape::canonical(1.0), BumpShape { center: 0.45, width: 0.8, sharpness: 2.5 }];
        for shape in shapes {
            let s = PotentialSpec::with_shape(1, &[1.0], 1.0, shape).unwrap();
            for &t in &[0.12, 0.3, 0.47, 0.6, 0.8] {
                let h = 1e-5;
                let p = s.profile(t);
                let pp = s.profile(t + h);
                let pm = s.profile(t - h);
                for k in 0..3 {
                    let fd = (pp[k] - pm[k]) / (2.0 * h);
                    assert!((fd - p[k + 1]).abs() <= 1e-6 * (1.0 + p[k + 1].abs()), "t={t} k={k} {fd} {}", p[k + 1]);
                }
            }
        }
    }

    #[test]
    fn sup_norm_values() {
        assert_eq!(sup_norms(&make_bump(1, &[0.0], 1.0).unwrap()), (0.0, 0.0));
        let (f, _) = sup_norms(&make_bump(1, &[3.0], 1.0).unwrap());
        assert!((f - 3.0).abs() < 1e-12);
    }
}
