//! Quadrature: adaptive Simpson with a retained partition, fixed Gauss-Legendre,
//! and globally adaptive Gauss-Kronrod (7/15).

use crate::error::{Error, Result};

const INITIAL_PANELS: usize = 16;
const MAX_DEPTH: u32 = 48;

/// Accepted Simpson partition with running integrals at every node.
#[derive(Debug, Clone)]
pub struct Cumulative<const N: usize> {
    pub nodes: Vec<f64>,
    pub values: Vec<[f64; N]>,
}

impl<const N: usize> Cumulative<N> {
    /// Index of the last node `<= t`, clamped to the partition.
    pub fn locate(&self, t: f64) -> usize {
        match self.nodes.partition_point(|&x| x <= t) {
            0 => 0,
            i => (i - 1).min(self.nodes.len() - 1),
        }
    }

    pub fn total(&self) -> [f64; N] {
        *self.values.last().expect("non-empty partition")
    }
}

struct Segment<const N: usize> {
    a: f64,
    b: f64,
    fa: [f64; N],
    fm: [f64; N],
    fb: [f64; N],
    whole: [f64; N],
    depth: u32,
}

#[inline]
fn simpson<const N: usize>(h: f64, fa: &[f64; N], fm: &[f64; N], fb: &[f64; N]) -> [f64; N] {
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = h / 6.0 * (fa[i] + 4.0 * fm[i] + fb[i]);
    }
    out
}

/// Adaptive Simpson on `[a, b]` keeping every accepted interval.
///
/// The absolute tolerance is shared out in proportion to interval length, so the
/// total error estimate stays below `tol` in every component.
pub fn cumulative_simpson<const N: usize, F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Cumulative<N>>
where
    F: FnMut(f64) -> [f64; N],
{
    let mut out = Cumulative { nodes: vec![a], values: vec![[0.0; N]] };
    if b <= a {
        return Ok(out);
    }
    let len = b - a;
    let mut stack: Vec<Segment<N>> = Vec::with_capacity(64);
    let h0 = len / INITIAL_PANELS as f64;
    let mut edges = Vec::with_capacity(INITIAL_PANELS + 1);
    for i in 0..=INITIAL_PANELS {
        let x = if i == INITIAL_PANELS { b } else { a + h0 * i as f64 };
        edges.push((x, f(x)));
    }
    for i in (0..INITIAL_PANELS).rev() {
        let (x0, f0) = edges[i];
        let (x1, f1) = edges[i + 1];
        let xm = 0.5 * (x0 + x1);
        let fm = f(xm);
        stack.push(Segment { a: x0, b: x1, fa: f0, fm, fb: f1, whole: simpson(x1 - x0, &f0, &fm, &f1), depth: 0 });
    }

    let mut acc = [0.0; N];
    let mut worst: Option<(f64, f64, f64)> = None;
    while let Some(seg) = stack.pop() {
        let m = 0.5 * (seg.a + seg.b);
        let lm = 0.5 * (seg.a + m);
        let rm = 0.5 * (m + seg.b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(m - seg.a, &seg.fa, &flm, &seg.fm);
        let right = simpson(seg.b - m, &seg.fm, &frm, &seg.fb);
        let mut err = 0.0f64;
        for i in 0..N {
            err = err.max((left[i] + right[i] - seg.whole[i]).abs() / 15.0);
        }
        let local_tol = tol * (seg.b - seg.a) / len;
        let converged = err <= local_tol;
        if converged || seg.depth >= MAX_DEPTH || !err.is_finite() {
            if !converged && worst.is_none_or(|w| err > w.2 || !err.is_finite()) {
                worst = Some((seg.a, seg.b, err));
            }
            for i in 0..N {
                let s = left[i] + right[i];
                acc[i] += s + (s - seg.whole[i]) / 15.0;
            }
            out.nodes.push(seg.b);
            out.values.push(acc);
        } else {
            let d = seg.depth + 1;
            stack.push(Segment { a: m, b: seg.b, fa: seg.fm, fm: frm, fb: seg.fb, whole: right, depth: d });
            stack.push(Segment { a: seg.a, b: m, fa: seg.fa, fm: flm, fb: seg.fm, whole: left, depth: d });
        }
    }
    if let Some((a, b, err)) = worst {
        return Err(Error::QuadratureNonConvergence { a, b, err, tol });
    }
    Ok(out)
}

/// Scalar adaptive Simpson with absolute tolerance.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let c = cumulative_simpson(|x| [f(x)], a, b, tol)?;
    Ok(c.total()[0])
}

const GL5_X: [f64; 5] = [-0.906_179_845_938_664, -0.538_469_310_105_683_1, 0.0, 0.538_469_310_105_683_1, 0.906_179_845_938_664];
const GL5_W: [f64; 5] =
    [0.236_926_885_056_189_08, 0.478_628_670_499_366_47, 0.568_888_888_888_888_9, 0.478_628_670_499_366_47, 0.236_926_885_056_189_08];

/// Five-point Gauss-Legendre rule (exact for degree 9).
pub fn gauss_legendre5<const N: usize, F: FnMut(f64) -> [f64; N]>(mut f: F, a: f64, b: f64) -> [f64; N] {
    let mut out = [0.0; N];
    if b == a {
        return out;
    }
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    for k in 0..5 {
        let v = f(c + h * GL5_X[k]);
        for i in 0..N {
            out[i] += GL5_W[k] * v[i];
        }
    }
    for v in out.iter_mut() {
        *v *= h;
    }
    out
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Result of a Gauss-Kronrod integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// Globally adaptive Gauss-Kronrod 7/15 on a finite interval.
pub fn gauss_kronrod<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Integral> {
    const MAX_INTERVALS: usize = 4000;
    let (v, e) = kronrod15(&mut f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let value: f64 = parts.iter().map(|p| p.2).sum();
        let error: f64 = parts.iter().map(|p| p.3).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Integral { value, error });
        }
        let (idx, worst) = parts.iter().enumerate().max_by(|x, y| x.1 .3.total_cmp(&y.1 .3)).map(|(i, p)| (i, *p)).expect("non-empty");
        let (wa, wb, _, werr) = worst;
        let m = 0.5 * (wa + wb);
        if parts.len() >= MAX_INTERVALS || m <= wa || m >= wb || !error.is_finite() {
            return Err(Error::QuadratureNonConvergence { a: wa, b: wb, err: werr, tol: abs_tol.max(rel_tol * value.abs()) });
        }
        let (v1, e1) = kronrod15(&mut f, wa, m);
        let (v2, e2) = kronrod15(&mut f, m, wb);
        parts[idx] = (wa, m, v1, e1);
        parts.push((m, wb, v2, e2));
    }
}

/// Integral over `[a, ∞)` through the map `x = a + s/(1-s)`.
pub fn gauss_kronrod_half_line<F: FnMut(f64) -> f64>(mut f: F, a: f64, abs_tol: f64, rel_tol: f64) -> Result<Integral> {
    gauss_kronrod(
        |s| {
            if s >= 1.0 {
                return 0.0;
            }
            let om = 1.0 - s;
            let v = f(a + s / om);
            if v == 0.0 {
                0.0
            } else {
                v / (om * om)
            }
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomial_exact() {
        let v = adaptive_simpson(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 0.0).abs() < 1e-13);
    }

    #[test]
    fn simpson_cumulative_matches_antiderivative() {
        let c = cumulative_simpson(|x| [x.cos(), x.exp()], 0.0, 2.0, 1e-11).unwrap();
        for (t, v) in c.nodes.iter().zip(&c.values) {
            assert!((v[0] - t.sin()).abs() < 1e-10);
            assert!((v[1] - (t.exp() - 1.0)).abs() < 1e-10);
        }
        assert!(c.nodes.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*c.nodes.last().unwrap(), 2.0);
    }

    #[test]
    fn simpson_reports_failure() {
        let err = adaptive_simpson(|x| 1.0 / x.abs().sqrt().max(1e-300), -1.0, 1.0, 1e-14);
        assert!(matches!(err, Err(Error::QuadratureNonConvergence { .. })));
    }

    #[test]
    fn locate_is_left_node() {
        let c = cumulative_simpson(|x| [x], 0.0, 1.0, 1e-8).unwrap();
        assert_eq!(c.locate(0.0), 0);
        assert_eq!(c.locate(1.0), c.nodes.len() - 1);
        let i = c.locate(0.3);
        assert!(c.nodes[i] <= 0.3 && 0.3 < c.nodes[i + 1]);
    }

    #[test]
    fn gl5_degree_nine() {
        let v = gauss_legendre5(|x| [x.powi(9) + x.powi(8)], -1.0, 1.0);
        assert!((v[0] - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn kronrod_known_integrals() {
        let r = gauss_kronrod(|x| (-x * x).exp(), -8.0, 8.0, 1e-14, 1e-13).unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        let r = gauss_kronrod_half_line(|x| 1.0 / (1.0 + x * x), 0.0, 1e-13, 1e-13).unwrap();
        assert!((r.value - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }
}
