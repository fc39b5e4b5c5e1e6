mod common;

use std::f64::consts::PI;

use common::gauss_legendre;
use kgvac_core::limits::{fdot_is_zero, lambda_closed_form, radial_constant, richardson, RADIAL_C2, RADIAL_C3};
use kgvac_core::pipeline::sweep;
use kgvac_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `sum_{k in Z} hbar/(hbar^2 k^2 + 1) = pi coth(pi/hbar)`.
fn riemann_1d_exact(hbar: f64) -> f64 {
    PI / (PI / hbar).tanh()
}

/// Row sums `sum_m 1/(m^2 + c^2)^2` in closed form, summed over rows with a midpoint tail.
fn riemann_2d_exact(hbar: f64) -> f64 {
    let b2 = 1.0 / (hbar * hbar);
    let row = |a: f64| {
        let c = (a * a + b2).sqrt();
        let x = PI * c;
        let csch2 = if x > 300.0 { 0.0 } else { 1.0 / x.sinh().powi(2) };
        (PI / (2.0 * c * c * c) / x.tanh() + PI * PI / (2.0 * c * c) * csch2) / (hbar * hbar)
    };
    let n = (2e4 / hbar) as i64;
    let mut s = 0.0;
    for a in (1..=n).rev() {
        s += 2.0 * row(a as f64);
    }
    s += row(0.0);
    let x = n as f64 + 0.5;
    s + PI * (1.0 - x / (x * x + b2).sqrt())
}

#[test]
fn riemann_1d_against_closed_form() {
    for &h in &[1.0, 0.5, 0.2, 0.1, 0.05, 0.01] {
        let v = riemann_check_1d(h);
        let exact = riemann_1d_exact(h);
        assert!((v - exact).abs() <= 1e-10, "hbar {h}: {v} vs {exact}");
        assert!(v <= PI + h && (v - PI).abs() <= 2.0 * h);
    }
    assert!((riemann_check_1d(0.01) - PI).abs() < 0.02);
    let hs = [1.0, 0.5, 0.25, 0.125];
    for w in hs.windows(2) {
        assert!((riemann_check_1d(w[1]) - PI).abs() <= (riemann_check_1d(w[0]) - PI).abs() + 1e-14);
    }
}

#[test]
fn riemann_2d_against_row_closed_form() {
    for &h in &[0.4, 0.2, 0.1, 0.05] {
        let v = riemann_check_2d(h);
        let exact = riemann_2d_exact(h);
        assert!((v - exact).abs() <= 1e-8, "hbar {h}: {v} vs {exact}");
        assert!((v - PI).abs() <= 2.0 * h);
    }
    assert!((riemann_check_2d(0.05) - PI).abs() <= 0.05);
    // the lattice sum approaches pi from above
    let v: Vec<f64> = [0.8, 0.6, 0.4].iter().map(|&h| riemann_check_2d(h)).collect();
    assert!(v.windows(2).all(|w| w[1] < w[0] && w[1] > PI), "{v:?}");
}

#[test]
fn continuum_integral_is_pi() {
    // s in (0, 1) maps to r = s / (1 - s)
    let radial = gauss_legendre(
        |s| {
            let r = s / (1.0 - s);
            let jac = 1.0 / ((1.0 - s) * (1.0 - s));
            r / (r * r + 1.0).powi(2) * jac
        },
        0.0,
        1.0,
        200,
    );
    assert!((2.0 * PI * radial - PI).abs() < 1e-8);
}

/// `int_{R^n} x_1^2/(|x|^2+1)^3` by a product rule in polar or spherical coordinates.
fn radial_constant_oracle(dim: usize) -> f64 {
    let r_int = |power: i32| {
        gauss_legendre(
            |s| {
                let r = s / (1.0 - s);
                r.powi(power) / (r * r + 1.0).powi(3) / ((1.0 - s) * (1.0 - s))
            },
            0.0,
            1.0,
            400,
        )
    };
    if dim == 2 {
        gauss_legendre(|th| th.cos().powi(2), 0.0, 2.0 * PI, 40) * r_int(3)
    } else {
        let angular = gauss_legendre(|th| th.cos().powi(2) * th.sin(), 0.0, PI, 40) * 2.0 * PI;
        angular * r_int(4)
    }
}

#[test]
fn radial_constants_confirmed() {
    let c2 = radial_constant(2).unwrap();
    let c3 = radial_constant(3).unwrap();
    assert!((c2 - RADIAL_C2).abs() < 1e-8 && (c3 - RADIAL_C3).abs() < 1e-8);
    assert!((radial_constant_oracle(2) - PI / 4.0).abs() < 1e-8);
    assert!((radial_constant_oracle(3) - PI * PI / 4.0).abs() < 1e-8);
    assert!(radial_constant(1).is_err());
}

#[test]
fn lambda_examples() {
    assert_eq!(lambda_intensity(2, &[0.0, 0.0]).unwrap(), 0.0);
    assert!(lambda_intensity(1, &[1.0]).is_err());
    assert!(lambda_intensity(2, &[1.0]).is_err());
    let l = lambda_intensity(2, &[1.0, 0.0]).unwrap();
    assert!((l - PI / 64.0).abs() < 1e-8 * l);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for dim in [2usize, 3] {
        for _ in 0..10 {
            let fd: Vec<f64> = (0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let l = lambda_intensity(dim, &fd).unwrap();
            let two: Vec<f64> = fd.iter().map(|x| 2.0 * x).collect();
            let l2 = lambda_intensity(dim, &two).unwrap();
            assert!((l2 - 4.0 * l).abs() <= 1e-10 * l2, "{l2} vs 4*{l}");
            let closed = lambda_closed_form(dim, &fd).unwrap();
            assert!((l - closed).abs() <= 1e-8 * closed, "{l} vs {closed}");
        }
    }
}

#[test]
fn poisson_normalization() {
    assert_eq!(poisson_law(0.0, 0), 1.0);
    assert_eq!(poisson_law(0.0, 2), 0.0);
    for i in 1..=50 {
        let lam = 0.1 * i as f64;
        let s: f64 = (0..=40).map(|n| poisson_law(lam, n)).sum();
        assert!((s - 1.0).abs() < 1e-12, "lambda {lam}: {s}");
    }
}

fn synthetic(hbars: &[f64], p0: impl Fn(f64) -> f64) -> Vec<(f64, PairDistribution)> {
    hbars.iter().map(|&h| (h, PairDistribution { t: 0.3, hbar: h, p0: p0(h), pn: vec![0.0; 4], tail_error: 0.0, n_max: 4 })).collect()
}

#[test]
fn verdict_matrix() {
    let hs = [0.4, 0.2, 0.1];
    for dim in 1..=3 {
        let mut amp = vec![0.0; dim];
        amp[0] = 1.0;
        let spec = make_bump(dim, &amp, 1.0).unwrap();
        // fdot vanishes at the midpoint and outside the support
        for (t, zero) in [(0.5, true), (1.5, true), (0.3, false), (0.8, false)] {
            assert_eq!(fdot_is_zero(&spec, t), zero);
            let r = limit_verdict(dim, &spec, t, &synthetic(&hs, |h| 1.0 - h)).unwrap();
            let expect = match (dim, zero) {
                (1, _) | (_, true) => Verdict::LimitOne,
                (2, false) => Verdict::LimitExp,
                _ => Verdict::LimitZero,
            };
            assert_eq!(r.verdict, expect, "dim {dim} t {t}");
            assert_eq!(r.lambda == 0.0, expect == Verdict::LimitOne);
            for (n, p) in r.poisson.iter().enumerate() {
                assert!((p - poisson_law(r.lambda, n)).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn verdict_rejects_bad_sweeps() {
    let spec = make_bump(2, &[1.0, 0.0], 1.0).unwrap();
    assert!(limit_verdict(2, &spec, 0.3, &synthetic(&[0.2, 0.1], |_| 0.5)).is_err());
    assert!(limit_verdict(2, &spec, 0.3, &synthetic(&[0.1, 0.2, 0.05], |_| 0.5)).is_err());
    assert!(limit_verdict(2, &spec, 0.3, &synthetic(&[0.2, 0.2, 0.1], |_| 0.5)).is_err());
    assert!(limit_verdict(4, &spec, 0.3, &synthetic(&[0.4, 0.2, 0.1], |_| 0.5)).is_err());
}

#[test]
fn richardson_fits_order() {
    let hs = [0.4, 0.2, 0.1, 0.05];
    let v: Vec<f64> = hs.iter().map(|h: &f64| 0.4 - 0.2 * h.powf(1.5)).collect();
    let e = richardson(&hs, &v, 2.0);
    assert!(e.fitted && (e.order - 1.5).abs() < 1e-8 && (e.value - 0.4).abs() < 1e-12);
    let flat = richardson(&hs, &[0.5; 4], 2.0);
    assert!(!flat.fitted && flat.value == 0.5);
}

#[test]
fn zero_field_limit_is_one() {
    let hs = [0.4, 0.2, 0.1];
    for dim in 1..=3 {
        let spec = make_bump(dim, &vec![0.0; dim], 1.0).unwrap();
        let pts = sweep(&spec, &hs, 0.3, &SweepOptions::default()).unwrap();
        let rows: Vec<(f64, PairDistribution)> = pts.into_iter().map(|p| (p.hbar, p.distribution)).collect();
        let r = limit_verdict(dim, &spec, 0.3, &rows).unwrap();
        assert_eq!(r.verdict, Verdict::LimitOne);
        assert!(r.sweep.iter().all(|row| row.p0 == 1.0));
        assert_eq!(r.p0_extrapolated, 1.0);
    }
}

#[test]
fn one_dimensional_sweep_tends_to_one() {
    let spec = make_bump(1, &[1.0], 1.0).unwrap();
    let hs = [0.4, 0.2, 0.1, 0.05];
    let opts = SweepOptions { cutoff: CutoffRule::TailTolerance(1e-6), ..Default::default() };
    let pts = sweep(&spec, &hs, 0.3, &opts).unwrap();
    let loss: Vec<f64> = pts.iter().map(|p| 1.0 - p.distribution.p0).collect();
    assert!(loss.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0), "{loss:?}");
    let slope = kgvac_core::limits::loglog_slope(&hs, &loss);
    assert!((slope - 1.0).abs() < 0.15, "slope {slope}");
    let rows: Vec<(f64, PairDistribution)> = pts.into_iter().map(|p| (p.hbar, p.distribution)).collect();
    let r = limit_verdict(1, &spec, 0.3, &rows).unwrap();
    assert_eq!(r.verdict, Verdict::LimitOne);
    assert!(r.deviation < 0.01, "{}", r.deviation);
}

#[test]
fn one_dimensional_error_constant_is_stable_across_shapes() {
    let canonical = make_bump(1, &[1.0], 1.0).unwrap();
    let other = PotentialSpec::with_shape(1, &[1.0], 1.0, BumpShape { center: 0.45, width: 0.8, sharpness: 2.5 }).unwrap();
    let hs = [0.1, 0.05];
    let opts = SweepOptions { cutoff: CutoffRule::TailTolerance(1e-6), ..Default::default() };
    let mut constants = Vec::new();
    for (spec, t) in [(canonical, 0.3), (other, 0.25)] {
        let fd = spec.derivative(t)[0];
        let pts = sweep(&spec, &hs, t, &opts).unwrap();
        // 1 - P0 = e^{c hbar} - 1 defines c; normalize by fdot(t)^2
        let c: Vec<f64> = pts.iter().map(|p| (2.0 - p.distribution.p0).ln() / p.hbar).collect();
        let c_hat = c.iter().copied().fold(0.0, f64::max);
        for p in &pts {
            assert!(1.0 - p.distribution.p0 <= (c_hat * p.hbar).exp_m1() * (1.0 + 1e-12));
        }
        constants.push(c[1] / (fd * fd));
    }
    let (a, b) = (constants[0], constants[1]);
    assert!((a - b).abs() <= 0.2 * a.min(b), "{constants:?}");
    for c in constants {
        assert!((c - PI / 128.0).abs() <= 0.2 * PI / 128.0);
    }
}

#[test]
fn riemann_tail_estimate_tracks_observed_deviation() {
    // the lattice sums differ from pi by O(e^{-2 pi / hbar}); what remains is the tail
    for &h in &[0.2, 0.1, 0.05] {
        let est = limits::riemann_tail_error(2, h);
        let dev = (riemann_check_2d(h) - PI).abs();
        assert!(dev < 2.0 * est && dev > 0.5 * est, "hbar {h}: deviation {dev:e}, estimate {est:e}");
        assert!(limits::riemann_cutoff(2, h) >= 100.0);
    }
    for &h in &[0.1, 0.01] {
        assert!(limits::riemann_tail_error(1, h) < 1e-18);
        assert!(limits::riemann_cutoff(1, h) >= 1000.0);
    }
}
