//! Small special-function helpers.

/// `ln(n!)` by direct summation (exact enough for the small `n` used here).
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

pub fn factorial(n: usize) -> f64 {
    (2..=n).map(|k| k as f64).product()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut b = 1.0;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b
}

/// Orthonormal Hermite functions `h_0..=h_{n_max}` at `xi` (unit-frequency oscillator).
pub fn hermite_functions(n_max: usize, xi: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(n_max + 1);
    h.push(std::f64::consts::PI.powf(-0.25) * (-0.5 * xi * xi).exp());
    if n_max >= 1 {
        h.push(std::f64::consts::SQRT_2 * xi * h[0]);
    }
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * xi * h[n] - (nf / (nf + 1.0)).sqrt() * h[n - 1];
        h.push(next);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials() {
        assert_eq!(factorial(5), 120.0);
        assert!((ln_factorial(10) - 3_628_800f64.ln()).abs() < 1e-12);
        assert_eq!(binomial(6, 2), 15.0);
        assert_eq!(binomial(3, 5), 0.0);
    }

    #[test]
    fn hermite_orthonormal() {
        let n = 8;
        let dx = 0.01;
        let mut gram = vec![vec![0.0; n + 1]; n + 1];
        let mut x = -12.0;
        while x <= 12.0 {
            let h = hermite_functions(n, x);
            for i in 0..=n {
                for j in 0..=n {
                    gram[i][j] += h[i] * h[j] * dx;
                }
            }
            x += dx;
        }
        for i in 0..=n {
            for j in 0..=n {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((gram[i][j] - expect).abs() < 1e-10, "{i} {j} {}", gram[i][j]);
            }
        }
    }
}
