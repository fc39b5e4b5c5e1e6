//! Complex tridiagonal solve (Thomas algorithm).

use num_complex::Complex64 as C64;

/// Solves `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]` in place in `rhs`.
/// `lower[0]` and `upper[n-1]` are ignored. `scratch` must have the same length.
pub fn solve_tridiagonal(lower: &[C64], diag: &[C64], upper: &[C64], rhs: &mut [C64], scratch: &mut [C64]) {
    let n = diag.len();
    assert!(lower.len() == n && upper.len() == n && rhs.len() == n && scratch.len() == n);
    if n == 0 {
        return;
    }
    let mut beta = diag[0];
    rhs[0] /= beta;
    for i in 1..n {
        scratch[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * scratch[i];
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        let next = rhs[i + 1];
        rhs[i] -= scratch[i + 1] * next;
    }
}
