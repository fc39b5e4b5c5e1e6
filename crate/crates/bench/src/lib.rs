//! Fixtures shared by the benchmarks.

use kgvac_core::{make_bump, PotentialSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Unit bump along the first axis with support `[0, 1]`.
pub fn standard_spec(dim: usize) -> PotentialSpec {
    let mut a = vec![0.0; dim];
    a[0] = 1.0;
    make_bump(dim, &a, 1.0).expect("valid bump")
}

/// `n` per-mode `(p, q)` pairs with small pair probabilities and `q = 1 - p`.
pub fn random_pq(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let p = 1e-3 * rng.gen::<f64>().powi(4);
            (p, 1.0 - p)
        })
        .collect()
}
