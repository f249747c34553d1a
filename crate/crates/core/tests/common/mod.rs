#![allow(dead_code)]

use lieflow_core::Point;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` pairs `(t, x)` with `t ∈ [0, 1]` and `x ∈ [−1, 1]³`.
pub fn samples(seed: u64, n: usize) -> Vec<(f64, Point)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let t = rng.gen_range(0.0..=1.0);
            let x = Point::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
            (t, x)
        })
        .collect()
}
