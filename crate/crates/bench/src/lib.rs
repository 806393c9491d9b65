//! Seeded inputs shared by the benchmarks.

use manymatch_core::gen::random_instance;
use manymatch_core::penalty1d::LinePoint;
use manymatch_core::{Color, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn instance(seed: u64, n: usize, delta: i64) -> Instance {
    random_instance(&mut ChaCha8Rng::seed_from_u64(seed), n, delta).expect("valid bench parameters")
}

/// Sorted integer points with random colors and penalties.
pub fn line_points(seed: u64, n: usize) -> Vec<LinePoint<i64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = 16 * n as i64;
    let mut pos: Vec<i64> = (0..n).map(|_| rng.random_range(0..=span)).collect();
    pos.sort_unstable();
    pos.into_iter()
        .map(|x| {
            let c = if rng.random_bool(0.5) { Color::Red } else { Color::Blue };
            LinePoint::new(x, c, rng.random_range(0..=span / 8))
        })
        .collect()
}
