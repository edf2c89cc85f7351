//! Shared fixtures for the benchmarks.

use fvst_core::structure;
use fvst_core::tournament::{Tournament, WeightScheme, WeightedTournament};

/// Seeded instance with integer weights in `1..=10`.
pub fn weighted(n: usize, seed: u64) -> WeightedTournament {
    WeightedTournament::random(n, seed, WeightScheme::UniformInt(10))
}

/// First light near-transitive tournament at or after `seed`.
pub fn light(n: usize, seed: u64) -> WeightedTournament {
    (seed..)
        .map(|s| Tournament::random_biased(n, 0.1, s))
        .find(structure::is_light)
        .map(WeightedTournament::unit)
        .expect("light tournaments are common at this bias")
}
