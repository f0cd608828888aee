//! Counter-based splittable random streams. Every Monte Carlo sample draws
//! from its own substream keyed by (seed, sample index), so serial and
//! parallel runs produce identical results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent stream for one sample index under a run seed.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws an index from a cumulative distribution (strictly increasing,
/// final element 1 up to rounding).
pub fn sample_cumulative(cum: &[f64], u: f64) -> usize {
    debug_assert!(!cum.is_empty());
    let pos = cum.partition_point(|&c| c <= u);
    pos.min(cum.len() - 1)
}
