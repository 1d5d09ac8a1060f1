use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::DiscreteDistribution;
use crate::model::Level5;

/// Portable generator used for every draw. ChaCha output is specified
/// bit-for-bit, so draws agree across platforms.
pub type RunRng = ChaCha8Rng;

/// Independent generator for run `run` of a simulation seeded with `seed`.
/// Each run gets its own ChaCha stream, so runs can execute in any order or
/// in parallel.
pub fn run_stream(seed: u64, run: u64) -> RunRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

/// Draws one state from `d` by inverting the cumulative distribution.
pub fn sample_state<R: Rng + ?Sized>(d: &DiscreteDistribution, rng: &mut R) -> Level5 {
    let u: f64 = rng.random();
    let mut cumulative = 0.0;
    let mut last_positive = 0;
    for (k, p) in d.probabilities().iter().enumerate() {
        if *p > 0.0 {
            last_positive = k;
        }
        cumulative += p;
        if u < cumulative {
            return Level5::from_index(k).unwrap();
        }
    }
    // Rounding left the cumulative sum just below u.
    Level5::from_index(last_positive).unwrap()
}
