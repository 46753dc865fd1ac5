//! Seeded random streams.
//!
//! Every random draw in the crate comes from ChaCha8 seeded with the run seed and a stream
//! number. Stochastic-Greedy uses the iteration index as the stream, so the sample drawn in
//! round `i` depends only on `(seed, i)` and the pool state, never on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream used by Sample-Greedy's Bernoulli subsampling.
pub const SUBSAMPLE_STREAM: u64 = u64::MAX;
/// Stream used by Random-Selection.
pub const RANDOM_SELECTION_STREAM: u64 = u64::MAX - 1;

pub type StreamRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
