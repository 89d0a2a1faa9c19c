//! Counter-based random streams.
//!
//! Every consumer derives its generator from `(seed, stream)` so results do not
//! depend on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids reserved for structural randomness; per-round streams use the
/// round index directly and stay far below these.
pub(crate) const STRUCTURE_STREAM: u64 = u64::MAX;
pub(crate) const PRODUCT_LIST_STREAM: u64 = u64::MAX - 1;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
