//! Counter-based random streams.
//!
//! Every random draw in a simulation belongs to a stream addressed by the
//! user seed plus a packed index tuple. A stream is a ChaCha20 generator
//! keyed by `seed_from_u64(seed)` with the ChaCha stream id set to the packed
//! indices, so a replicate's draws do not depend on which thread runs it or
//! in what order. Pinned to `rand_chacha` 0.9; changing the generator or the
//! packing changes every simulated number.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type SimRng = ChaCha20Rng;

/// Largest scenario index that fits the packing.
pub const MAX_SCENARIOS: usize = 1 << 16;
/// Largest sample-size index that fits the packing.
pub const MAX_SIZES: usize = 1 << 8;

const TAG_TRUTH: u64 = 1;
const TAG_SAMPLE: u64 = 2;
const TAG_ORACLE: u64 = 3;

/// The generator for stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Layout: tag (8 bits) | scenario (16) | size index (8) | replicate (32).
fn pack(tag: u64, scenario: usize, size_index: usize, replicate: u32) -> u64 {
    debug_assert!(scenario < MAX_SCENARIOS && size_index < MAX_SIZES);
    (tag << 56) | ((scenario as u64) << 40) | ((size_index as u64) << 32) | replicate as u64
}

/// Stream for drawing the true composition of a scenario.
pub fn truth_stream(seed: u64, scenario: usize) -> SimRng {
    stream_rng(seed, pack(TAG_TRUTH, scenario, 0, 0))
}

/// Stream for one benchmark replicate.
pub fn sample_stream(seed: u64, scenario: usize, size_index: usize, replicate: u32) -> SimRng {
    stream_rng(seed, pack(TAG_SAMPLE, scenario, size_index, replicate))
}

/// Stream for one chunk of a Monte Carlo oracle run.
pub fn oracle_stream(seed: u64, chunk: u32) -> SimRng {
    stream_rng(seed, pack(TAG_ORACLE, 0, 0, chunk))
}
