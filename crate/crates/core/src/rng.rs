//! Reproducible random streams.
//!
//! Every repetition of an experiment draws from its own ChaCha8 stream. The
//! 256-bit key is expanded from the 64-bit master seed with SplitMix64, and
//! the 64-bit ChaCha stream id encodes `(repetition, lane)`. Distinct ids
//! under one key give non-overlapping keystreams, so results never depend on
//! which worker thread ran which repetition.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the harness.
pub type StreamRng = ChaCha8Rng;

/// Independent lanes inside one repetition, so that paired algorithm runs do
/// not share random numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Lane {
    PlainMc = 0,
    Rejection = 1,
    Direct = 2,
    Calibration = 3,
    Auxiliary = 15,
}

const LANE_BITS: u32 = 4;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream for repetition `rep` on `lane`, keyed by `master`.
pub fn derive_stream(master: u64, rep: u64, lane: Lane) -> StreamRng {
    let mut key = [0u8; 32];
    let mut state = master;
    for chunk in key.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream((rep << LANE_BITS) | lane as u64);
    rng
}

/// Convenience stream for tests and one-off runs.
pub fn seeded(seed: u64) -> StreamRng {
    derive_stream(seed, 0, Lane::Auxiliary)
}
