//! Seed-derived random streams.
//!
//! Every consumer of randomness takes a `(seed, stream)` pair so that work
//! split across threads draws from independent, reproducible sequences.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream identifiers for the different consumers of one global seed.
pub mod streams {
    pub const INIT: u64 = 1;
    pub const SHUFFLE: u64 = 2;
    pub const SPLIT: u64 = 3;
    pub const SYNTH: u64 = 4;
    /// Per-utterance k-means streams start here and are offset by entry index.
    pub const KMEANS_BASE: u64 = 1 << 32;
}

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
