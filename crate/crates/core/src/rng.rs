//! Deterministic seed derivation and the stream PRNG used by every
//! randomized operation.
//!
//! Each randomized stage (fold shuffling, bootstrap draws, per-subset
//! resampling, per-tree feature draws) gets its own stream derived from the
//! master seed, a domain tag, and an index, so results are bit-identical for
//! any worker count and any stage ordering.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The seeded stream type used throughout the crate.
pub type StreamRng = ChaCha8Rng;

/// Builds a stream from a derived seed.
pub fn stream(seed: u64) -> StreamRng {
    StreamRng::seed_from_u64(seed)
}

/// Derives an independent stream seed from a master seed, a domain tag, and
/// an index. Stable across platforms, Rust versions, and thread counts.
pub fn derive_seed(master: u64, domain: &str, index: u64) -> u64 {
    let mut h = splitmix64(master);
    for &b in domain.as_bytes() {
        h = splitmix64(h ^ u64::from(b));
    }
    splitmix64(h ^ index)
}

// SplitMix64 step (Steele, Lea & Flood); full-period bijective mixer.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}
