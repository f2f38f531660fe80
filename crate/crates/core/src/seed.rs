//! Deterministic derivation of child seeds from a base seed.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A child seed for stream `stream` of `base`. Distinct streams give
/// independent ChaCha sequences.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(stream);
    rng.next_u64()
}

/// Stream id for a `(major, minor)` pair, e.g. `(iteration, level)`.
pub fn pair_stream(major: usize, minor: usize) -> u64 {
    ((major as u64) << 32) | (minor as u64 & 0xffff_ffff)
}

/// Generator for stream `stream` of `base`.
pub fn stream_rng(base: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, stream))
}
