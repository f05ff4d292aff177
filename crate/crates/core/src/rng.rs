//! Seeded random number generation.
//!
//! Every stochastic routine takes an explicit `u64` seed and draws from
//! ChaCha8, so a given seed reproduces bit-for-bit within a build.
//! Independent sub-streams (per grid point, per model in a comparison) are
//! derived from the root seed with [`substream`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministically derive the seed of sub-stream `index` from `root`.
pub fn substream(root: u64, index: u64) -> u64 {
    // splitmix64 finaliser over the pair
    let mut z = root ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
