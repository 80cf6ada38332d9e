//! Seed derivation shared by every sampler.
//!
//! Child seeds are derived with the SplitMix64 finalizer so that a child
//! stream depends only on `(parent, path)`. Adding sizes or trials to an
//! experiment therefore never perturbs the draws of existing ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream tag for the Monte Carlo estimate of truncated moments.
pub const STREAM_MOMENTS: u64 = 0x4d4f_4d45_4e54_53;
/// Stream tag for the ±1 replacements drawn during rescaling.
pub const STREAM_REPLACE: u64 = 0x5245_504c_4143_45;
/// Stream tag for the Lindeberg Monte Carlo estimator.
pub const STREAM_LINDEBERG: u64 = 0x4c49_4e44_4542;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `derive_seed(s, [a, b])` = `mix(mix(mix(s) ^ a) ^ b)`.
pub fn derive_seed(parent: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(parent), |h, &p| splitmix64(h ^ p))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
