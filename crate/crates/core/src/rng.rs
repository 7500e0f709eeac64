//! Seeded random streams.
//!
//! All randomness flows through [`ChaCha8Rng`] seeded from a `u64`, so runs
//! are reproducible across platforms. Sub-streams are derived with a
//! SplitMix64 finalizer so that neighbouring indices give unrelated streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Recorded in output metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng/seed_from_u64 (rand_chacha 0.9)";

pub type Rng = ChaCha8Rng;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sub-stream `index` of `seed`: `seed ⊕ mix(index)`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    seed ^ splitmix64(index)
}

/// Seed for a nested level of a seed hierarchy (cell → repetition → state or
/// noise). Unlike [`derive_seed`], composing two levels is not symmetric in
/// the indices.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    splitmix64(derive_seed(seed, index))
}

pub fn stream(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn substream(seed: u64, index: u64) -> Rng {
    stream(derive_seed(seed, index))
}
