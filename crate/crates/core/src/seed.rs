//! Seeded random streams and the seed-splitting scheme.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] seeded with
//! a `u64`. Child seeds are derived with [`derive_seed`], a SplitMix64
//! finalizer applied to the parent seed and the child index, so any
//! trial or restart can be reproduced on its own regardless of how work
//! is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeedRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeedRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed for child `index` of `parent`: `mix64(parent ^ mix64(index))`.
#[inline]
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    mix64(parent ^ mix64(index))
}
