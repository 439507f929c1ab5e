//! Deterministic random number plumbing.
//!
//! Every stochastic routine in the crate takes an explicit 64-bit seed and
//! derives its generator through [`rng_from_seed`]. Monte Carlo replicas use
//! independent streams produced by [`replica_seed`], so a sweep gives the same
//! numbers whether replicas run serially or on a thread pool.

use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

/// Finalizer of the splitmix64 generator. Bijective on `u64`, so distinct
/// inputs can never collide.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for replica `index` of a sweep keyed by `base`: `mix64(base ^ index)`.
///
/// The XOR-then-mix rule keeps streams reproducible under reordering and
/// resumption: replica `i` depends only on `(base, i)`.
#[inline]
pub fn replica_seed(base: u64, index: u64) -> u64 {
    mix64(base ^ index)
}

/// Generator used throughout the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
