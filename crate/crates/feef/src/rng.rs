//! Seeded RNG plumbing.
//!
//! Every stochastic component takes an explicit RNG (or a seed from which it
//! derives one), so a whole experiment is a pure function of its config and
//! seed list. Independent streams (per ensemble member, per CEM candidate,
//! per episode) are derived from a base seed with a splitmix64 mixer rather
//! than by consuming a shared generator, which keeps them reorderable and
//! safe to evaluate in parallel.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used throughout. ChaCha with a fixed round count is seedable,
/// portable across platforms and fast enough for sampling-heavy planning.
pub type Rng = ChaCha8Rng;

/// splitmix64 finalizer; good avalanche, zero state.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Derive an independent stream seed from a base seed and a tag.
///
/// Different tags give statistically independent streams; the same
/// (base, tag) pair always gives the same stream.
pub fn derive_seed(base: u64, tag: u64) -> u64 {
    splitmix64(base ^ splitmix64(tag.wrapping_add(0xa076_1d64_78bd_642f)))
}

/// Derive through a path of tags, e.g. (seed, [episode, step, candidate]).
pub fn derive_seed_path(base: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(base, |acc, &t| derive_seed(acc, t))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
