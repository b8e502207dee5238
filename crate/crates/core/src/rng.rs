//! Keyed random streams.
//!
//! Environment sites and Monte Carlo replicates never share a sequential
//! stream. Each draws from a generator whose seed is a hash of
//! `(seed, tag, index)`, so a site's value does not depend on which window
//! it was generated in, and a replicate's value does not depend on which
//! worker ran it.

use rand::SeedableRng;
use rand_xoshiro::{SplitMix64, Xoshiro256PlusPlus};

/// Stream tags. Distinct tags keep the families of streams disjoint.
pub mod tag {
    pub const SITE: u64 = 0x5349_5445;
    pub const ENV: u64 = 0x454e_5653;
    pub const WALK: u64 = 0x5741_4c4b;
    pub const PATH: u64 = 0x5041_5448;
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hash of `(seed, tag, index)` into a single 64-bit key.
#[inline]
pub fn key(seed: u64, tag: u64, index: u64) -> u64 {
    let a = mix64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let b = mix64(a ^ tag.wrapping_mul(0xd6e8_feb8_6659_fd93));
    mix64(b ^ index.wrapping_mul(0xa076_1d64_78bd_642f))
}

/// Short-lived generator for a single environment site.
#[inline]
pub fn site_rng(seed: u64, x: i64) -> SplitMix64 {
    SplitMix64::seed_from_u64(key(seed, tag::SITE, x as u64))
}

/// Independent long stream for replicate `index` of family `tag`.
#[inline]
pub fn stream(seed: u64, tag: u64, index: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(key(seed, tag, index))
}

/// Seed of the `index`-th derived object (environment, sub-run) of `seed`.
#[inline]
pub fn derive_seed(seed: u64, tag: u64, index: u64) -> u64 {
    key(seed, tag, index)
}
