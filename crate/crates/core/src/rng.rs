//! Seed derivation and the counter-based site hash.
//!
//! Environments are never stored: the atom at a site is a pure function of
//! `(seed, x)`. Walk randomness comes from ChaCha8 streams keyed by a derived
//! seed, so every replicate owns a private, reproducible stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::env::LatticeVector;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent 64-bit seed from a master seed, a purpose tag and an index.
pub fn derive_seed(master: u64, tag: u64, index: u64) -> u64 {
    let a = mix64(master ^ GOLDEN);
    let b = mix64(a ^ tag.wrapping_mul(0xD1B5_4A32_D192_ED03));
    mix64(b ^ index.wrapping_mul(GOLDEN).wrapping_add(0x632B_E59B_D9B4_E019))
}

/// Hash word for site `x` under environment seed `seed`.
#[inline]
pub fn site_hash(seed: u64, x: &LatticeVector) -> u64 {
    let mut h = mix64(seed ^ GOLDEN);
    h = mix64(h ^ (x.dim() as u64).wrapping_mul(0xA076_1D64_78BD_642F));
    for &c in x.coords() {
        h = mix64(h.wrapping_add(GOLDEN) ^ (c as u64));
    }
    h
}

/// Uniform in [0, 1) built from the top 53 bits of a hash word.
#[inline]
pub fn unit_f64(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Tags separating the seed families derived from one master seed.
pub mod tags {
    pub const ENV: u64 = 1;
    pub const WALK: u64 = 2;
    pub const WALK_PAIR: u64 = 3;
    pub const RENEWAL: u64 = 4;
    pub const OMEGA_SAMPLE: u64 = 5;
}

pub fn walk_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
