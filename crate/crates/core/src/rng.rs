//! Seed handling.
//!
//! Every random stream in the crate is a [`ChaCha8Rng`], which produces the
//! same output on every platform for a given 64-bit seed. Independent streams
//! (per trial, per grid point, per purpose) are obtained from one top-level
//! seed with [`derive_seed`], so a single number reproduces a whole run.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a sub-seed from `(seed, purpose, index)`.
///
/// `purpose` is hashed with 64-bit FNV-1a, then the three words are folded
/// through SplitMix64. The mapping is fixed and part of the output format:
/// changing it changes every published result.
pub fn derive_seed(seed: u64, purpose: &str, index: u64) -> u64 {
    let mut tag: u64 = 0xcbf2_9ce4_8422_2325;
    for b in purpose.bytes() {
        tag ^= u64::from(b);
        tag = tag.wrapping_mul(0x0000_0100_0000_01B3);
    }
    let h = splitmix64(seed ^ splitmix64(tag));
    splitmix64(h ^ splitmix64(index.wrapping_add(0x632B_E59B_D9B4_E019)))
}

/// Biased coin: `true` ("away from the group") with probability `ε`.
///
/// One `u64` is drawn per flip and compared with `⌊ε·2^64⌋`, so a flip always
/// consumes exactly one word of the stream.
#[derive(Debug, Clone, Copy)]
pub struct Coin {
    threshold: u64,
}

impl Coin {
    pub fn new(epsilon: f64) -> Self {
        debug_assert!((0.0..=0.5).contains(&epsilon));
        Coin {
            threshold: (epsilon * 18_446_744_073_709_551_616.0) as u64,
        }
    }

    #[inline]
    pub fn flip<R: RngCore>(&self, rng: &mut R) -> bool {
        rng.next_u64() < self.threshold
    }
}

pub fn derived_rng(seed: u64, purpose: &str, index: u64) -> SimRng {
    rng_from_seed(derive_seed(seed, purpose, index))
}
