//! Hierarchical, counter-based seed streams.
//!
//! A [`Seed`] is a 64-bit value. Children are derived from
//! `(parent, index, tag)` by a fixed mixing function, so any trial of any
//! experiment can be regenerated in isolation and scheduled on any thread.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

// SplitMix64 finalizer.
const fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

// FNV-1a; stable across platforms and compiler versions.
const fn tag_hash(tag: &str) -> u64 {
    let bytes = tag.as_bytes();
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut i = 0;
    while i < bytes.len() {
        h ^= bytes[i] as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
        i += 1;
    }
    h
}

impl Seed {
    pub fn new(value: u64) -> Self {
        Seed(value)
    }

    /// Child seed for the `index`-th unit of work playing role `tag`.
    pub fn child(self, index: u64, tag: &str) -> Seed {
        Seed(mix(self.0 ^ mix(index ^ mix(tag_hash(tag)))))
    }

    /// Child seed identified only by a role tag.
    pub fn derive(self, tag: &str) -> Seed {
        self.child(u64::MAX, tag)
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}
