//! Stable seed derivation.
//!
//! Every random stream in the crate is keyed by a seed derived from a master
//! seed plus a tag path. Derivation hashes with SHA-256 so the mapping does not
//! depend on platform, std hasher versions, or the order in which jobs run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// One component of a seed derivation path.
#[derive(Debug, Clone, Copy)]
pub enum SeedPart<'a> {
    Int(u64),
    Str(&'a str),
}

impl From<u64> for SeedPart<'_> {
    fn from(v: u64) -> Self {
        SeedPart::Int(v)
    }
}

impl<'a> From<&'a str> for SeedPart<'a> {
    fn from(v: &'a str) -> Self {
        SeedPart::Str(v)
    }
}

pub fn derive_seed(base: u64, parts: &[SeedPart<'_>]) -> u64 {
    let mut h = Sha256::new();
    h.update(base.to_le_bytes());
    for part in parts {
        match part {
            SeedPart::Int(v) => {
                h.update([0u8]);
                h.update(v.to_le_bytes());
            }
            SeedPart::Str(s) => {
                h.update([1u8]);
                h.update((s.len() as u64).to_le_bytes());
                h.update(s.as_bytes());
            }
        }
    }
    let out = h.finalize();
    let mut word = [0u8; 8];
    word.copy_from_slice(&out[..8]);
    u64::from_le_bytes(word)
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
