//! Seed derivation and seeded shuffles.
//!
//! Every random decision in the crate goes through a ChaCha stream whose seed
//! is derived from the user seed plus a stable label, so results never depend
//! on thread count or map iteration order.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Derives a 64-bit sub-seed from a base seed and a label.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update((label.len() as u64).to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn rng_for(seed: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, label))
}

/// Shuffles `items` in place with a stream derived from `(seed, label)`.
pub fn shuffle<T>(items: &mut [T], seed: u64, label: &str) {
    let mut rng = rng_for(seed, label);
    items.shuffle(&mut rng);
}
