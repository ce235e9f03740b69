//! Seeded random streams.
//!
//! Every random decision in the crate draws from [`Stream`], a ChaCha8
//! generator (`rand_chacha` 0.9) seeded through `SeedableRng::seed_from_u64`.
//! The algorithm is fixed so that a 64-bit seed replays bit-exactly on any
//! platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent seed for `(label, index)` from a master seed.
///
/// The first eight bytes of `SHA-256(master_le || label || 0x00 || index_le)`,
/// read little-endian. Adding new labels never perturbs existing streams.
pub fn derive_seed(master: u64, label: &str, index: u64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update(label.as_bytes());
    hasher.update([0u8]);
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(head)
}
