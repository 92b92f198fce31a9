//! Per-replicate seed derivation.
//!
//! Replicate `r` of an experiment draws from `derive(master, r)`, so the
//! result of each replicate is independent of execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

pub type SimRng = ChaCha12Rng;

/// Mixes `(master, index)` through SHA-256 and keeps the first 8 bytes.
pub fn derive(master: u64, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(b"irs-hurst/replicate");
    h.update(master.to_le_bytes());
    h.update(index.to_le_bytes());
    let digest = h.finalize();
    let mut out = [0u8; 8];
    out.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(out)
}

pub fn rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}
