//! Deterministic stream derivation. Every random draw in the crate comes from
//! a ChaCha stream keyed by (user seed, stream id, index), so results are
//! reproducible at any thread count and independent of draw order.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub(crate) const STREAM_FS: u64 = 0x01;
pub(crate) const STREAM_BALL: u64 = 0x02;
pub(crate) const STREAM_CIRCLE: u64 = 0x03;
pub(crate) const STREAM_DISK: u64 = 0x04;
pub(crate) const STREAM_FEKETE: u64 = 0x10;
pub(crate) const STREAM_CHEBYSHEV: u64 = 0x11;
pub(crate) const STREAM_EQUILIBRIUM: u64 = 0x12;
pub(crate) const STREAM_TRIALS: u64 = 0x13;

pub(crate) fn stream_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(b"projcap0");
    key[8..16].copy_from_slice(&seed.to_le_bytes());
    key[16..24].copy_from_slice(&stream.to_le_bytes());
    key[24..32].copy_from_slice(&index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Salted sub-seed for nested samplers (union components, restarts).
pub(crate) fn salted(seed: u64, salt: u64) -> u64 {
    seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

pub(crate) fn normal_f64<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}
