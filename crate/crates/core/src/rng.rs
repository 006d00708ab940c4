//! Deterministic random streams.
//!
//! Algorithm `chacha8-stream-v1`: a ChaCha stream cipher with 8 rounds
//! (RFC 7539 block function, 64-bit block counter) keyed by 32 bytes laid out as
//! `seed (u64 LE) || domain (u64 LE) || 16 zero bytes`, with the 64-bit ChaCha
//! stream id set to the stream index. Words are consumed little-endian; a `u64`
//! is two consecutive `u32` words, low word first. Floats take the top 53 bits
//! of a `u64`.
//!
//! Every randomized operation addresses its stream as
//! `(base seed, domain, item index)`, so work on item `n` never depends on how
//! many other items were processed before it or on which worker ran it.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Version tag for the stream algorithm, printed by `pseudo-forge version`.
pub const ALGORITHM: &str = "chacha8-stream-v1";

/// Domain separators so that different stages seeded with the same base seed
/// draw from unrelated streams.
pub mod domain {
    pub const GENERAL: u64 = 0;
    pub const DIRECT_NOISE: u64 = 1;
    pub const SPELL_NOISE: u64 = 2;
    pub const BACKTRANSLATE: u64 = 3;
    pub const SHUFFLE: u64 = 4;
    pub const SUBSAMPLE: u64 = 5;
    pub const SWEEP: u64 = 6;
}

#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self::with_domain(seed, domain::GENERAL, stream)
    }

    pub fn with_domain(seed: u64, domain: u64, stream: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&domain.to_le_bytes());
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream
    }

    pub fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw from `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..bound`. Unbiased (rejection on the widened product).
    ///
    /// Panics if `bound` is zero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "below() needs a positive bound");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let wide = (self.next_u64() as u128) * (bound as u128);
            if (wide as u64) >= threshold {
                return (wide >> 64) as u64;
            }
        }
    }

    /// Bernoulli draw with success probability `p`.
    pub fn chance(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}

/// SplitMix64 finalizer, used to derive seeds from structured keys.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
