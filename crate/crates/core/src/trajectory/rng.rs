//! Per-step random streams.
//!
//! Every sampled step draws from its own ChaCha8 stream, seeded with
//! `derive(seed, episode, step)`:
//!
//! ```text
//! mix(z)    = SplitMix64 finalizer of z + 0x9E3779B97F4A7C15
//! derive    = mix(mix(mix(seed) ^ episode) ^ step)
//! stream    = ChaCha8Rng::seed_from_u64(derive)
//! ```
//!
//! Uniform reals take the top 53 bits of `next_u64` scaled by 2⁻⁵³; uniform
//! indices in `0..n` use the high word of the 128-bit product `next_u64 · n`.
//! Nothing else feeds the stream, so results do not depend on scheduling.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn mix(z: u64) -> u64 {
    let mut z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(seed: u64, episode: u64, step: u64) -> u64 {
    mix(mix(mix(seed) ^ episode) ^ step)
}

pub struct StepRng(ChaCha8Rng);

impl StepRng {
    pub fn new(seed: u64, episode: u64, step: u64) -> Self {
        StepRng(ChaCha8Rng::seed_from_u64(derive(seed, episode, step)))
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `0..n`; `n` must be positive.
    pub fn index(&mut self, n: usize) -> usize {
        ((self.0.next_u64() as u128 * n as u128) >> 64) as usize
    }
}
