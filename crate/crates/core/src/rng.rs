//! Portable random stream used by every sampler and trainer.
//!
//! The generator is SplitMix64 seeded directly with the user's `u64` seed. All
//! derived draws use fixed conversions so a given seed reproduces the same
//! training run on any platform:
//!
//! * `unit`: the top 53 bits of one output, scaled to `[0, 1)`.
//! * `below(n)`: the high 64 bits of the 128-bit product `output * n`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

#[derive(Debug, Clone)]
pub struct Rng(SplitMix64);

impl Rng {
    pub fn seeded(seed: u64) -> Self {
        Rng(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`; `n` must be nonzero.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((u128::from(self.next_u64()) * u128::from(n)) >> 64) as u64
    }

    /// Independent child stream, one output of this stream used as its seed.
    pub fn fork(&mut self) -> Rng {
        Rng::seeded(self.next_u64())
    }
}
