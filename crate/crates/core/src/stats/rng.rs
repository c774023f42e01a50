//! Seeded, stream-indexed random source.
//!
//! Every Monte Carlo routine in this crate receives an explicit
//! [`RandomSource`]. A source is fully determined by its `(seed, stream)`
//! pair, and distinct stream indices from one seed give statistically
//! independent sequences, so parallel loops fork one stream per logical
//! work unit and stay reproducible for any thread count.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A reproducible random stream identified by `(seed, stream)`.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Derive the source for one logical work unit of a parallel loop.
    ///
    /// One fork level is supported: callers hand out top-level stream
    /// indices below 2^32 and fork unit indices below 2^32.
    pub fn fork(&self, unit: u64) -> Self {
        debug_assert!(self.stream < (1 << 32) && unit < (1 << 32));
        Self::new(self.seed, (self.stream << 32) | unit)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw on [0, 1) with 53-bit resolution.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw on the open interval (0, 1).
    #[inline]
    pub fn next_open01(&mut self) -> f64 {
        loop {
            let u = self.next_f64();
            if u > 0.0 {
                return u;
            }
        }
    }
}
