//! Seeded random streams with fixed, position-addressable consumption.
//!
//! Every normal pair consumes exactly two 64-bit outputs (four 32-bit words)
//! of ChaCha20, so the `i`-th pair of a stream can be reached directly with
//! [`NormalStream::at_pair`]. This is what makes sharded generation independent
//! of the shard count.

use std::f64::consts::TAU;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Identity of the random bit source and transforms, recorded in reports.
pub const GENERATOR_ID: &str = "chacha20-rand_chacha0.9/box-muller/v1";

const WORDS_PER_PAIR: u128 = 4;

#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, spare: None }
    }

    /// Positioned at the `pair`-th normal pair of `(seed, stream)`.
    pub fn at_pair(seed: u64, stream: u64, pair: u64) -> Self {
        let mut s = Self::new(seed, stream);
        s.rng.set_word_pos(pair as u128 * WORDS_PER_PAIR);
        s
    }

    /// Uniform on the open interval (0, 1) with 53 bits of resolution.
    pub fn next_uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Two independent standard normals (Box–Muller).
    pub fn next_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        (r * c, r * s)
    }

    /// One standard normal; the second of each pair is kept for the next call.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let (a, b) = self.next_pair();
        self.spare = Some(b);
        a
    }

    /// Uniform integer in `0..n`, by rejection to avoid modulo bias.
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.rng.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }
}
