//! The toolkit's single pseudo-random source.
//!
//! Every random artifact (run-order permutations, simulated noise) is drawn
//! from ChaCha8 seeded with `ChaCha8Rng::seed_from_u64(seed)`. On top of the
//! raw 64-bit stream:
//!
//! * uniforms in `[0, 1)` take the top 53 bits: `(x >> 11) * 2^-53`;
//! * bounded integers in `[0, n)` use rejection below the largest multiple of `n`;
//! * permutations are a Fisher–Yates shuffle walking from the last index down;
//! * standard normals use the Marsaglia polar method, emitting both variates
//!   of each accepted pair (first `u·m`, then `v·m`).
//!
//! Output therefore depends only on the seed and the sequence of requests.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
            spare_normal: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer on `[0, n)`. Panics if `n == 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let zone = (u64::MAX / n) * n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let m = (-2.0 * s.ln() / s).sqrt();
                self.spare_normal = Some(v * m);
                return u * m;
            }
        }
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// `count` independent standard normal variates from `seed`.
pub fn seeded_gaussian(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = SeededRng::new(seed);
    (0..count).map(|_| rng.standard_normal()).collect()
}
