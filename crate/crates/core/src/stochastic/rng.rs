//! Seeded, stream-split randomness: one ChaCha substream per path index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSource {
    pub seed: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource { seed }
    }

    /// Independent stream for path `index`; the same pair always yields
    /// the same numbers whatever thread consumes it.
    pub fn stream(&self, index: u64) -> PathRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        PathRng { rng, sign: 1.0 }
    }

    /// Antithetic pairing: paths `2i` and `2i+1` share a stream with
    /// negated Gaussian increments.
    pub fn antithetic_stream(&self, index: u64) -> PathRng {
        let mut s = self.stream(index / 2);
        if index % 2 == 1 {
            s.sign = -1.0;
        }
        s
    }

    /// Derived source for an independent experiment component.
    pub fn fork(&self, tag: u64) -> Self {
        RandomSource {
            seed: self.seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15),
        }
    }
}

pub struct PathRng {
    rng: ChaCha8Rng,
    sign: f64,
}

impl PathRng {
    pub fn normal(&mut self) -> f64 {
        let z: f64 = self.rng.sample(StandardNormal);
        self.sign * z
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}
