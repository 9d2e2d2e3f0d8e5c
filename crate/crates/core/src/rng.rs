//! Counter-based splittable pseudo-random generator.
//!
//! Monte Carlo runs are split into independent blocks; each block derives its
//! own stream from `(seed, stream_index)` so results are identical regardless
//! of how many threads process the blocks.

/// SplitMix64-based generator. Small state, cheap to fork per block.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: mix64(seed ^ GOLDEN) }
    }

    /// Derive the generator for an independent stream (block) of a run.
    pub fn split(seed: u64, stream: u64) -> Self {
        Rng {
            state: mix64(mix64(seed ^ GOLDEN) ^ stream.wrapping_mul(GOLDEN)),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [0, 1), never exactly 0 (safe for log()).
    #[inline]
    pub fn next_f64_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal deviate (Box-Muller).
    pub fn normal(&mut self) -> f64 {
        let u1 = self.next_f64_open();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Poisson deviate. Knuth multiplication for small means, normal
    /// approximation above ~30 where the relative error is negligible.
    pub fn poisson(&mut self, mean: f64) -> u64 {
        if mean <= 0.0 {
            return 0;
        }
        if mean < 30.0 {
            let limit = (-mean).exp();
            let mut k = 0u64;
            let mut p = 1.0;
            loop {
                p *= self.next_f64_open();
                if p < limit {
                    return k;
                }
                k += 1;
            }
        } else {
            let x = mean + mean.sqrt() * self.normal();
            if x < 0.0 {
                0
            } else {
                x.round() as u64
            }
        }
    }

    /// Photon-pair number for a single-mode thermal state with the given mean:
    /// P(n) = mu^n / (1 + mu)^(n+1) (geometric).
    pub fn thermal(&mut self, mean: f64) -> u64 {
        if mean <= 0.0 {
            return 0;
        }
        let u = self.next_f64_open();
        // Inverse CDF of the geometric distribution.
        (u.ln() / (mean / (1.0 + mean)).ln()).floor() as u64
    }
}
