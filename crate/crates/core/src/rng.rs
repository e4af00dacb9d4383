//! Seeded pseudo-random streams.
//!
//! Every randomized construction in the crate (sampling masks, permutations,
//! signals, noise) draws from the SplitMix64 generator so that a given seed
//! produces the same instance in any language. The exact recipe:
//!
//! ```text
//! next():      state += 0x9E3779B97F4A7C15
//!              z = state
//!              z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!              z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!              return z ^ (z >> 31)                       (all arithmetic mod 2^64)
//! uniform():   (next() >> 11) * 2^-53                     in [0, 1)
//! below(k):    (next() as u128 * k as u128) >> 64         in [0, k)
//! gaussian():  u1 = 1 − uniform(), u2 = uniform()
//!              sqrt(−2 ln u1) · cos(2π u2)                 (one draw per pair)
//! stream(seed, s): new generator seeded with next() of a generator seeded at
//!              seed + (s + 1) · 0x9E3779B97F4A7C15
//! ```
//!
//! Random subsets of size `m` from `0..n` use a partial Fisher–Yates shuffle:
//! for `i` in `0..m`, swap position `i` with `i + below(n − i)`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Debug)]
pub struct Rng64 {
    inner: SplitMix64,
}

impl Rng64 {
    pub fn new(seed: u64) -> Self {
        Rng64 {
            inner: SplitMix64::seed_from_u64(seed),
        }
    }

    /// Independent stream `stream` derived from `seed`.
    pub fn stream(seed: u64, stream: u64) -> Self {
        let mut parent = Rng64::new(seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(GOLDEN)));
        Rng64::new(parent.next_u64())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn below(&mut self, k: usize) -> usize {
        ((self.next_u64() as u128 * k as u128) >> 64) as usize
    }

    pub fn sign(&mut self) -> f64 {
        if self.uniform() < 0.5 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub fn gaussian_vec(&mut self, len: usize, sigma: f64) -> Vec<f64> {
        (0..len).map(|_| sigma * self.gaussian()).collect()
    }

    /// Uniform random permutation of `0..n`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        self.partial_shuffle(&mut p, n);
        p
    }

    /// `m` distinct indices from `0..n`, in draw order.
    pub fn sample(&mut self, n: usize, m: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        self.partial_shuffle(&mut p, m);
        p.truncate(m);
        p
    }

    fn partial_shuffle<T>(&mut self, items: &mut [T], m: usize) {
        let n = items.len();
        for i in 0..m.min(n) {
            let j = i + self.below(n - i);
            items.swap(i, j);
        }
    }
}
