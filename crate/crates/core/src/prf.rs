//! Keyed deterministic pseudorandomness.
//!
//! Every random choice in the randomised engines is a pure function of a
//! key tuple such as (global seed, epoch, domain tag, vertex). Replaying a
//! stream with the same seed therefore reproduces every colour bit-exactly,
//! and re-querying within an epoch cannot disagree with earlier answers.

/// SplitMix64 finalising permutation.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9e3779b97f4a7c15;

/// One-shot hash of a key tuple.
pub fn keyed_hash(parts: &[u64]) -> u64 {
    let mut state: u64 = 0x243f6a8885a308d3; // pi digits, arbitrary non-zero start
    for &p in parts {
        state = mix(state.wrapping_add(GOLDEN).wrapping_add(p));
    }
    state
}

/// Deterministic stream of draws keyed by a tuple.
#[derive(Debug, Clone)]
pub struct KeyStream {
    state: u64,
}

impl KeyStream {
    pub fn new(parts: &[u64]) -> Self {
        KeyStream { state: keyed_hash(parts) }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform draw in [0, bound), unbiased via rejection.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        if bound.is_power_of_two() {
            return self.next_u64() & (bound - 1);
        }
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }

    /// Uniform draw from 0..bound as usize (bound must fit usize).
    pub fn next_index(&mut self, bound: usize) -> usize {
        self.next_below(bound as u64) as usize
    }

    /// Uniform f64 in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
