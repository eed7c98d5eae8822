//! Deterministic pseudo-randomness.
//!
//! All seeded generation in this crate goes through SplitMix64 so results are
//! reproducible across platforms and independent of external crate versions.
//! `key_stream` provides the counter-based (stateless) variant used to key
//! perturbations by (seed, state, move pair, target).

/// Finalization step of SplitMix64; a strong 64-bit mixer.
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Hash a tuple of keys into a single 64-bit value.
pub fn key_stream(parts: &[u64]) -> u64 {
    let mut h = 0x9E37_79B9_7F4A_7C15u64;
    for (i, &p) in parts.iter().enumerate() {
        h = mix64(h ^ p.wrapping_add(mix64(i as u64 + 1)));
    }
    mix64(h)
}

/// Map a hashed key to the unit interval [0, 1).
pub fn unit_from_key(parts: &[u64]) -> f64 {
    (key_stream(parts) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sequential SplitMix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn range_f64(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform index in 0..n (n > 0), via the multiply-shift trick.
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i + 1);
            xs.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let mut a = SplitMix64::new(7);
        let mut b = SplitMix64::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn unit_draws_in_range() {
        let mut rng = SplitMix64::new(12345);
        for _ in 0..1000 {
            let u = rng.next_f64();
            assert!((0.0..1.0).contains(&u));
        }
        for i in 0..1000u64 {
            let u = unit_from_key(&[9, i, 3]);
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn key_stream_order_sensitive() {
        assert_ne!(key_stream(&[1, 2]), key_stream(&[2, 1]));
    }
}
