//! Portable pseudo-randomness: splitmix64 streams derived per clip, with
//! uniform and Box–Muller Gaussian variates.

/// Weyl increment of splitmix64 (2⁶⁴ / φ).
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The splitmix64 output function applied to `z + GOLDEN_GAMMA`.
#[inline]
pub fn splitmix64_finalize(z: u64) -> u64 {
    let mut z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A splitmix64 generator. Each clip owns one, so clips can be rendered in
/// any order or in parallel without affecting each other's draws.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RngState {
    state: u64,
}

impl RngState {
    pub fn from_state(state: u64) -> Self {
        Self { state }
    }

    /// The stream for clip `clip_index` under `master_seed`.
    pub fn derive(master_seed: u64, clip_index: u64) -> Self {
        Self::from_state(derive_seed(master_seed, clip_index))
    }

    #[inline]
    pub fn state(&self) -> u64 {
        self.state
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let out = splitmix64_finalize(self.state);
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        out
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    #[inline]
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_unit()
    }

    /// Standard normal variate (Box–Muller, cosine branch only).
    #[inline]
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.next_unit();
        let u2 = self.next_unit();
        box_muller(u1, u2)
    }
}

/// Seed of clip `clip_index`'s stream:
/// `finalize(master_seed + clip_index · GOLDEN_GAMMA)`, all wrapping.
pub fn derive_seed(master_seed: u64, clip_index: u64) -> u64 {
    splitmix64_finalize(master_seed.wrapping_add(clip_index.wrapping_mul(GOLDEN_GAMMA)))
}

/// `sqrt(-2 ln u1) · cos(2π u2)` for `u1 ∈ (0, 1]`.
#[inline]
pub fn box_muller(u1: f64, u2: f64) -> f64 {
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn finalizer_of_zero_regression() {
        // splitmix64 seeded with 0: first output is the well-known
        // 0xE220A8397B1DCDAF.
        assert_eq!(splitmix64_finalize(0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(derive_seed(0, 0), 0xE220_A839_7B1D_CDAF);
        let mut r = RngState::from_state(0);
        assert_eq!(r.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(r.next_u64(), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn derived_streams_distinct() {
        let seen: HashSet<u64> = (0..=10_000).map(|i| derive_seed(7, i)).collect();
        assert_eq!(seen.len(), 10_001);
        assert_eq!(RngState::derive(3, 9), RngState::derive(3, 9));
    }

    #[test]
    fn unit_draws_regression_seed_42() {
        let mut r = RngState::from_state(42);
        let got: Vec<f64> = (0..3).map(|_| r.next_unit()).collect();
        // Frozen from the stated algorithm; see the independent recomputation below.
        let mut z = 42u64;
        let expect: Vec<f64> = (0..3)
            .map(|_| {
                z = z.wrapping_add(0x9E3779B97F4A7C15);
                let mut x = z;
                x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
                x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
                x ^= x >> 31;
                (x >> 11) as f64 / 9007199254740992.0
            })
            .collect();
        assert_eq!(got, expect);
        assert_eq!(got, FROZEN_SEED_42);
        assert!(got.iter().all(|v| (0.0..1.0).contains(v)));
    }

    const FROZEN_SEED_42: [f64; 3] = [
        0.7415648787718233,
        0.1599103928769201,
        0.27860113025513866,
    ];

    #[test]
    fn box_muller_at_unit_radius_is_zero() {
        for u2 in [0.0, 0.3, 0.99] {
            assert_eq!(box_muller(1.0, u2), 0.0);
        }
    }

    #[test]
    fn gaussian_moments() {
        let mut r = RngState::from_state(2024);
        let n = 1_000_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let g = r.next_gaussian();
            s += g;
            s2 += g * g;
        }
        let mean = s / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!(mean.abs() <= 0.01, "mean {mean}");
        assert!((0.99..=1.01).contains(&var), "var {var}");
    }

    #[test]
    fn streams_are_reproducible() {
        let mut a = RngState::from_state(5);
        let mut b = a.clone();
        for _ in 0..100 {
            assert_eq!(a.next_gaussian().to_bits(), b.next_gaussian().to_bits());
        }
    }
}
