//! Deterministic pseudorandom streams.
//!
//! Everything random in this crate flows through [`SplitMix64`], the
//! counter-based generator of Steele, Lea & Flood with Vigna's reference
//! mixing constants: the state advances by a fixed odd increment and each
//! output is an avalanche hash of the state. Identical seeds therefore give
//! identical streams on every platform and at any level of concurrency, and
//! sub-streams derived through [`Seed::stream`] are pure functions of the
//! master seed and a stream index.
//!
//! Normal variates use the Box-Muller transform on two uniform draws rather
//! than a rejection method, so the number of raw draws consumed per variate
//! is fixed and streams can never desynchronize.

use std::f64::consts::PI;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// Fixed 64-bit avalanche finalizer (the SplitMix64 output function).
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A 64-bit seed value; sub-streams derive from it deterministically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

impl Seed {
    /// Derive the seed for sub-stream `index`.
    ///
    /// `stream` is a pure function of `(self, index)`; distinct indices map
    /// to distinct seeds, and the avalanche mix decorrelates neighbouring
    /// indices.
    #[must_use]
    pub fn stream(self, index: u64) -> Seed {
        Seed(mix64(self.0 ^ index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
    }
}

impl From<u64> for Seed {
    fn from(value: u64) -> Self {
        Seed(value)
    }
}

/// SplitMix64 generator with a one-slot cache for the second Box-Muller
/// variate.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
    spare_normal: Option<f64>,
}

impl SplitMix64 {
    pub fn new(seed: Seed) -> Self {
        SplitMix64 { state: seed.0, spare_normal: None }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform on `[0, 1)` using the top 53 bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(0, 1]`; safe as a logarithm argument.
    #[inline]
    fn next_f64_open_zero(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal variate via Box-Muller.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.next_f64_open_zero();
        let u2 = self.next_f64();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * PI * u2;
        self.spare_normal = Some(radius * angle.sin());
        radius * angle.cos()
    }

    /// A vector of `len` standard normal variates.
    pub fn normals(&mut self, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.next_normal()).collect()
    }

    /// Equiprobable `+1.0` / `-1.0`.
    #[inline]
    pub fn next_sign(&mut self) -> f64 {
        if self.next_u64() >> 63 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Uniform integer in `[0, bound)` by rejection on the top bits.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        // Rejection zone keeps the distribution exactly uniform.
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let raw = self.next_u64();
            if raw < zone {
                return raw % bound;
            }
        }
    }
}
