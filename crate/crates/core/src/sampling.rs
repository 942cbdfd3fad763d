//! Deterministic pseudo-random numbers and sample-point sets.
//!
//! All randomness in the crate flows through [`SplitMix64`] so that a seed
//! fully determines every generated structure and sample point.

use serde::Serialize;

/// SplitMix64 (Steele, Lea & Flood). One 64-bit state word, period 2^64.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi]`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Derives an independent child seed, e.g. one per run of a seeded suite.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut rng = SplitMix64::new(seed ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03));
    rng.next_u64()
}

/// A reproducible set of sample points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSet {
    pub seed: u64,
    pub points: Vec<Vec<f64>>,
}

impl SampleSet {
    pub fn new(seed: u64, points: Vec<Vec<f64>>) -> SampleSet {
        SampleSet { seed, points }
    }

    pub fn single(point: Vec<f64>) -> SampleSet {
        SampleSet {
            seed: 0,
            points: vec![point],
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.points.iter().map(Vec::as_slice)
    }
}
