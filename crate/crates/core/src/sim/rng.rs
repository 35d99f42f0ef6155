//! SplitMix64: a tiny counter-based generator with per-replication
//! substreams.
//!
//! The simulator promises bit-identical results for identical seeds across
//! platforms and dependency upgrades, so the generator is pinned here
//! rather than pulled from a crate. SplitMix64 passes BigCrush, needs two
//! multiplies per draw, and derives independent substreams by seeding from
//! `(seed, replication index)`.

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    /// Substream `index` of a master seed; distinct indices give streams
    /// decorrelated by the output mix.
    pub fn substream(seed: u64, index: u64) -> SplitMix64 {
        let mut base = SplitMix64::new(seed ^ index.wrapping_mul(GOLDEN_GAMMA));
        // Burn a few outputs so nearby (seed, index) pairs separate.
        for _ in 0..4 {
            base.next_u64();
        }
        base
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`, 53 mantissa bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(0, 1]`, safe to feed into `ln`.
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Exponential variate with the given rate, by inversion.
    pub fn next_exp(&mut self, rate: f64) -> f64 {
        -self.next_open01().ln() / rate
    }
}
