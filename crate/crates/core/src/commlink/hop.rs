//! Frequency-hopping plan.
//!
//! Channel centres are spread evenly across the band, inset by
//! `edge_guard` from both edges so that the spectral skirts of the
//! outermost tones stay in band. Symbol `k` uses channel
//! `pattern[k mod len]`; bit 1 is sent at `centre + separation/2`
//! (mark), bit 0 at `centre − separation/2` (space).

use super::LinkError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Highest supported signalling rate at one bit per symbol [bit/s].
pub const MAX_BIT_RATE: f64 = 15_000.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopPlan {
    pub num_channels: usize,
    /// `(f_low, f_high)` [Hz].
    pub band: (f64, f64),
    /// Inset of the outermost channel centres from the band edges [Hz].
    pub edge_guard: f64,
    pub tone_separation: f64,
    /// Symbols per second.
    pub symbol_rate: f64,
    pub pattern_seed: u64,
    pub pattern: Vec<usize>,
}

impl HopPlan {
    pub const DEFAULT_PATTERN_LEN: usize = 32;

    /// Builds a plan with a pseudo-random hop pattern drawn from `seed`.
    pub fn new(
        num_channels: usize,
        band: (f64, f64),
        edge_guard: f64,
        tone_separation: f64,
        symbol_rate: f64,
        pattern_seed: u64,
        pattern_len: usize,
    ) -> Result<Self, LinkError> {
        if num_channels == 0 || pattern_len == 0 {
            return Err(LinkError::InvalidPlan("need at least one channel and one hop".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(pattern_seed);
        let pattern = (0..pattern_len).map(|_| rng.random_range(0..num_channels)).collect();
        let plan = HopPlan { num_channels, band, edge_guard, tone_separation, symbol_rate, pattern_seed, pattern };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<(), LinkError> {
        let (lo, hi) = self.band;
        let fail = |m: &str| Err(LinkError::InvalidPlan(m.into()));
        if !(lo > 0.0 && hi > lo) {
            return fail("band must satisfy 0 < f_low < f_high");
        }
        if !(self.symbol_rate > 0.0 && self.symbol_rate <= MAX_BIT_RATE) {
            return fail("symbol rate must lie in (0, 15000] symbols/s");
        }
        if !(self.tone_separation > 0.0) || !(self.edge_guard >= 0.0) {
            return fail("tone separation must be > 0 and edge guard >= 0");
        }
        if self.pattern.is_empty() || self.pattern.iter().any(|&c| c >= self.num_channels) {
            return fail("hop pattern references a missing channel");
        }
        let half = 0.5 * self.tone_separation;
        for c in 0..self.num_channels {
            let centre = self.channel_center(c);
            if centre - half < lo || centre + half > hi {
                return fail("mark/space tones fall outside the band");
            }
        }
        Ok(())
    }

    pub fn channel_center(&self, channel: usize) -> f64 {
        let (lo, hi) = self.band;
        if self.num_channels == 1 {
            return 0.5 * (lo + hi);
        }
        let first = lo + self.edge_guard;
        let span = hi - lo - 2.0 * self.edge_guard;
        first + span * channel as f64 / (self.num_channels - 1) as f64
    }

    pub fn channel_of_symbol(&self, symbol: usize) -> usize {
        self.pattern[symbol % self.pattern.len()]
    }

    pub fn carrier(&self, symbol: usize) -> f64 {
        self.channel_center(self.channel_of_symbol(symbol))
    }

    /// `(space, mark)` tones of a symbol.
    pub fn tones(&self, symbol: usize) -> (f64, f64) {
        let c = self.carrier(symbol);
        let half = 0.5 * self.tone_separation;
        (c - half, c + half)
    }

    pub fn tone(&self, symbol: usize, bit: bool) -> f64 {
        let (space, mark) = self.tones(symbol);
        if bit {
            mark
        } else {
            space
        }
    }

    /// First sample of symbol `k` at `sample_rate`.
    pub fn symbol_start(&self, symbol: usize, sample_rate: f64) -> usize {
        (symbol as f64 * sample_rate / self.symbol_rate).round() as usize
    }

    /// Number of whole symbols contained in `samples` samples.
    pub fn symbols_in(&self, samples: usize, sample_rate: f64) -> usize {
        let mut k = (samples as f64 * self.symbol_rate / sample_rate).floor() as usize;
        while k > 0 && self.symbol_start(k, sample_rate) > samples {
            k -= 1;
        }
        while self.symbol_start(k + 1, sample_rate) <= samples {
            k += 1;
        }
        k
    }
}

impl Default for HopPlan {
    /// Eight channels 1 kHz apart (21.5–28.5 kHz) in the 20–30 kHz band,
    /// 500 Hz mark/space separation, 1000 symbols/s.
    fn default() -> Self {
        HopPlan::new(8, (20e3, 30e3), 1.5e3, 500.0, 1000.0, 1, Self::DEFAULT_PATTERN_LEN)
            .expect("default plan is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_channels_and_tones_in_band() {
        let plan = HopPlan::default();
        assert_eq!(plan.channel_center(0), 21.5e3);
        assert_eq!(plan.channel_center(7), 28.5e3);
        assert!((plan.channel_center(1) - 22.5e3).abs() < 1e-9);
        for k in 0..64 {
            let (s, m) = plan.tones(k);
            assert!(s >= 20e3 && m <= 30e3);
            assert_eq!(m - s, 500.0);
        }
    }

    #[test]
    fn pattern_is_seed_deterministic() {
        let a = HopPlan::new(8, (20e3, 30e3), 1.5e3, 500.0, 1000.0, 7, 32).unwrap();
        let b = HopPlan::new(8, (20e3, 30e3), 1.5e3, 500.0, 1000.0, 7, 32).unwrap();
        let c = HopPlan::new(8, (20e3, 30e3), 1.5e3, 500.0, 1000.0, 8, 32).unwrap();
        assert_eq!(a.pattern, b.pattern);
        assert_ne!(a.pattern, c.pattern);
    }

    #[test]
    fn rejects_invalid_plans() {
        assert!(HopPlan::new(8, (20e3, 30e3), 1.5e3, 500.0, 20_000.0, 1, 32).is_err());
        assert!(HopPlan::new(8, (20e3, 30e3), 0.0, 500.0, 1000.0, 1, 32).is_err());
        assert!(HopPlan::new(0, (20e3, 30e3), 1.5e3, 500.0, 1000.0, 1, 32).is_err());
        assert!(HopPlan::new(1, (30e3, 20e3), 0.0, 500.0, 1000.0, 1, 32).is_err());
    }

    #[test]
    fn single_channel_sits_mid_band() {
        let plan = HopPlan::new(1, (20e3, 30e3), 0.0, 500.0, 1000.0, 1, 1).unwrap();
        assert_eq!(plan.tone(0, false), 24.75e3);
    }

    #[test]
    fn symbol_boundaries() {
        let plan = HopPlan { symbol_rate: 3000.0, ..HopPlan::default() };
        let fs = 192e3;
        assert_eq!(plan.symbol_start(3, fs), 192);
        assert_eq!(plan.symbols_in(192, fs), 3);
        assert_eq!(plan.symbols_in(191, fs), 2);
        assert_eq!(plan.symbols_in(0, fs), 0);
    }
}
