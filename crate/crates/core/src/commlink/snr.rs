//! Received SNR from the hop-tone and guard DFT bins.
//!
//! After preamble sync, each symbol is Hann-windowed and its occupied tone
//! is the stronger of the mark and space bins. Guard bins sit at whole
//! multiples of the symbol rate from that tone, where the windowed tone
//! has no response, so they collect noise only. Both powers are averaged
//! over all symbols.

use super::hop::HopPlan;
use super::modem::{find_preamble, goertzel_power};
use super::spectrogram::Window;
use super::LinkError;

/// Reported when no noise is measurable.
pub const SNR_CEILING_DB: f64 = 200.0;
/// Minimum guard distance from either tone, in DFT bins of one symbol.
pub const GUARD_BINS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrEstimate {
    pub snr_db: f64,
    /// Mean occupied-bin power.
    pub signal_power: f64,
    /// Mean guard-bin power.
    pub noise_power: f64,
    pub symbols: usize,
}

/// Guard frequencies of one symbol: in band, at integer bin offsets from
/// `active` and at least [`GUARD_BINS`] from both tones.
fn guard_frequencies(plan: &HopPlan, active: f64, idle: f64) -> impl Iterator<Item = f64> + '_ {
    let rs = plan.symbol_rate;
    let (lo, hi) = plan.band;
    let below = ((active - lo) / rs).floor() as i64;
    let above = ((hi - active) / rs).floor() as i64;
    (-below..=above)
        .map(move |m| active + m as f64 * rs)
        .filter(move |f| (f - active).abs() >= GUARD_BINS * rs - 1e-9 && (f - idle).abs() >= GUARD_BINS * rs - 1e-9)
}

pub fn estimate_snr(waveform: &[f64], plan: &HopPlan, sample_rate: f64) -> Result<SnrEstimate, LinkError> {
    let sync = find_preamble(waveform, plan, sample_rate)?;
    let (mut signal, mut noise) = (0.0, 0.0);
    let (mut symbols, mut guards) = (0usize, 0usize);
    let count = plan.symbols_in(waveform.len() - sync.offset, sample_rate);
    let mut seg = Vec::new();
    for k in 0..count {
        let start = sync.offset + plan.symbol_start(k, sample_rate);
        let end = sync.offset + plan.symbol_start(k + 1, sample_rate);
        let window = Window::Hann.coefficients(end - start);
        seg.clear();
        seg.extend(waveform[start..end].iter().zip(&window).map(|(x, w)| x * w));
        let (s, m) = plan.tones(k);
        let mark = goertzel_power(&seg, m, sample_rate);
        let space = goertzel_power(&seg, s, sample_rate);
        let (active, idle, power) = if mark >= space { (m, s, mark) } else { (s, m, space) };
        signal += power;
        symbols += 1;
        for f in guard_frequencies(plan, active, idle) {
            noise += goertzel_power(&seg, f, sample_rate);
            guards += 1;
        }
    }
    if symbols == 0 || guards == 0 {
        return Err(LinkError::InvalidPlan("band leaves no guard bins for noise estimation".into()));
    }
    let signal_power = signal / symbols as f64;
    let noise_power = noise / guards as f64;
    let snr_db = if noise_power > 0.0 {
        (10.0 * (signal_power / noise_power).log10()).min(SNR_CEILING_DB)
    } else {
        SNR_CEILING_DB
    };
    Ok(SnrEstimate { snr_db, signal_power, noise_power, symbols })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commlink::frame::preamble_bits;
    use crate::commlink::modem::modulate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    const FS: f64 = 192e3;

    fn signal(n: usize, amplitude: f64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut bits = preamble_bits();
        bits.extend((0..n).map(|_| rng.random::<bool>()));
        let mut wave = vec![0.0; 1000];
        wave.extend(modulate(&bits, &HopPlan::default(), FS, amplitude));
        wave
    }

    #[test]
    fn guards_avoid_both_tones_and_stay_in_band() {
        let plan = HopPlan::default();
        let guards: Vec<f64> = guard_frequencies(&plan, 21_250.0, 21_750.0).collect();
        assert_eq!(guards.first(), Some(&25_250.0));
        assert_eq!(guards.last(), Some(&29_250.0));
        let guards: Vec<f64> = guard_frequencies(&plan, 28_750.0, 28_250.0).collect();
        assert_eq!(guards, vec![20_750.0, 21_750.0, 22_750.0, 23_750.0, 24_750.0]);
    }

    #[test]
    fn noise_free_hits_ceiling_region() {
        let est = estimate_snr(&signal(500, 1.0), &HopPlan::default(), FS).unwrap();
        assert!(est.snr_db >= 60.0, "{}", est.snr_db);
    }

    #[test]
    fn matches_analytic_ratio_over_white_noise() {
        let (a, sigma) = (0.05, 0.1);
        let mut wave = signal(4000, a);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let normal = Normal::new(0.0, sigma).unwrap();
        wave.iter_mut().for_each(|x| *x += normal.sample(&mut rng));
        let est = estimate_snr(&wave, &HopPlan::default(), FS).unwrap();
        let sps = FS / 1000.0;
        // Hann: tone bin (a·N/4)², noise bin σ²·3N/8.
        let expected = 10.0 * (1.0 + a * a * sps / (6.0 * sigma * sigma)).log10();
        assert!((est.snr_db - expected).abs() < 1.0, "{} vs {expected}", est.snr_db);
    }
}
