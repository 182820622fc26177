//! Continuous-phase FH-BFSK modulator and noncoherent demodulator.
//!
//! The receiver locates the 32-bit preamble by correlating the recording
//! against the complex envelope `e^{iθ(t)}` of the modulated preamble; the
//! magnitude of that correlation ignores carrier phase. Each following
//! symbol is decided by comparing single-bin DFT energies (Goertzel) at
//! its mark and space tones.

use super::frame::preamble_bits;
use super::hop::HopPlan;
use super::LinkError;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::TAU;

/// Minimum normalised preamble correlation accepted as a detection.
///
/// Scaled so a clean, aligned preamble scores 1; white noise alone
/// scores around `sqrt(2/L)` for an `L`-sample preamble.
pub const SYNC_THRESHOLD: f64 = 0.12;
/// Longest delay searched for the preamble [s].
pub const MAX_SYNC_DELAY: f64 = 2.0;

/// Phase trajectory of the modulated bits, one value per sample.
fn phase_track(bits: &[bool], plan: &HopPlan, sample_rate: f64) -> Vec<f64> {
    let total = plan.symbol_start(bits.len(), sample_rate);
    let mut phase = Vec::with_capacity(total);
    let mut theta = 0.0_f64;
    for (k, &bit) in bits.iter().enumerate() {
        let step = TAU * plan.tone(k, bit) / sample_rate;
        for _ in plan.symbol_start(k, sample_rate)..plan.symbol_start(k + 1, sample_rate) {
            phase.push(theta);
            theta = (theta + step) % TAU;
        }
    }
    phase
}

/// `amplitude·cos θ(t)`, phase continuous across symbol and hop
/// boundaries.
pub fn modulate(bits: &[bool], plan: &HopPlan, sample_rate: f64, amplitude: f64) -> Vec<f64> {
    phase_track(bits, plan, sample_rate).into_iter().map(|t| amplitude * t.cos()).collect()
}

/// `|Σ x[n]·e^{-iωn}|²` at an arbitrary (non-bin-centred) frequency.
pub fn goertzel_power(samples: &[f64], frequency: f64, sample_rate: f64) -> f64 {
    let omega = TAU * frequency / sample_rate;
    let coeff = 2.0 * omega.cos();
    let (mut s1, mut s2) = (0.0_f64, 0.0_f64);
    for &x in samples {
        let s0 = x + coeff * s1 - s2;
        s2 = s1;
        s1 = s0;
    }
    (s1 * s1 + s2 * s2 - coeff * s1 * s2).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sync {
    /// Sample index where the preamble starts.
    pub offset: usize,
    /// Normalised correlation at `offset`.
    pub score: f64,
}

/// Finds the start of the preamble within the first [`MAX_SYNC_DELAY`]
/// seconds of `waveform`.
pub fn find_preamble(waveform: &[f64], plan: &HopPlan, sample_rate: f64) -> Result<Sync, LinkError> {
    let reference: Vec<Complex64> =
        phase_track(&preamble_bits(), plan, sample_rate).into_iter().map(|t| Complex64::from_polar(1.0, t)).collect();
    let ref_len = reference.len();
    if waveform.len() < ref_len {
        return Err(LinkError::WaveformTooShort { len: waveform.len(), needed: ref_len });
    }
    let max_lag = (waveform.len() - ref_len).min((MAX_SYNC_DELAY * sample_rate) as usize);
    let span = max_lag + ref_len;
    let size = span.next_power_of_two();

    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);
    let mut rx: Vec<Complex64> = waveform[..span].iter().map(|&x| Complex64::new(x, 0.0)).collect();
    rx.resize(size, Complex64::default());
    let mut rf = reference.clone();
    rf.resize(size, Complex64::default());
    forward.process(&mut rx);
    forward.process(&mut rf);
    for (a, b) in rx.iter_mut().zip(&rf) {
        *a *= b.conj();
    }
    inverse.process(&mut rx);

    let (offset, peak) = rx[..=max_lag]
        .iter()
        .map(|c| c.norm())
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, m)| if m > best.1 { (i, m) } else { best });
    let peak = peak / size as f64;
    let energy: f64 = waveform[offset..offset + ref_len].iter().map(|x| x * x).sum();
    let score = if energy > 0.0 { std::f64::consts::SQRT_2 * peak / (energy * ref_len as f64).sqrt() } else { 0.0 };
    if !(score >= SYNC_THRESHOLD) {
        return Err(LinkError::PreambleNotFound { score, threshold: SYNC_THRESHOLD });
    }
    Ok(Sync { offset, score })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Demodulated {
    /// Decisions for every whole symbol after `offset`, preamble included.
    pub bits: Vec<bool>,
    /// `(E_mark − E_space)/(E_mark + E_space)` per symbol, in [-1, 1].
    pub soft: Vec<f64>,
    pub offset: usize,
}

/// Mark and space energies of every whole symbol from `offset` on.
pub(crate) fn symbol_energies<'a>(
    waveform: &'a [f64],
    plan: &'a HopPlan,
    sample_rate: f64,
    offset: usize,
) -> impl Iterator<Item = (usize, &'a [f64], f64, f64)> + 'a {
    let available = waveform.len().saturating_sub(offset);
    let count = plan.symbols_in(available, sample_rate);
    (0..count).map(move |k| {
        let seg = &waveform[offset + plan.symbol_start(k, sample_rate)..offset + plan.symbol_start(k + 1, sample_rate)];
        let (space, mark) = plan.tones(k);
        (k, seg, goertzel_power(seg, mark, sample_rate), goertzel_power(seg, space, sample_rate))
    })
}

/// Demodulates with known symbol timing.
pub fn demodulate_at(waveform: &[f64], plan: &HopPlan, sample_rate: f64, offset: usize) -> Demodulated {
    let (bits, soft) = symbol_energies(waveform, plan, sample_rate, offset)
        .map(|(_, _, mark, space)| {
            let total = mark + space;
            (mark > space, if total > 0.0 { (mark - space) / total } else { 0.0 })
        })
        .unzip();
    Demodulated { bits, soft, offset }
}

/// Synchronises on the preamble, then demodulates every whole symbol.
pub fn demodulate(waveform: &[f64], plan: &HopPlan, sample_rate: f64) -> Result<Demodulated, LinkError> {
    let sync = find_preamble(waveform, plan, sample_rate)?;
    Ok(demodulate_at(waveform, plan, sample_rate, sync.offset))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commlink::frame::PREAMBLE_BITS;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const FS: f64 = 192e3;

    fn random_bits(n: usize, seed: u64) -> Vec<bool> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random()).collect()
    }

    #[test]
    fn single_channel_zeros_give_pure_tone() {
        let plan = HopPlan::new(1, (20e3, 30e3), 0.0, 500.0, 1000.0, 1, 1).unwrap();
        let wave = modulate(&[false; 10], &plan, FS, 1.0);
        for (n, &x) in wave.iter().enumerate() {
            let expected = (TAU * 24.75e3 * n as f64 / FS).cos();
            assert!((x - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn duration_matches_bit_count() {
        let plan = HopPlan { symbol_rate: 1234.0, ..HopPlan::default() };
        let bits = random_bits(777, 3);
        let wave = modulate(&bits, &plan, FS, 1.0);
        let expected = bits.len() as f64 / plan.symbol_rate * FS;
        assert!((wave.len() as f64 - expected).abs() <= 1.0);
    }

    #[test]
    fn goertzel_matches_direct_dft() {
        let x: Vec<f64> = (0..100).map(|n| (0.37 * n as f64).sin() + 0.1 * n as f64).collect();
        let f = 12_345.6;
        let direct: Complex64 =
            x.iter().enumerate().map(|(n, &v)| Complex64::from_polar(v, -TAU * f * n as f64 / FS)).sum();
        assert!((goertzel_power(&x, f, FS) - direct.norm_sqr()).abs() < 1e-9 * direct.norm_sqr());
    }

    #[test]
    fn clean_loopback_of_random_bits() {
        let plan = HopPlan::default();
        let mut bits = preamble_bits();
        bits.extend(random_bits(10_000, 11));
        let mut wave = vec![0.0; 317];
        wave.extend(modulate(&bits, &plan, FS, 0.8));
        let demod = demodulate(&wave, &plan, FS).unwrap();
        assert_eq!(demod.offset, 317);
        assert_eq!(demod.bits, bits);
        assert!(demod.soft.iter().all(|s| s.abs() > 0.1));
    }

    #[test]
    fn pure_noise_has_no_preamble() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let noise: Vec<f64> = (0..100_000).map(|_| rng.random::<f64>() - 0.5).collect();
        assert!(matches!(demodulate(&noise, &HopPlan::default(), FS), Err(LinkError::PreambleNotFound { .. })));
        assert!(matches!(demodulate(&noise[..100], &HopPlan::default(), FS), Err(LinkError::WaveformTooShort { .. })));
    }

    #[test]
    fn preamble_length_in_samples() {
        let plan = HopPlan::default();
        assert_eq!(modulate(&preamble_bits(), &plan, FS, 1.0).len(), PREAMBLE_BITS * 192);
    }
}
