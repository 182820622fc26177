//! Transducer, water path and hydrophone.
//!
//! The transducer response is narrowband relative to a hop, so each
//! symbol is scaled by the real gain `|P(f_c)|/Vm` of its hop channel
//! centre, evaluated with the Rayleigh sum at the receiver position. The
//! bulk propagation delay `d/c` is an integer-sample shift; white Gaussian
//! noise is added in the pressure domain at the hydrophone, whose output
//! voltage is `p·S`.

use super::hop::HopPlan;
use super::LinkError;
use crate::acoustic_field::{rayleigh_pressure, ArrayLayout, FieldPoint, Medium};
use crate::dome_mech::PiezoFilm;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hydrophone {
    /// Sensitivity `S` [V/Pa].
    pub sensitivity: f64,
    pub max_frequency: f64,
}

impl Default for Hydrophone {
    /// −170 dB re 1 V/µPa, 200 kHz bandwidth.
    fn default() -> Self {
        Hydrophone { sensitivity: 10f64.powf(-170.0 / 20.0) * 1e6, max_frequency: 200e3 }
    }
}

/// Transmit-to-pressure gain model.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum ChannelGain {
    /// Rayleigh-sum response of the configured array.
    #[default]
    Transducer,
    /// Frequency-independent gain [Pa/V].
    Flat(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    pub layout: ArrayLayout,
    pub film: PiezoFilm,
    pub medium: Medium,
    pub plan: HopPlan,
    pub hydrophone: Hydrophone,
    /// Receiver on the array axis at this range [m].
    pub distance: f64,
    /// One-sided noise PSD at the hydrophone [Pa²/Hz].
    pub noise_psd: f64,
    /// Transmit level re full scale [dB]; `-inf` silences the transmitter.
    pub drive_level_db: f64,
    /// Full-scale drive amplitude `Vm` [V].
    pub full_scale_vm: f64,
    pub sample_rate: f64,
    pub seed: u64,
    /// Apply Thorp seawater absorption over the path.
    pub absorption: bool,
    pub gain: ChannelGain,
}

impl LinkConfig {
    pub const DEFAULT_DISTANCE: f64 = 1.0;
    pub const DEFAULT_NOISE_PSD: f64 = 1e-6;
    pub const DEFAULT_FULL_SCALE_VM: f64 = 10.0;
    pub const DEFAULT_SAMPLE_RATE: f64 = 192e3;

    pub fn new(layout: ArrayLayout, film: PiezoFilm, medium: Medium) -> Self {
        LinkConfig {
            layout,
            film,
            medium,
            plan: HopPlan::default(),
            hydrophone: Hydrophone::default(),
            distance: Self::DEFAULT_DISTANCE,
            noise_psd: Self::DEFAULT_NOISE_PSD,
            drive_level_db: 0.0,
            full_scale_vm: Self::DEFAULT_FULL_SCALE_VM,
            sample_rate: Self::DEFAULT_SAMPLE_RATE,
            seed: 0,
            absorption: false,
            gain: ChannelGain::Transducer,
        }
    }

    pub fn validate(&self) -> Result<(), LinkError> {
        self.plan.validate()?;
        let fail = |m: &str| Err(LinkError::InvalidConfig(m.into()));
        if !(self.sample_rate >= 4.0 * self.plan.band.1) {
            return fail("sample rate must be at least 4x the upper band edge");
        }
        if !(self.distance > 0.0) {
            return fail("tx-rx distance must be > 0");
        }
        if !(self.hydrophone.sensitivity > 0.0) {
            return fail("hydrophone sensitivity must be > 0");
        }
        if self.plan.band.1 > self.hydrophone.max_frequency {
            return fail("band exceeds the hydrophone bandwidth");
        }
        if !(self.noise_psd >= 0.0 && self.noise_psd.is_finite()) {
            return fail("noise PSD must be >= 0");
        }
        if !(self.full_scale_vm > 0.0) {
            return fail("full-scale drive must be > 0");
        }
        if self.drive_level_db.is_nan() || self.drive_level_db == f64::INFINITY {
            return fail("drive level must be finite or -inf");
        }
        self.medium.validate()?;
        Ok(())
    }

    /// Transmit amplitude `Vm·10^(drive/20)` [V].
    pub fn tx_amplitude(&self) -> f64 {
        self.full_scale_vm * 10f64.powf(self.drive_level_db / 20.0)
    }

    pub fn receiver(&self) -> Result<FieldPoint, LinkError> {
        let c = self.layout.centroid();
        Ok(FieldPoint::new(c.x, c.y, c.z + self.distance)?)
    }

    /// Pressure per transmit volt [Pa/V] at frequency `f`.
    pub fn pressure_gain(&self, frequency: f64) -> Result<f64, LinkError> {
        let gain = match self.gain {
            ChannelGain::Flat(g) => g,
            ChannelGain::Transducer => {
                let layout = self.layout.clone().with_uniform_drive(self.full_scale_vm);
                let p = rayleigh_pressure(&layout, &self.film, &self.medium, &self.receiver()?, frequency)?;
                p.norm() / self.full_scale_vm
            }
        };
        let loss = if self.absorption {
            10f64.powf(-thorp_absorption_db_per_km(frequency) * self.distance / 1e3 / 20.0)
        } else {
            1.0
        };
        Ok(gain * loss)
    }

    /// Propagation delay in whole samples.
    pub fn delay_samples(&self) -> usize {
        (self.distance / self.medium.sound_speed * self.sample_rate).round() as usize
    }

    /// Per-sample noise standard deviation at the hydrophone [Pa].
    pub fn noise_sigma(&self) -> f64 {
        (self.noise_psd * 0.5 * self.sample_rate).sqrt()
    }
}

/// Thorp's seawater absorption [dB/km], `f` in Hz.
pub fn thorp_absorption_db_per_km(frequency: f64) -> f64 {
    let f2 = (frequency / 1e3).powi(2);
    0.11 * f2 / (1.0 + f2) + 44.0 * f2 / (4100.0 + f2) + 2.75e-4 * f2 + 0.003
}

/// Transmit voltage → hydrophone voltage.
///
/// The output is `delay + waveform.len()` samples long.
pub fn apply_channel(waveform: &[f64], link: &LinkConfig) -> Result<Vec<f64>, LinkError> {
    link.validate()?;
    let plan = &link.plan;
    let fs = link.sample_rate;
    let gains =
        (0..plan.num_channels).map(|c| link.pressure_gain(plan.channel_center(c))).collect::<Result<Vec<_>, _>>()?;

    let delay = link.delay_samples();
    let mut out = vec![0.0; delay + waveform.len()];
    let mut k = 0;
    let mut end = plan.symbol_start(1, fs);
    for (n, &x) in waveform.iter().enumerate() {
        while n >= end {
            k += 1;
            end = plan.symbol_start(k + 1, fs);
        }
        out[delay + n] = gains[plan.channel_of_symbol(k)] * x;
    }

    let sigma = link.noise_sigma();
    if sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(link.seed);
        for p in &mut out {
            let z: f64 = StandardNormal.sample(&mut rng);
            *p += sigma * z;
        }
    }
    let s = link.hydrophone.sensitivity;
    out.iter_mut().for_each(|p| *p *= s);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acoustic_field::build_array;
    use crate::commlink::modem::modulate;
    use crate::dome_mech::{DomeGeometry, DriveSignal};

    fn link() -> LinkConfig {
        let geom = DomeGeometry::new(1e-3, 100e-6, 25e-6).unwrap();
        let layout = build_array((0.03, 0.03), 2e-3, geom, DriveSignal::new(10.0, 25e3)).unwrap();
        LinkConfig::new(layout, PiezoFilm::default(), Medium::water())
    }

    fn bits(n: usize) -> Vec<bool> {
        (0..n).map(|i| (i * 7 + i / 3) % 5 < 2).collect()
    }

    #[test]
    fn flat_noise_free_channel_is_a_delayed_copy() {
        let mut l = link();
        l.noise_psd = 0.0;
        l.gain = ChannelGain::Flat(2.0);
        let tx = modulate(&bits(40), &l.plan, l.sample_rate, 1.0);
        let rx = apply_channel(&tx, &l).unwrap();
        let delay = l.delay_samples();
        assert_eq!(delay, 130);
        // Cross-correlation peak over candidate lags.
        let best = (0..400)
            .map(|lag| (lag, tx.iter().zip(&rx[lag..]).map(|(a, b)| a * b).sum::<f64>()))
            .fold((0, f64::NEG_INFINITY), |b, (lag, c)| if c > b.1 { (lag, c) } else { b });
        let true_delay = l.distance / l.medium.sound_speed * l.sample_rate;
        assert!((best.0 as f64 - true_delay).abs() <= 1.0);
        let s = l.hydrophone.sensitivity;
        for (n, &x) in tx.iter().enumerate() {
            assert!((rx[delay + n] - 2.0 * s * x).abs() < 1e-15);
        }
    }

    #[test]
    fn silent_transmitter_leaves_calibrated_noise() {
        let mut l = link();
        l.drive_level_db = f64::NEG_INFINITY;
        l.seed = 99;
        let tx = modulate(&bits(1000), &l.plan, l.sample_rate, l.tx_amplitude());
        let rx = apply_channel(&tx, &l).unwrap();
        let n = rx.len() as f64;
        let mean = rx.iter().sum::<f64>() / n;
        let var = rx.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let expected = l.noise_psd * 0.5 * l.sample_rate * l.hydrophone.sensitivity.powi(2);
        assert!((var / expected - 1.0).abs() < 0.05);
        let kurtosis = rx.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n / (var * var);
        assert!((kurtosis - 3.0).abs() < 0.1);
    }

    #[test]
    fn ten_db_less_drive_is_ten_db_less_power() {
        let mut l = link();
        l.noise_psd = 0.0;
        let power = |l: &LinkConfig| {
            let tx = modulate(&bits(500), &l.plan, l.sample_rate, l.tx_amplitude());
            let rx = apply_channel(&tx, l).unwrap();
            rx.iter().map(|x| x * x).sum::<f64>() / rx.len() as f64
        };
        let full = power(&l);
        l.drive_level_db = -10.0;
        let reduced = power(&l);
        assert!((10.0 * (full / reduced).log10() - 10.0).abs() < 0.2);
    }

    #[test]
    fn same_seed_same_noise() {
        let l = link();
        let tx = modulate(&bits(50), &l.plan, l.sample_rate, 1.0);
        assert_eq!(apply_channel(&tx, &l).unwrap(), apply_channel(&tx, &l).unwrap());
        let other = LinkConfig { seed: 1, ..l.clone() };
        assert_ne!(apply_channel(&tx, &l).unwrap(), apply_channel(&tx, &other).unwrap());
    }

    #[test]
    fn thorp_values_and_absorption_option() {
        let a = thorp_absorption_db_per_km(25e3);
        assert!((a - 6.105).abs() < 1e-3, "{a}");
        assert!((thorp_absorption_db_per_km(1e3) - 0.0690).abs() < 1e-3);
        let mut l = link();
        let plain = l.pressure_gain(25e3).unwrap();
        l.absorption = true;
        let absorbed = l.pressure_gain(25e3).unwrap();
        assert!(absorbed < plain && absorbed > 0.99 * plain);
    }

    #[test]
    fn validation() {
        let mut l = link();
        l.sample_rate = 100e3;
        assert!(l.validate().is_err());
        let mut l = link();
        l.distance = 0.0;
        assert!(l.validate().is_err());
        let mut l = link();
        l.hydrophone.max_frequency = 25e3;
        assert!(l.validate().is_err());
    }
}
