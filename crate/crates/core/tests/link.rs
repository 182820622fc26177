use domewave::acoustic_field::build_array;
use domewave::commlink::frame::preamble_bits;
use domewave::commlink::modem::modulate;
use domewave::commlink::*;
use domewave::{DomeGeometry, DriveSignal, Medium, PiezoFilm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const FS: f64 = 192e3;

fn link() -> LinkConfig {
    let geom = DomeGeometry::new(1e-3, 100e-6, 25e-6).unwrap();
    let layout = build_array((0.03, 0.03), 2e-3, geom, DriveSignal::new(10.0, 25e3)).unwrap();
    LinkConfig::new(layout, PiezoFilm::default(), Medium::water())
}

fn image(w: usize, h: usize) -> GrayImage {
    GrayImage::new(w, h, (0..w * h).map(|i| ((i * 37) ^ (i >> 3)) as u8).collect()).unwrap()
}

/// Orthogonal tones: separation equal to the symbol rate.
fn orthogonal_plan() -> HopPlan {
    HopPlan::new(8, (20e3, 30e3), 1.5e3, 1000.0, 1000.0, 1, 32).unwrap()
}

fn noncoherent_ber(eb_n0_db: f64) -> f64 {
    0.5 * (-0.5 * 10f64.powf(eb_n0_db / 10.0)).exp()
}

/// Monte-Carlo BER with per-sample noise σ chosen for `eb_n0_db`.
fn monte_carlo_ber(plan: &HopPlan, eb_n0_db: f64, bits: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<bool> = (0..bits).map(|_| rng.random()).collect();
    let mut tx = preamble_bits();
    tx.extend(&data);
    let amplitude = 1.0;
    let sps = FS / plan.symbol_rate;
    // Eb = A²T/2 and N0/2 = σ²/fs give Eb/N0 = A²·sps/(4σ²).
    let sigma = (amplitude * amplitude * sps / (4.0 * 10f64.powf(eb_n0_db / 10.0))).sqrt();
    let normal = Normal::new(0.0, sigma).unwrap();
    let mut wave = modulate(&tx, plan, FS, amplitude);
    wave.resize(wave.len() + sps as usize, 0.0);
    wave.iter_mut().for_each(|x| *x += normal.sample(&mut rng));
    let demod = demodulate(&wave, plan, FS).unwrap();
    assert!(demod.offset <= 2, "sync at {}", demod.offset);
    ber(&data, &demod.bits[32..32 + bits]).unwrap()
}

#[test]
fn ber_tracks_noncoherent_curve_at_12_db() {
    let measured = monte_carlo_ber(&orthogonal_plan(), 12.0, 100_000, 12);
    let theory = noncoherent_ber(12.0);
    assert!(measured > theory / 3.0 && measured < theory * 3.0, "{measured} vs {theory}");
}

#[test]
fn ber_below_one_percent_at_10_db() {
    assert!(monte_carlo_ber(&orthogonal_plan(), 10.0, 100_000, 10) < 1e-2);
}

#[test]
fn noise_only_is_a_coin_flip() {
    let plan = HopPlan::default();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let n = 10_000;
    let sent: Vec<bool> = (0..n).map(|_| rng.random()).collect();
    let normal = Normal::new(0.0, 1.0).unwrap();
    let noise: Vec<f64> = (0..plan.symbol_start(n, FS)).map(|_| normal.sample(&mut rng)).collect();
    let demod = demodulate_at(&noise, &plan, FS, 0);
    let rate = ber(&sent, &demod.bits).unwrap();
    assert!((rate - 0.5).abs() < 0.02, "{rate}");
}

#[test]
fn noise_free_loopback_recovers_image() {
    let mut l = link();
    l.noise_psd = 0.0;
    let img = image(32, 32);
    let out = loopback(&img, &l).unwrap();
    assert_eq!(out.image.unwrap(), img);
    assert_eq!(out.metrics.ber, Some(0.0));
    let spec = compute_spectrogram(&out.received, 1024, 256, FS).unwrap();
    assert!(spec.band_energy_fraction(20e3, 30e3) >= 0.99);
}

#[test]
fn modulated_energy_stays_in_band_for_any_seed() {
    for seed in 0..5 {
        let plan = HopPlan::new(8, (20e3, 30e3), 1.5e3, 500.0, 1000.0, seed, 32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
        let bits: Vec<bool> = (0..2000).map(|_| rng.random()).collect();
        let wave = modulate(&bits, &plan, FS, 1.0);
        let periodogram = compute_spectrogram_with(&wave, wave.len(), 1, FS, Window::Rectangular).unwrap();
        let fraction = periodogram.band_energy_fraction(20e3, 30e3);
        assert!(fraction >= 0.99, "seed {seed}: {fraction}");
    }
}

#[test]
fn snr_falls_with_drive_for_every_seed() {
    let img = image(8, 8);
    for seed in 0..5 {
        let mut l = link();
        l.seed = seed;
        let snrs: Vec<f64> = [0.0, -5.0, -10.0, -15.0, -20.0, -25.0, -30.0]
            .iter()
            .map(|&d| {
                l.drive_level_db = d;
                loopback(&img, &l).unwrap().metrics.snr_db.unwrap()
            })
            .collect();
        assert!(snrs.windows(2).all(|w| w[1] < w[0]), "seed {seed}: {snrs:?}");
        let slope = (snrs[0] - snrs[6]) / 30.0;
        assert!((slope - 1.0).abs() < 0.05, "seed {seed}: slope {slope}");
    }
}

#[test]
fn identical_seed_identical_run() {
    let img = image(8, 8);
    let l = link();
    let a = loopback(&img, &l).unwrap();
    let b = loopback(&img, &l).unwrap();
    assert_eq!(a.received, b.received);
    assert_eq!(a.metrics, b.metrics);
}

#[test]
fn silent_link_reports_no_metrics() {
    let mut l = link();
    l.drive_level_db = f64::NEG_INFINITY;
    let out = loopback(&image(4, 4), &l).unwrap();
    assert_eq!(out.metrics.snr_db, None);
    assert_eq!(out.metrics.ber, None);
    assert!(out.image.is_err());
}
