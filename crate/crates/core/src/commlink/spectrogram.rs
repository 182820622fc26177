//! Short-time power spectra.

use super::image::GrayImage;
use super::LinkError;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::io;

/// Floor for `power_db` where a bin holds no energy.
pub const DB_FLOOR: f64 = -300.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    #[default]
    Hann,
    Rectangular,
}

impl Window {
    /// Periodic window coefficients.
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        match self {
            Window::Hann => (0..len).map(|n| 0.5 - 0.5 * (TAU * n as f64 / len as f64).cos()).collect(),
            Window::Rectangular => vec![1.0; len],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    /// Frame start times [s].
    pub times: Vec<f64>,
    /// Bin frequencies `0..=fs/2` [Hz].
    pub freqs: Vec<f64>,
    /// `times.len() × freqs.len()`, dB re the strongest bin.
    pub power_db: Vec<Vec<f64>>,
    /// Linear one-sided power; each frame sums to its windowed energy.
    pub power: Vec<Vec<f64>>,
    pub window_length: usize,
    pub hop_length: usize,
    /// Linear power of the 0 dB reference bin.
    pub ref_power: f64,
}

/// Hann-window spectrogram.
pub fn compute_spectrogram(
    waveform: &[f64],
    window_length: usize,
    hop_length: usize,
    sample_rate: f64,
) -> Result<Spectrogram, LinkError> {
    compute_spectrogram_with(waveform, window_length, hop_length, sample_rate, Window::Hann)
}

pub fn compute_spectrogram_with(
    waveform: &[f64],
    window_length: usize,
    hop_length: usize,
    sample_rate: f64,
    window: Window,
) -> Result<Spectrogram, LinkError> {
    if window_length < 2 || hop_length == 0 || !(sample_rate > 0.0) {
        return Err(LinkError::InvalidConfig("window must be >= 2 samples and hop >= 1".into()));
    }
    if waveform.len() < window_length {
        return Err(LinkError::WaveformTooShort { len: waveform.len(), needed: window_length });
    }
    let frames = (waveform.len() - window_length) / hop_length + 1;
    let bins = window_length / 2 + 1;
    let coeffs = window.coefficients(window_length);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(window_length);

    // |X_k|²/N folded onto the non-negative bins; by Parseval each frame
    // then sums to Σ(w·x)².
    let power: Vec<Vec<f64>> = (0..frames)
        .into_par_iter()
        .map(|f| {
            let start = f * hop_length;
            let mut buf: Vec<Complex64> = waveform[start..start + window_length]
                .iter()
                .zip(&coeffs)
                .map(|(x, w)| Complex64::new(x * w, 0.0))
                .collect();
            fft.process(&mut buf);
            let n = window_length as f64;
            (0..bins)
                .map(|k| {
                    let p = buf[k].norm_sqr() / n;
                    let mirrored = k != 0 && !(window_length.is_multiple_of(2) && k == window_length / 2);
                    if mirrored {
                        2.0 * p
                    } else {
                        p
                    }
                })
                .collect()
        })
        .collect();

    let ref_power = power.iter().flatten().copied().fold(0.0, f64::max);
    let power_db =
        power
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&p| {
                        if p > 0.0 && ref_power > 0.0 {
                            (10.0 * (p / ref_power).log10()).max(DB_FLOOR)
                        } else {
                            DB_FLOOR
                        }
                    })
                    .collect()
            })
            .collect();
    Ok(Spectrogram {
        times: (0..frames).map(|f| (f * hop_length) as f64 / sample_rate).collect(),
        freqs: (0..bins).map(|k| k as f64 * sample_rate / window_length as f64).collect(),
        power_db,
        power,
        window_length,
        hop_length,
        ref_power,
    })
}

impl Spectrogram {
    pub fn num_frames(&self) -> usize {
        self.times.len()
    }

    pub fn num_bins(&self) -> usize {
        self.freqs.len()
    }

    /// Fraction of total power in bins with `lo <= f <= hi`.
    pub fn band_energy_fraction(&self, lo: f64, hi: f64) -> f64 {
        let (mut inside, mut total) = (0.0, 0.0);
        for row in &self.power {
            for (p, f) in row.iter().zip(&self.freqs) {
                total += p;
                if (lo..=hi).contains(f) {
                    inside += p;
                }
            }
        }
        if total > 0.0 {
            inside / total
        } else {
            0.0
        }
    }

    /// Strongest bin frequency of one frame.
    pub fn peak_frequency(&self, frame: usize) -> f64 {
        let row = &self.power[frame];
        let k = (0..row.len()).fold(0, |best, k| if row[k] > row[best] { k } else { best });
        self.freqs[k]
    }

    /// Top-left cell holds the bin label, the first row frame times [s],
    /// the first column bin frequencies [Hz], and cells dB.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("freq_hz\\time_s");
        for t in &self.times {
            write!(out, ",{t}").unwrap();
        }
        out.push('\n');
        for (k, f) in self.freqs.iter().enumerate() {
            write!(out, "{f}").unwrap();
            for row in &self.power_db {
                write!(out, ",{}", row[k]).unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Gray heat map, time left to right and frequency bottom to top.
    /// Levels from `floor_db` (black) to 0 dB (white) map linearly.
    pub fn to_image(&self, floor_db: f64) -> GrayImage {
        let (w, h) = (self.num_frames(), self.num_bins());
        let mut pixels = Vec::with_capacity(w * h);
        for k in (0..h).rev() {
            for row in &self.power_db {
                let level = ((row[k] - floor_db) / -floor_db).clamp(0.0, 1.0);
                pixels.push((level * 255.0).round() as u8);
            }
        }
        GrayImage { width: w, height: h, pixels }
    }

    /// Sidecar text describing the gray mapping of [`Spectrogram::to_image`].
    pub fn image_sidecar(&self, floor_db: f64) -> String {
        format!(
            "black_db={floor_db}\nwhite_db=0\nref_power={}\nwindow_length={}\nhop_length={}\nfreq_min_hz={}\nfreq_max_hz={}\ntime_start_s={}\ntime_end_s={}\n",
            self.ref_power,
            self.window_length,
            self.hop_length,
            self.freqs[0],
            self.freqs[self.num_bins() - 1],
            self.times[0],
            self.times[self.num_frames() - 1],
        )
    }

    pub fn write_csv<W: io::Write>(&self, mut out: W) -> io::Result<()> {
        out.write_all(self.to_csv().as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FS: f64 = 192e3;

    fn tone(f: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| (TAU * f * i as f64 / FS).sin()).collect()
    }

    #[test]
    fn frame_count_and_axes() {
        let s = compute_spectrogram(&vec![0.1; 4096], 1024, 256, FS).unwrap();
        assert_eq!(s.num_frames(), 13);
        assert_eq!(s.num_bins(), 513);
        assert_eq!(s.freqs[0], 0.0);
        assert_eq!(*s.freqs.last().unwrap(), FS / 2.0);
        assert_eq!(s.power_db.len(), 13);
        assert!(s.power_db.iter().all(|r| r.len() == 513));
    }

    #[test]
    fn tone_peaks_in_nearest_bin() {
        let s = compute_spectrogram(&tone(25e3, 8192), 1024, 512, FS).unwrap();
        let bin = FS / 1024.0;
        for f in 0..s.num_frames() {
            assert!((s.peak_frequency(f) - 25e3).abs() <= bin);
        }
        assert!(s.power_db.iter().flatten().all(|&d| d <= 0.0));
    }

    #[test]
    fn parseval_rectangular() {
        let x: Vec<f64> = (0..5000).map(|i| ((i * 37 % 101) as f64 - 50.0) / 17.0).collect();
        for len in [1024, 1023] {
            let s = compute_spectrogram_with(&x, len, 300, FS, Window::Rectangular).unwrap();
            for (f, row) in s.power.iter().enumerate() {
                let energy: f64 = x[f * 300..f * 300 + len].iter().map(|v| v * v).sum();
                let sum: f64 = row.iter().sum();
                assert!((sum / energy - 1.0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn too_short() {
        assert!(matches!(
            compute_spectrogram(&[0.0; 100], 1024, 256, FS),
            Err(LinkError::WaveformTooShort { len: 100, needed: 1024 })
        ));
    }

    #[test]
    fn exports() {
        let s = compute_spectrogram(&tone(25e3, 2048), 256, 256, FS).unwrap();
        let csv = s.to_csv();
        assert_eq!(csv.lines().count(), 1 + s.num_bins());
        assert_eq!(csv.lines().next().unwrap().split(',').count(), 1 + s.num_frames());
        let img = s.to_image(-120.0);
        assert_eq!((img.width, img.height), (8, 129));
        assert!(img.pixels.contains(&255));
        assert!(s.image_sidecar(-120.0).contains("black_db=-120"));
        assert!((s.band_energy_fraction(20e3, 30e3) - 1.0).abs() < 0.05);
    }
}
