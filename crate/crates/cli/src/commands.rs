//! Subcommands. Each reads the configuration, runs one model and writes
//! its result to `--out` (or stdout for text reports).

use crate::config::{parse_config, Config, ConfigError};
use crate::units::{self, Unit};
use clap::{Args, Parser, Subcommand};
use domewave::acoustic_field::{beam_pattern, calibrate_d_eff, rayleigh_pressure, spl};
use domewave::commlink::{
    self, apply_channel, decode_image, demodulate, encode_image, estimate_snr, modulate, read_wav, write_wav,
    GrayImage, LinkError, LinkMetrics,
};
use domewave::resonance::{resonance_model, solve_wavenumber};
use domewave::sweep::{frequency_response, linspace, run_sweep, SweepParameter, SweepSpec};
use domewave::FieldPoint;
use serde_json::json;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Environment variable capping worker threads (0 = one per core).
pub const THREADS_ENV: &str = "DOMEWAVE_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    /// 1 for invalid input, 2 for failures while running.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(ConfigError::Io { .. }) | CliError::Runtime(_) => 2,
            CliError::Config(_) | CliError::Usage(_) => 1,
        }
    }
}

fn runtime(err: impl std::fmt::Display) -> CliError {
    CliError::Runtime(err.to_string())
}

fn link_error(err: LinkError) -> CliError {
    match err {
        LinkError::InvalidPlan(_) | LinkError::InvalidConfig(_) => CliError::Usage(err.to_string()),
        other => runtime(other),
    }
}

#[derive(Debug, Parser)]
#[command(name = "domewave", version, about = "Microdome transducer and FH-BFSK link simulator")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON configuration file
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Noise seed; overrides link.seed
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Output file (reports go to stdout when omitted)
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Transmit level re full scale [dB]; overrides link.drive_level_db
    #[arg(long = "drive-db", global = true, value_name = "DB", allow_hyphen_values = true)]
    pub drive_db: Option<f64>,
    /// Also write the list of applied defaults to this file
    #[arg(long, global = true, value_name = "PATH")]
    pub provenance: Option<PathBuf>,
    /// Do not echo applied defaults to stderr
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// First resonance of one dome (JSON report)
    Resonance,
    /// Complex pressure and SPL at the configured field point (JSON report)
    Spl {
        /// Evaluation frequency [Hz, or e.g. "25kHz"]; default drive.frequency_f
        #[arg(long, value_name = "HZ")]
        frequency: Option<String>,
    },
    /// SPL along an arc centred on the array (CSV angle_deg,spl_db)
    Beam {
        /// First angle from the array axis [deg]
        #[arg(long, value_name = "DEG", allow_hyphen_values = true)]
        from: Option<f64>,
        /// Last angle from the array axis [deg]
        #[arg(long, value_name = "DEG", allow_hyphen_values = true)]
        to: Option<f64>,
        /// Number of angles
        #[arg(long, value_name = "N")]
        steps: Option<usize>,
        /// Evaluation frequency [Hz, or e.g. "1MHz"]; default drive.frequency_f
        #[arg(long, value_name = "HZ")]
        frequency: Option<String>,
    },
    /// Parametric sweep of one geometry or drive parameter (CSV)
    Sweep {
        /// thickness, apex_height, radius or frequency
        #[arg(long, value_name = "NAME")]
        param: Option<String>,
        /// Start value [m or Hz, unit suffix allowed]
        #[arg(long, value_name = "VALUE", allow_hyphen_values = true)]
        from: Option<String>,
        /// End value [m or Hz, unit suffix allowed]
        #[arg(long, value_name = "VALUE", allow_hyphen_values = true)]
        to: Option<String>,
        /// Number of points (>= 2)
        #[arg(long, value_name = "N")]
        steps: Option<usize>,
    },
    /// On-axis SPL over a frequency grid (CSV frequency_hz,spl_db,is_max)
    FreqResponse {
        /// Lowest frequency [Hz, unit suffix allowed]
        #[arg(long, value_name = "HZ", default_value = "10kHz")]
        from: String,
        /// Highest frequency [Hz, unit suffix allowed; <= 500 kHz]
        #[arg(long, value_name = "HZ", default_value = "200kHz")]
        to: String,
        /// Number of frequencies
        #[arg(long, value_name = "N", default_value_t = 191)]
        steps: usize,
    },
    /// Fit film.d_eff to a measured on-axis SPL (JSON report)
    Calibrate {
        /// Target SPL [dB re 1 uPa]; default calibrate.target_spl_db
        #[arg(long = "target-db", value_name = "DB")]
        target_db: Option<f64>,
        /// Measurement frequency [Hz, unit suffix allowed]
        #[arg(long, value_name = "HZ")]
        frequency: Option<String>,
        /// On-axis measurement distance [m, unit suffix allowed]
        #[arg(long, value_name = "M")]
        distance: Option<String>,
        /// Drive amplitude [V; "20Vpp" allowed]
        #[arg(long, value_name = "V")]
        amplitude: Option<String>,
    },
    /// Frame and modulate a PGM image into a transmit WAV [V]
    Tx {
        /// Input image (binary PGM, 8-bit)
        #[arg(long, value_name = "PATH")]
        image: PathBuf,
    },
    /// Pass a transmit WAV [V] through transducer, water and hydrophone
    Channel {
        /// Transmit waveform (mono WAV, sample rate = link.sample_rate)
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
    },
    /// Demodulate a hydrophone WAV [V] into an image and link metrics
    Rx {
        /// Received waveform (mono WAV)
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
        /// Image width [pixels]; default from --reference
        #[arg(long, value_name = "PIXELS")]
        width: Option<usize>,
        /// Image height [pixels]; default from --reference
        #[arg(long, value_name = "PIXELS")]
        height: Option<usize>,
        /// Transmitted image, for the bit error rate
        #[arg(long, value_name = "PATH")]
        reference: Option<PathBuf>,
        /// Metrics JSON output (stdout when omitted)
        #[arg(long, value_name = "PATH")]
        metrics: Option<PathBuf>,
    },
    /// STFT power spectrogram of a WAV (CSV, optional PGM heat map)
    Spectrogram {
        /// Waveform (mono WAV)
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
        /// Window length [samples]
        #[arg(long, value_name = "N")]
        window: Option<usize>,
        /// Hop between frames [samples]
        #[arg(long, value_name = "N")]
        hop: Option<usize>,
        /// Heat-map PGM; its dB range goes to <PATH>.txt
        #[arg(long, value_name = "PATH")]
        image: Option<PathBuf>,
    },
    /// Full chain: image -> tx -> channel -> rx -> image, plus metrics
    Loopback {
        /// Input image (binary PGM, 8-bit)
        #[arg(long, value_name = "PATH")]
        image: PathBuf,
        /// Metrics JSON output (stdout when omitted)
        #[arg(long, value_name = "PATH")]
        metrics: Option<PathBuf>,
        /// Also write the transmit waveform [V]
        #[arg(long = "tx-wav", value_name = "PATH")]
        tx_wav: Option<PathBuf>,
        /// Also write the hydrophone waveform [V]
        #[arg(long = "rx-wav", value_name = "PATH")]
        rx_wav: Option<PathBuf>,
        /// Also write the received spectrogram CSV
        #[arg(long, value_name = "PATH")]
        spectrogram: Option<PathBuf>,
    },
}

/// Sizes the global worker pool from [`THREADS_ENV`].
fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a non-negative integer, got `{value}`")))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(runtime)?;
    }
    Ok(())
}

fn load(global: &GlobalArgs) -> Result<Config, CliError> {
    let path = global.config.as_deref().ok_or_else(|| CliError::Usage("--config PATH is required".into()))?;
    let mut cfg = parse_config(path)?;
    if let Some(seed) = global.seed {
        cfg.link.seed = seed;
    }
    if let Some(db) = global.drive_db {
        if db.is_nan() || db == f64::INFINITY {
            return Err(CliError::Usage("--drive-db must be finite or -inf".into()));
        }
        cfg.link.drive_level_db = db;
    }
    if !global.quiet {
        for line in &cfg.provenance {
            eprintln!("default: {line}");
        }
    }
    if let Some(p) = &global.provenance {
        let mut text = cfg.provenance.join("\n");
        text.push('\n');
        write_file(p, text.as_bytes())?;
    }
    Ok(cfg)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, text.as_bytes()),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(runtime),
    }
}

fn emit_json(out: Option<&Path>, value: &impl serde::Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(runtime)?;
    text.push('\n');
    emit(out, &text)
}

fn require_out<'a>(global: &'a GlobalArgs, command: &str) -> Result<&'a Path, CliError> {
    global.out.as_deref().ok_or_else(|| CliError::Usage(format!("{command} needs --out PATH")))
}

fn flag_value(flag: &str, text: &str, unit: Unit) -> Result<f64, CliError> {
    units::parse(text, unit).map_err(|e| CliError::Usage(format!("--{flag}: {e}")))
}

fn read_image(path: &Path) -> Result<GrayImage, CliError> {
    let bytes = fs::read(path).map_err(|e| runtime(format!("cannot read {}: {e}", path.display())))?;
    GrayImage::from_pgm(&bytes).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn read_waveform(path: &Path, expected_rate: f64) -> Result<Vec<f64>, CliError> {
    let (samples, rate) = read_wav(path).map_err(link_error)?;
    if rate != expected_rate {
        return Err(CliError::Usage(format!(
            "{} is sampled at {rate} Hz but link.sample_rate is {expected_rate} Hz",
            path.display()
        )));
    }
    Ok(samples)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let cfg = load(&cli.global)?;
    let global = &cli.global;
    let out = global.out.as_deref();
    match &cli.command {
        Command::Resonance => {
            let model = resonance_model(&cfg.model.geom, &cfg.model.film).map_err(runtime)?;
            let root = solve_wavenumber(&model).map_err(runtime)?;
            let geom = &cfg.model.geom;
            emit_json(
                out,
                &json!({
                    "radius_m": geom.radius,
                    "apex_height_m": geom.apex_height,
                    "thickness_m": geom.thickness,
                    "shallow": geom.is_shallow(),
                    "flexural_rigidity_n_m": model.rigidity,
                    "tension_n_per_m": model.tension,
                    "areal_density_kg_per_m2": model.areal_density,
                    "wavenumber_per_m": root.k,
                    "k_r_times_radius": root.k * geom.radius,
                    "residual": root.residual,
                    "first_resonance_hz": model.frequency_at(root.k),
                }),
            )
        }
        Command::Spl { frequency } => {
            let f = match frequency {
                Some(t) => flag_value("frequency", t, Unit::Frequency)?,
                None => cfg.model.drive.frequency,
            };
            let layout = cfg.layout().map_err(runtime)?;
            let point = cfg.model.field_point;
            let p = rayleigh_pressure(&layout, &cfg.model.film, &cfg.model.medium, &point, f).map_err(runtime)?;
            let level = spl(p, &cfg.model.medium).map_err(runtime)?;
            let pos = point.position;
            emit_json(
                out,
                &json!({
                    "frequency_hz": f,
                    "field_point_m": [pos.x, pos.y, pos.z],
                    "elements": layout.elements.len(),
                    "pressure_re_pa": p.re,
                    "pressure_im_pa": p.im,
                    "pressure_abs_pa": p.norm(),
                    "spl_db": level,
                }),
            )
        }
        Command::Beam { from, to, steps, frequency } => {
            let f = match frequency {
                Some(t) => flag_value("frequency", t, Unit::Frequency)?,
                None => cfg.model.drive.frequency,
            };
            let from = from.map_or(cfg.beam.from, f64::to_radians);
            let to = to.map_or(cfg.beam.to, f64::to_radians);
            let steps = steps.unwrap_or(cfg.beam.steps);
            if steps == 0 {
                return Err(CliError::Usage("--steps must be >= 1".into()));
            }
            let angles = linspace(from, to, steps);
            let layout = cfg.layout().map_err(runtime)?;
            let pattern = beam_pattern(
                &layout,
                &cfg.model.film,
                &cfg.model.medium,
                f,
                cfg.beam.arc_radius,
                &angles,
                cfg.beam.plane,
            )
            .map_err(runtime)?;
            let mut csv = String::from("angle_deg,spl_db\n");
            for (theta, level) in pattern {
                let _ = writeln!(csv, "{},{level}", theta.to_degrees());
            }
            emit(out, &csv)
        }
        Command::Sweep { param, from, to, steps } => {
            let parameter: SweepParameter = match param {
                Some(p) => p.parse().map_err(CliError::Usage)?,
                None => cfg.sweep.parameter,
            };
            let unit = if parameter == SweepParameter::Frequency { Unit::Frequency } else { Unit::Length };
            let same = parameter == cfg.sweep.parameter;
            let bound = |flag: &str, given: &Option<String>, configured: f64| -> Result<f64, CliError> {
                match given {
                    Some(t) => flag_value(flag, t, unit),
                    None if same => Ok(configured),
                    None => {
                        Err(CliError::Usage(format!("--{flag} is required when --param differs from sweep.parameter")))
                    }
                }
            };
            let spec = SweepSpec {
                parameter,
                min: bound("from", from, cfg.sweep.from)?,
                max: bound("to", to, cfg.sweep.to)?,
                steps: steps.unwrap_or(cfg.sweep.steps),
                fixed: cfg.model.clone(),
                outputs: cfg.sweep.outputs.clone(),
            };
            let table = run_sweep(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
            emit(out, &table.to_csv())
        }
        Command::FreqResponse { from, to, steps } => {
            let lo = flag_value("from", from, Unit::Frequency)?;
            let hi = flag_value("to", to, Unit::Frequency)?;
            let layout = cfg.layout().map_err(runtime)?;
            let response = frequency_response(
                &layout,
                &cfg.model.film,
                &cfg.model.medium,
                &cfg.model.field_point,
                (lo, hi),
                *steps,
            )
            .map_err(|e| match e {
                domewave::sweep::SweepError::InvalidRange(_) => CliError::Usage(e.to_string()),
                other => runtime(other),
            })?;
            emit(out, &response.to_csv())
        }
        Command::Calibrate { target_db, frequency, distance, amplitude } => {
            let c = &cfg.calibrate;
            let target = target_db.unwrap_or(c.target_spl_db);
            let f = frequency.as_deref().map_or(Ok(c.frequency), |t| flag_value("frequency", t, Unit::Frequency))?;
            let d = distance.as_deref().map_or(Ok(c.distance), |t| flag_value("distance", t, Unit::Length))?;
            let vm = amplitude.as_deref().map_or(Ok(c.amplitude), |t| flag_value("amplitude", t, Unit::Voltage))?;
            let at = FieldPoint::on_axis(d).map_err(|e| CliError::Usage(e.to_string()))?;
            let layout = cfg.layout().map_err(runtime)?;
            let cal =
                calibrate_d_eff(&layout, &cfg.model.film, &cfg.model.medium, target, &at, f, vm).map_err(runtime)?;
            emit_json(
                out,
                &json!({
                    "d_eff_m_per_v": cal.d_eff,
                    "target_spl_db": cal.target_spl_db,
                    "achieved_spl_db": cal.achieved_spl_db,
                    "iterations": cal.iterations,
                    "frequency_hz": f,
                    "distance_m": d,
                    "amplitude_v": vm,
                    "elements": layout.elements.len(),
                }),
            )
        }
        Command::Tx { image } => {
            let path = require_out(global, "tx")?;
            let img = read_image(image)?;
            let bits = encode_image(&img).map_err(|e| CliError::Usage(e.to_string()))?;
            let link = &cfg.link;
            let wave = modulate(&bits, &link.plan, link.sample_rate, link.tx_amplitude());
            write_wav(path, &wave, link.sample_rate).map_err(link_error)
        }
        Command::Channel { input } => {
            let path = require_out(global, "channel")?;
            let tx = read_waveform(input, cfg.link.sample_rate)?;
            let rx = apply_channel(&tx, &cfg.link).map_err(link_error)?;
            write_wav(path, &rx, cfg.link.sample_rate).map_err(link_error)
        }
        Command::Rx { input, width, height, reference, metrics } => {
            let link = &cfg.link;
            let reference = reference.as_deref().map(read_image).transpose()?;
            let (w, h) = match (width, height, &reference) {
                (Some(w), Some(h), _) => (*w, *h),
                (None, None, Some(r)) => (r.width, r.height),
                _ => return Err(CliError::Usage("rx needs --width and --height, or --reference".into())),
            };
            let rx = read_waveform(input, link.sample_rate)?;
            let demod = demodulate(&rx, &link.plan, link.sample_rate).map_err(link_error)?;
            let snr = estimate_snr(&rx, &link.plan, link.sample_rate).map_err(link_error)?;
            let frame_bits = commlink::Frame { payload: vec![0; w * h] }.bit_len();
            let mut bits = demod.bits;
            bits.resize(frame_bits, false);
            let sent = reference.as_ref().map(encode_image).transpose().map_err(|e| CliError::Usage(e.to_string()))?;
            let errored = sent
                .as_ref()
                .map(|s| {
                    if s.len() != frame_bits {
                        return Err(CliError::Usage("reference image does not match --width/--height".into()));
                    }
                    Ok(s.iter().zip(&bits).filter(|(a, b)| a != b).count())
                })
                .transpose()?;
            let report = LinkMetrics {
                snr_db: Some(snr.snr_db),
                ber: errored.map(|e| e as f64 / frame_bits as f64),
                bits_sent: frame_bits,
                bits_errored: errored,
                drive_level_db: link.drive_level_db,
                seed: link.seed,
            };
            emit_json(metrics.as_deref(), &report)?;
            let img = decode_image(&bits, w, h).map_err(|e| runtime(format!("image did not decode: {e}")))?;
            match out {
                Some(p) => write_file(p, &img.to_pgm()),
                None => Ok(()),
            }
        }
        Command::Spectrogram { input, window, hop, image } => {
            let s = &cfg.spectrogram;
            let (samples, rate) = read_wav(input).map_err(link_error)?;
            let spec = commlink::compute_spectrogram_with(
                &samples,
                window.unwrap_or(s.window_length),
                hop.unwrap_or(s.hop_length),
                rate,
                s.window,
            )
            .map_err(link_error)?;
            if let Some(path) = image {
                write_file(path, &spec.to_image(s.floor_db).to_pgm())?;
                let mut sidecar = path.as_os_str().to_owned();
                sidecar.push(".txt");
                write_file(Path::new(&sidecar), spec.image_sidecar(s.floor_db).as_bytes())?;
            }
            emit(out, &spec.to_csv())
        }
        Command::Loopback { image, metrics, tx_wav, rx_wav, spectrogram } => {
            let img = read_image(image)?;
            let link = &cfg.link;
            let result = commlink::loopback(&img, link).map_err(link_error)?;
            if let Some(p) = tx_wav {
                write_wav(p, &result.transmitted, link.sample_rate).map_err(link_error)?;
            }
            if let Some(p) = rx_wav {
                write_wav(p, &result.received, link.sample_rate).map_err(link_error)?;
            }
            if let Some(p) = spectrogram {
                let s = &cfg.spectrogram;
                let spec = commlink::compute_spectrogram_with(
                    &result.received,
                    s.window_length,
                    s.hop_length,
                    link.sample_rate,
                    s.window,
                )
                .map_err(link_error)?;
                write_file(p, spec.to_csv().as_bytes())?;
            }
            emit_json(metrics.as_deref(), &result.metrics)?;
            let recovered = result.image.map_err(|e| runtime(format!("image did not decode: {e}")))?;
            match out {
                Some(p) => write_file(p, &recovered.to_pgm()),
                None => Ok(()),
            }
        }
    }
}
