//! JSON configuration: parsing, unit resolution, defaults and validation.
//!
//! Keys use the long field names (`radius_R`) with short and plain
//! aliases (`R`, `radius`). Every default that fills an omitted key is
//! recorded in [`Config::provenance`].

use crate::units::{Scalar, Unit};
use domewave::acoustic_field::ArcPlane;
use domewave::commlink::{ChannelGain, HopPlan, Hydrophone, LinkConfig, Window};
use domewave::dome_mech::MechError;
use domewave::sweep::{ModelConfig, SweepOutput, SweepParameter};
use domewave::{ArrayLayout, DomeGeometry, DriveSignal, FieldError, FieldPoint, Medium, PiezoFilm};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{file}:{line}:{column}: {message}")]
    Parse { file: PathBuf, line: usize, column: usize, message: String },
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },
    #[error("cannot read {file}: {source}")]
    Io { file: PathBuf, source: std::io::Error },
}

impl ConfigError {
    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Validation { field: field.into(), reason: reason.into() }
    }

    /// Field path of a validation error.
    pub fn field(&self) -> Option<&str> {
        match self {
            ConfigError::Validation { field, .. } => Some(field),
            _ => None,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    geometry: Option<RawGeometry>,
    film: Option<RawFilm>,
    medium: Option<RawMedium>,
    drive: Option<RawDrive>,
    array: Option<RawArray>,
    link: Option<RawLink>,
    sweep: Option<RawSweep>,
    spectrogram: Option<RawSpectrogram>,
    beam: Option<RawBeam>,
    calibrate: Option<RawCalibrate>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    #[serde(rename = "radius_R", alias = "R", alias = "radius")]
    radius: Option<Scalar>,
    #[serde(rename = "apex_height_H0", alias = "H0", alias = "apex_height")]
    apex_height: Option<Scalar>,
    #[serde(rename = "thickness_T", alias = "T", alias = "thickness")]
    thickness: Option<Scalar>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFilm {
    #[serde(alias = "d")]
    d_eff: Option<Scalar>,
    #[serde(rename = "youngs_modulus_E", alias = "E", alias = "youngs_modulus")]
    youngs_modulus: Option<Scalar>,
    #[serde(rename = "poisson_ratio_nu", alias = "nu", alias = "poisson_ratio")]
    poisson_ratio: Option<Scalar>,
    #[serde(rename = "density_rho_f", alias = "rho_f", alias = "density")]
    density: Option<Scalar>,
    #[serde(rename = "residual_tension_T0", alias = "T0", alias = "residual_tension")]
    residual_tension: Option<Scalar>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMedium {
    #[serde(rename = "density_rho", alias = "rho", alias = "density")]
    density: Option<Scalar>,
    #[serde(rename = "sound_speed_c", alias = "c", alias = "sound_speed")]
    sound_speed: Option<Scalar>,
    #[serde(rename = "ref_pressure_Pr", alias = "Pr", alias = "ref_pressure")]
    ref_pressure: Option<Scalar>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrive {
    #[serde(rename = "amplitude_Vm", alias = "Vm", alias = "amplitude")]
    amplitude: Option<Scalar>,
    #[serde(rename = "frequency_f", alias = "f", alias = "frequency")]
    frequency: Option<Scalar>,
    #[serde(rename = "phase_phi", alias = "phi", alias = "phase")]
    phase: Option<Scalar>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArray {
    panel_extent: Option<[Scalar; 2]>,
    pitch: Option<Scalar>,
    #[serde(alias = "point")]
    field_point: Option<[Scalar; 3]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHydrophone {
    #[serde(rename = "sensitivity_S", alias = "S", alias = "sensitivity")]
    sensitivity: Option<Scalar>,
    max_frequency: Option<Scalar>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHop {
    num_channels: Option<usize>,
    band: Option<[Scalar; 2]>,
    edge_guard: Option<Scalar>,
    tone_separation: Option<Scalar>,
    symbol_rate: Option<Scalar>,
    pattern_seed: Option<u64>,
    pattern_length: Option<usize>,
    pattern: Option<Vec<usize>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLink {
    #[serde(rename = "tx_rx_distance", alias = "distance")]
    distance: Option<Scalar>,
    noise_psd: Option<Scalar>,
    drive_level_db: Option<Scalar>,
    full_scale_vm: Option<Scalar>,
    sample_rate: Option<Scalar>,
    seed: Option<u64>,
    absorption: Option<bool>,
    /// Replaces the transducer model by a flat gain [Pa/V].
    flat_gain: Option<Scalar>,
    hydrophone: Option<RawHydrophone>,
    hop: Option<RawHop>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    #[serde(alias = "swept_parameter")]
    parameter: Option<String>,
    #[serde(alias = "min")]
    from: Option<Scalar>,
    #[serde(alias = "max")]
    to: Option<Scalar>,
    steps: Option<usize>,
    outputs: Option<Vec<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpectrogram {
    window_length: Option<usize>,
    hop_length: Option<usize>,
    window: Option<String>,
    floor_db: Option<Scalar>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBeam {
    arc_radius: Option<Scalar>,
    from: Option<Scalar>,
    to: Option<Scalar>,
    steps: Option<usize>,
    plane: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCalibrate {
    target_spl_db: Option<Scalar>,
    frequency: Option<Scalar>,
    distance: Option<Scalar>,
    amplitude: Option<Scalar>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub outputs: Vec<SweepOutput>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrogramSection {
    pub window_length: usize,
    pub hop_length: usize,
    pub window: Window,
    /// Level mapped to black in heat maps [dB].
    pub floor_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamSection {
    pub arc_radius: f64,
    /// Angular range [rad].
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub plane: ArcPlane,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrateSection {
    pub target_spl_db: f64,
    pub frequency: f64,
    pub distance: f64,
    /// Drive amplitude `Vm` [V].
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub model: ModelConfig,
    pub link: LinkConfig,
    pub sweep: SweepSection,
    pub spectrogram: SpectrogramSection,
    pub beam: BeamSection,
    pub calibrate: CalibrateSection,
    /// One line per default applied, `path = value unit`.
    pub provenance: Vec<String>,
}

impl Config {
    pub fn layout(&self) -> Result<ArrayLayout, FieldError> {
        self.model.layout()
    }
}

/// Reads and validates a configuration file.
pub fn parse_config(path: &Path) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { file: path.into(), source })?;
    parse_config_str(&text, path)
}

/// `file` only labels parse errors.
pub fn parse_config_str(text: &str, file: &Path) -> Result<Config, ConfigError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let raw: RawConfig = match serde_path_to_error::deserialize(&mut de) {
        Ok(raw) => raw,
        Err(err) => {
            let path = err.path().to_string();
            let inner = err.into_inner();
            return Err(if inner.is_data() {
                let field = if path == "." { "config".to_string() } else { path };
                ConfigError::validation(field, strip_position(&inner))
            } else {
                ConfigError::Parse {
                    file: file.into(),
                    line: inner.line(),
                    column: inner.column(),
                    message: strip_position(&inner),
                }
            });
        }
    };
    if let Err(err) = de.end() {
        return Err(ConfigError::Parse {
            file: file.into(),
            line: err.line(),
            column: err.column(),
            message: strip_position(&err),
        });
    }
    Resolver::default().resolve(raw)
}

fn strip_position(err: &serde_json::Error) -> String {
    let text = err.to_string();
    match text.rfind(" at line ") {
        Some(i) => text[..i].to_string(),
        None => text,
    }
}

#[derive(Default)]
struct Resolver {
    provenance: Vec<String>,
}

fn display(value: f64, unit: Unit) -> String {
    let magnitude = value.abs();
    let number =
        if magnitude != 0.0 && !(1e-3..1e6).contains(&magnitude) { format!("{value:e}") } else { format!("{value}") };
    if unit.symbol().is_empty() {
        number
    } else {
        format!("{number} {}", unit.symbol())
    }
}

impl Resolver {
    fn default_applied(&mut self, path: &str, shown: String) {
        self.provenance.push(format!("{path} = {shown}"));
    }

    fn scalar(&mut self, path: &str, value: Option<&Scalar>, unit: Unit, default: f64) -> Result<f64, ConfigError> {
        match value {
            Some(v) => v.resolve(unit).map_err(|reason| ConfigError::validation(path, reason)),
            None => {
                self.default_applied(path, display(default, unit));
                Ok(default)
            }
        }
    }

    fn required(&self, path: &str, value: Option<&Scalar>, unit: Unit) -> Result<f64, ConfigError> {
        value
            .ok_or_else(|| ConfigError::validation(path, "is required"))?
            .resolve(unit)
            .map_err(|reason| ConfigError::validation(path, reason))
    }

    fn count<T: Copy + std::fmt::Display>(&mut self, path: &str, value: Option<T>, default: T) -> T {
        value.unwrap_or_else(|| {
            self.default_applied(path, default.to_string());
            default
        })
    }

    fn pair(
        &mut self,
        path: &str,
        value: Option<&[Scalar; 2]>,
        unit: Unit,
        default: (f64, f64),
    ) -> Result<(f64, f64), ConfigError> {
        match value {
            Some([a, b]) => Ok((
                a.resolve(unit).map_err(|r| ConfigError::validation(format!("{path}[0]"), r))?,
                b.resolve(unit).map_err(|r| ConfigError::validation(format!("{path}[1]"), r))?,
            )),
            None => {
                self.default_applied(path, format!("[{}, {}]", display(default.0, unit), display(default.1, unit)));
                Ok(default)
            }
        }
    }

    fn resolve(mut self, raw: RawConfig) -> Result<Config, ConfigError> {
        let g = raw.geometry.ok_or_else(|| ConfigError::validation("geometry", "section is required"))?;
        let geom = DomeGeometry {
            radius: self.required("geometry.radius_R", g.radius.as_ref(), Unit::Length)?,
            apex_height: self.required("geometry.apex_height_H0", g.apex_height.as_ref(), Unit::Length)?,
            thickness: self.required("geometry.thickness_T", g.thickness.as_ref(), Unit::Length)?,
        };
        geom.validate().map_err(|e| mech("geometry", e))?;

        let f = raw.film.unwrap_or_default();
        let base = PiezoFilm::default();
        let film = PiezoFilm {
            d_eff: self.scalar("film.d_eff", f.d_eff.as_ref(), Unit::Coefficient, base.d_eff)?,
            youngs_modulus: self.scalar(
                "film.youngs_modulus_E",
                f.youngs_modulus.as_ref(),
                Unit::Pressure,
                base.youngs_modulus,
            )?,
            poisson_ratio: self.scalar(
                "film.poisson_ratio_nu",
                f.poisson_ratio.as_ref(),
                Unit::Dimensionless,
                base.poisson_ratio,
            )?,
            density: self.scalar("film.density_rho_f", f.density.as_ref(), Unit::Density, base.density)?,
            residual_tension: self.scalar(
                "film.residual_tension_T0",
                f.residual_tension.as_ref(),
                Unit::Tension,
                base.residual_tension,
            )?,
        };
        film.validate().map_err(|e| mech("film", e))?;

        let m = raw.medium.unwrap_or_default();
        let water = Medium::water();
        let medium = Medium {
            density: self.scalar("medium.density_rho", m.density.as_ref(), Unit::Density, water.density)?,
            sound_speed: self.scalar("medium.sound_speed_c", m.sound_speed.as_ref(), Unit::Speed, water.sound_speed)?,
            ref_pressure: self.scalar(
                "medium.ref_pressure_Pr",
                m.ref_pressure.as_ref(),
                Unit::Pressure,
                water.ref_pressure,
            )?,
        };
        medium.validate().map_err(|e| field("medium", e))?;

        let d = raw.drive.unwrap_or_default();
        let drive = DriveSignal {
            amplitude: self.scalar("drive.amplitude_Vm", d.amplitude.as_ref(), Unit::Voltage, 10.0)?,
            frequency: self.scalar("drive.frequency_f", d.frequency.as_ref(), Unit::Frequency, 20e3)?,
            phase: self.scalar("drive.phase_phi", d.phase.as_ref(), Unit::Angle, 0.0)?,
        };
        drive.validate().map_err(|e| mech("drive", e))?;

        let a = raw.array.unwrap_or_default();
        let panel_extent = self.pair("array.panel_extent", a.panel_extent.as_ref(), Unit::Length, (0.03, 0.03))?;
        if !(panel_extent.0 > 0.0 && panel_extent.1 > 0.0) {
            return Err(ConfigError::validation("array.panel_extent", "must be > 0"));
        }
        let pitch = self.scalar("array.pitch", a.pitch.as_ref(), Unit::Length, 2e-3)?;
        let point = match &a.field_point {
            Some(p) => {
                let mut xyz = [0.0; 3];
                for (i, s) in p.iter().enumerate() {
                    xyz[i] = s
                        .resolve(Unit::Length)
                        .map_err(|r| ConfigError::validation(format!("array.field_point[{i}]"), r))?;
                }
                xyz
            }
            None => {
                self.default_applied("array.field_point", "[0 m, 0 m, 1 m]".into());
                [0.0, 0.0, 1.0]
            }
        };
        let field_point = FieldPoint::new(point[0], point[1], point[2])
            .map_err(|_| ConfigError::validation("array.field_point[2]", "must be > 0 (radiation half-space)"))?;
        let model = ModelConfig { geom, film, medium, panel_extent, pitch, drive, field_point };
        let layout = model.layout().map_err(|e| field("array", e))?;

        let link = self.link(raw.link.unwrap_or_default(), layout, film, medium)?;
        let sweep = self.sweep(raw.sweep.unwrap_or_default())?;
        let spectrogram = self.spectrogram(raw.spectrogram.unwrap_or_default())?;
        let beam = self.beam(raw.beam.unwrap_or_default())?;

        let c = raw.calibrate.unwrap_or_default();
        let calibrate = CalibrateSection {
            target_spl_db: self.scalar("calibrate.target_spl_db", c.target_spl_db.as_ref(), Unit::Decibel, 108.0)?,
            frequency: self.scalar("calibrate.frequency", c.frequency.as_ref(), Unit::Frequency, 20e3)?,
            distance: self.scalar("calibrate.distance", c.distance.as_ref(), Unit::Length, 1.0)?,
            amplitude: self.scalar("calibrate.amplitude", c.amplitude.as_ref(), Unit::Voltage, 10.0)?,
        };
        if !(calibrate.frequency > 0.0) {
            return Err(ConfigError::validation("calibrate.frequency", "must be > 0"));
        }
        if !(calibrate.distance > 0.0) {
            return Err(ConfigError::validation("calibrate.distance", "must be > 0"));
        }
        if !(calibrate.amplitude > 0.0) {
            return Err(ConfigError::validation("calibrate.amplitude", "must be > 0"));
        }

        Ok(Config { model, link, sweep, spectrogram, beam, calibrate, provenance: self.provenance })
    }

    fn link(
        &mut self,
        l: RawLink,
        layout: ArrayLayout,
        film: PiezoFilm,
        medium: Medium,
    ) -> Result<LinkConfig, ConfigError> {
        let mut link = LinkConfig::new(layout, film, medium);
        link.distance = self.scalar("link.tx_rx_distance", l.distance.as_ref(), Unit::Length, link.distance)?;
        link.noise_psd = self.scalar("link.noise_psd", l.noise_psd.as_ref(), Unit::Psd, link.noise_psd)?;
        link.drive_level_db = self.scalar("link.drive_level_db", l.drive_level_db.as_ref(), Unit::Decibel, 0.0)?;
        link.full_scale_vm =
            self.scalar("link.full_scale_vm", l.full_scale_vm.as_ref(), Unit::Voltage, link.full_scale_vm)?;
        link.sample_rate =
            self.scalar("link.sample_rate", l.sample_rate.as_ref(), Unit::Frequency, link.sample_rate)?;
        link.seed = self.count("link.seed", l.seed, 0);
        link.absorption = self.count("link.absorption", l.absorption, false);
        if let Some(g) = &l.flat_gain {
            let gain = g.resolve(Unit::Gain).map_err(|r| ConfigError::validation("link.flat_gain", r))?;
            link.gain = ChannelGain::Flat(gain);
        }

        let h = l.hydrophone.unwrap_or_default();
        let defaults = Hydrophone::default();
        link.hydrophone = Hydrophone {
            sensitivity: self.scalar(
                "link.hydrophone.sensitivity_S",
                h.sensitivity.as_ref(),
                Unit::Sensitivity,
                defaults.sensitivity,
            )?,
            max_frequency: self.scalar(
                "link.hydrophone.max_frequency",
                h.max_frequency.as_ref(),
                Unit::Frequency,
                defaults.max_frequency,
            )?,
        };

        let p = l.hop.unwrap_or_default();
        let d = HopPlan::default();
        let num_channels = self.count("link.hop.num_channels", p.num_channels, d.num_channels);
        let band = self.pair("link.hop.band", p.band.as_ref(), Unit::Frequency, d.band)?;
        let edge_guard = self.scalar("link.hop.edge_guard", p.edge_guard.as_ref(), Unit::Frequency, d.edge_guard)?;
        let tone_separation =
            self.scalar("link.hop.tone_separation", p.tone_separation.as_ref(), Unit::Frequency, d.tone_separation)?;
        let symbol_rate =
            self.scalar("link.hop.symbol_rate", p.symbol_rate.as_ref(), Unit::Frequency, d.symbol_rate)?;
        let pattern_seed = self.count("link.hop.pattern_seed", p.pattern_seed, d.pattern_seed);
        let invalid_plan = |e: domewave::commlink::LinkError| ConfigError::validation("link.hop", e.to_string());
        link.plan = match p.pattern {
            Some(pattern) => {
                if p.pattern_length.is_some() {
                    return Err(ConfigError::validation(
                        "link.hop.pattern_length",
                        "conflicts with an explicit pattern",
                    ));
                }
                let plan =
                    HopPlan { num_channels, band, edge_guard, tone_separation, symbol_rate, pattern_seed, pattern };
                plan.validate().map_err(invalid_plan)?;
                plan
            }
            None => {
                let len = self.count("link.hop.pattern_length", p.pattern_length, HopPlan::DEFAULT_PATTERN_LEN);
                HopPlan::new(num_channels, band, edge_guard, tone_separation, symbol_rate, pattern_seed, len)
                    .map_err(invalid_plan)?
            }
        };
        link.validate().map_err(|e| ConfigError::validation("link", e.to_string()))?;
        Ok(link)
    }

    fn sweep(&mut self, s: RawSweep) -> Result<SweepSection, ConfigError> {
        let parameter = match &s.parameter {
            Some(name) => name.parse().map_err(|e: String| ConfigError::validation("sweep.parameter", e))?,
            None => {
                self.default_applied("sweep.parameter", "thickness".into());
                SweepParameter::Thickness
            }
        };
        let (unit, lo, hi) = match parameter {
            SweepParameter::Thickness => (Unit::Length, 10e-6, 50e-6),
            SweepParameter::ApexHeight => (Unit::Length, 50e-6, 300e-6),
            SweepParameter::Radius => (Unit::Length, 0.5e-3, 1.0e-3),
            SweepParameter::Frequency => (Unit::Frequency, 10e3, 200e3),
        };
        let from = self.scalar("sweep.from", s.from.as_ref(), unit, lo)?;
        let to = self.scalar("sweep.to", s.to.as_ref(), unit, hi)?;
        let steps = self.count("sweep.steps", s.steps, 20);
        let outputs = match &s.outputs {
            Some(names) => names
                .iter()
                .enumerate()
                .map(|(i, n)| n.parse().map_err(|e: String| ConfigError::validation(format!("sweep.outputs[{i}]"), e)))
                .collect::<Result<Vec<_>, _>>()?,
            None => {
                self.default_applied("sweep.outputs", "all".into());
                SweepOutput::ALL.to_vec()
            }
        };
        Ok(SweepSection { parameter, from, to, steps, outputs })
    }

    fn spectrogram(&mut self, s: RawSpectrogram) -> Result<SpectrogramSection, ConfigError> {
        let window = match s.window.as_deref() {
            None => {
                self.default_applied("spectrogram.window", "hann".into());
                Window::Hann
            }
            Some("hann") => Window::Hann,
            Some("rectangular") => Window::Rectangular,
            Some(other) => {
                return Err(ConfigError::validation(
                    "spectrogram.window",
                    format!("`{other}` is not hann or rectangular"),
                ))
            }
        };
        let section = SpectrogramSection {
            window_length: self.count("spectrogram.window_length", s.window_length, 1024),
            hop_length: self.count("spectrogram.hop_length", s.hop_length, 256),
            window,
            floor_db: self.scalar("spectrogram.floor_db", s.floor_db.as_ref(), Unit::Decibel, -120.0)?,
        };
        if section.window_length < 2 {
            return Err(ConfigError::validation("spectrogram.window_length", "must be >= 2"));
        }
        if section.hop_length == 0 {
            return Err(ConfigError::validation("spectrogram.hop_length", "must be >= 1"));
        }
        if !(section.floor_db < 0.0) {
            return Err(ConfigError::validation("spectrogram.floor_db", "must be < 0"));
        }
        Ok(section)
    }

    fn beam(&mut self, b: RawBeam) -> Result<BeamSection, ConfigError> {
        let plane = match b.plane.as_deref() {
            None => {
                self.default_applied("beam.plane", "xz".into());
                ArcPlane::Xz
            }
            Some("xz") => ArcPlane::Xz,
            Some("yz") => ArcPlane::Yz,
            Some(other) => return Err(ConfigError::validation("beam.plane", format!("`{other}` is not xz or yz"))),
        };
        let limit = 85f64.to_radians();
        Ok(BeamSection {
            arc_radius: self.scalar("beam.arc_radius", b.arc_radius.as_ref(), Unit::Length, 1.0)?,
            from: self.scalar("beam.from", b.from.as_ref(), Unit::Angle, -limit)?,
            to: self.scalar("beam.to", b.to.as_ref(), Unit::Angle, limit)?,
            steps: self.count("beam.steps", b.steps, 171),
            plane,
        })
    }
}

fn mech(section: &str, err: MechError) -> ConfigError {
    match err {
        MechError::Invalid { field, reason } => ConfigError::validation(format!("{section}.{field}"), reason),
        other => ConfigError::validation(section, other.to_string()),
    }
}

fn field(section: &str, err: FieldError) -> ConfigError {
    match err {
        FieldError::Invalid { field, reason } => ConfigError::validation(format!("{section}.{field}"), reason),
        FieldError::Mech(e) => mech(section, e),
        FieldError::PitchTooSmall { .. } => ConfigError::validation(format!("{section}.pitch"), err.to_string()),
        other => ConfigError::validation(section, other.to_string()),
    }
}
