//! Parametric studies over the dome and array models.

use crate::acoustic_field::{self, build_array, rayleigh_pressure, spl, ArrayLayout, FieldError, FieldPoint, Medium};
use crate::dome_mech::{self, DomeGeometry, DriveSignal, PiezoFilm};
use crate::resonance;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::{self, Write as _};
use thiserror::Error;

/// Column layout of [`SweepTable::to_csv`].
pub const SWEEP_CSV_HEADER: &str = "param,value,peak_deflection_m,avg_deflection_m,first_resonance_hz,spl_db,error";
pub const FREQUENCY_RESPONSE_CSV_HEADER: &str = "frequency_hz,spl_db,is_max";
/// Highest frequency accepted by [`frequency_response`] [Hz].
pub const MAX_RESPONSE_FREQUENCY: f64 = 500e3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("invalid sweep range: {0}")]
    InvalidRange(&'static str),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Thickness,
    ApexHeight,
    Radius,
    Frequency,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Thickness => "thickness",
            SweepParameter::ApexHeight => "apex_height",
            SweepParameter::Radius => "radius",
            SweepParameter::Frequency => "frequency",
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SweepParameter {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "thickness" => Ok(SweepParameter::Thickness),
            "apex_height" | "height" => Ok(SweepParameter::ApexHeight),
            "radius" => Ok(SweepParameter::Radius),
            "frequency" => Ok(SweepParameter::Frequency),
            other => Err(format!("unknown sweep parameter `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepOutput {
    PeakDeflection,
    AverageDeflection,
    FirstResonance,
    SplAtPoint,
}

impl SweepOutput {
    pub const ALL: [SweepOutput; 4] = [
        SweepOutput::PeakDeflection,
        SweepOutput::AverageDeflection,
        SweepOutput::FirstResonance,
        SweepOutput::SplAtPoint,
    ];
}

impl std::str::FromStr for SweepOutput {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "peak_deflection" => Ok(SweepOutput::PeakDeflection),
            "average_deflection" | "avg_deflection" => Ok(SweepOutput::AverageDeflection),
            "first_resonance" => Ok(SweepOutput::FirstResonance),
            "spl_at_point" | "spl" => Ok(SweepOutput::SplAtPoint),
            other => Err(format!("unknown sweep output `{other}`")),
        }
    }
}

/// Everything a sweep point needs besides the swept value.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub geom: DomeGeometry,
    pub film: PiezoFilm,
    pub medium: Medium,
    pub panel_extent: (f64, f64),
    pub pitch: f64,
    /// Array drive; its frequency is the SPL evaluation frequency.
    pub drive: DriveSignal,
    pub field_point: FieldPoint,
}

impl ModelConfig {
    pub fn layout(&self) -> Result<ArrayLayout, FieldError> {
        build_array(self.panel_extent, self.pitch, self.geom, self.drive)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub fixed: ModelConfig,
    pub outputs: Vec<SweepOutput>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepRow {
    pub value: f64,
    pub peak_deflection: Option<f64>,
    pub average_deflection: Option<f64>,
    pub first_resonance: Option<f64>,
    pub spl_db: Option<f64>,
    /// Reason code of the first failed output, if any.
    pub error: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub parameter: SweepParameter,
    pub rows: Vec<SweepRow>,
}

fn cell(out: &mut String, value: Option<f64>) {
    out.push(',');
    if let Some(v) = value {
        let _ = write!(out, "{v}");
    }
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{},{}", self.parameter, row.value);
            cell(&mut out, row.peak_deflection);
            cell(&mut out, row.average_deflection);
            cell(&mut out, row.first_resonance);
            cell(&mut out, row.spl_db);
            out.push(',');
            out.push_str(row.error.unwrap_or(""));
            out.push('\n');
        }
        out
    }

    pub fn column(&self, output: SweepOutput) -> Vec<Option<f64>> {
        self.rows
            .iter()
            .map(|r| match output {
                SweepOutput::PeakDeflection => r.peak_deflection,
                SweepOutput::AverageDeflection => r.average_deflection,
                SweepOutput::FirstResonance => r.first_resonance,
                SweepOutput::SplAtPoint => r.spl_db,
            })
            .collect()
    }
}

/// `steps` evenly spaced values from `min` to `max` inclusive.
pub fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![min],
        _ => (0..steps)
            .map(|i| if i + 1 == steps { max } else { min + (max - min) * i as f64 / (steps - 1) as f64 })
            .collect(),
    }
}

fn evaluate(spec: &SweepSpec, value: f64) -> SweepRow {
    let mut model = spec.fixed.clone();
    match spec.parameter {
        SweepParameter::Thickness => model.geom.thickness = value,
        SweepParameter::ApexHeight => model.geom.apex_height = value,
        SweepParameter::Radius => model.geom.radius = value,
        SweepParameter::Frequency => model.drive.frequency = value,
    }
    let mut row = SweepRow { value, ..Default::default() };
    let mut note = |code: &'static str| {
        if row.error.is_none() {
            row.error = Some(code);
        }
    };
    let vm = model.drive.amplitude;
    for output in &spec.outputs {
        match output {
            SweepOutput::PeakDeflection => match dome_mech::peak_deflection(&model.geom, &model.film, vm) {
                Ok(v) => row.peak_deflection = Some(v),
                Err(e) => note(e.code()),
            },
            SweepOutput::AverageDeflection => match dome_mech::average_deflection(&model.geom, &model.film, vm) {
                Ok(v) => row.average_deflection = Some(v),
                Err(e) => note(e.code()),
            },
            SweepOutput::FirstResonance => match resonance::first_resonance(&model.geom, &model.film) {
                Ok(v) => row.first_resonance = Some(v),
                Err(e) => note(e.code()),
            },
            SweepOutput::SplAtPoint => {
                let level = model.layout().and_then(|layout| {
                    let p = rayleigh_pressure(
                        &layout,
                        &model.film,
                        &model.medium,
                        &model.field_point,
                        model.drive.frequency,
                    )?;
                    spl(p, &model.medium)
                });
                match level {
                    Ok(v) => row.spl_db = Some(v),
                    Err(e) => note(e.code()),
                }
            }
        }
    }
    row
}

/// Evaluates the requested outputs at every step. Points where a model
/// precondition fails become rows with an error code instead of aborting
/// the sweep.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable, SweepError> {
    if !(spec.min.is_finite() && spec.max.is_finite() && spec.min < spec.max) {
        return Err(SweepError::InvalidRange("min must be < max"));
    }
    if spec.steps < 2 {
        return Err(SweepError::InvalidRange("steps must be >= 2"));
    }
    let rows = linspace(spec.min, spec.max, spec.steps).into_par_iter().map(|v| evaluate(spec, v)).collect();
    Ok(SweepTable { parameter: spec.parameter, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    /// `(frequency [Hz], SPL [dB])`.
    pub points: Vec<(f64, f64)>,
    /// Index of the maximum-SPL row.
    pub peak_index: usize,
}

impl FrequencyResponse {
    pub fn peak(&self) -> (f64, f64) {
        self.points[self.peak_index]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(FREQUENCY_RESPONSE_CSV_HEADER);
        out.push('\n');
        for (i, (f, level)) in self.points.iter().enumerate() {
            let _ = writeln!(out, "{f},{level},{}", u8::from(i == self.peak_index));
        }
        out
    }
}

/// SPL at a fixed point across a linear frequency grid.
pub fn frequency_response(
    layout: &ArrayLayout,
    film: &PiezoFilm,
    medium: &Medium,
    point: &FieldPoint,
    range: (f64, f64),
    steps: usize,
) -> Result<FrequencyResponse, SweepError> {
    let (lo, hi) = range;
    if !(lo > 0.0 && hi <= MAX_RESPONSE_FREQUENCY && lo <= hi) {
        return Err(SweepError::InvalidRange("frequencies must satisfy 0 < from <= to <= 500 kHz"));
    }
    if steps == 0 {
        return Err(SweepError::InvalidRange("steps must be >= 1"));
    }
    let freqs = if lo == hi { vec![lo] } else { linspace(lo, hi, steps.max(2)) };
    let points = freqs
        .into_par_iter()
        .map(|f| Ok((f, spl(rayleigh_pressure(layout, film, medium, point, f)?, medium)?)))
        .collect::<Result<Vec<_>, acoustic_field::FieldError>>()?;
    let peak_index = points.iter().enumerate().fold(0, |best, (i, p)| if p.1 > points[best].1 { i } else { best });
    Ok(FrequencyResponse { points, peak_index })
}

/// True if every consecutive step moves in the requested direction by
/// more than `1e-9` of the local magnitude.
pub fn strictly_monotone(values: &[f64], increasing: bool) -> bool {
    values.windows(2).all(|w| {
        let delta = if increasing { w[1] - w[0] } else { w[0] - w[1] };
        delta > 1e-9 * w[0].abs().max(w[1].abs())
    })
}
