//! Unit-suffixed scalars such as `"25um"`, `"20kHz"` or `"-170dB"`.

use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;
use std::fmt;

/// A config value as written: a bare SI number or a string with a unit.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Number(f64),
    Text(String),
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ScalarVisitor;
        impl Visitor<'_> for ScalarVisitor {
            type Value = Scalar;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a unit-suffixed string such as \"25um\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Scalar, E> {
                Ok(Scalar::Number(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Scalar, E> {
                Ok(Scalar::Number(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Scalar, E> {
                Ok(Scalar::Number(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Scalar, E> {
                Ok(Scalar::Text(v.to_owned()))
            }
        }
        deserializer.deserialize_any(ScalarVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Length,
    Speed,
    Frequency,
    Voltage,
    Pressure,
    /// Piezoelectric coefficient [m/V].
    Coefficient,
    Density,
    /// Force per length [N/m].
    Tension,
    /// Pressure power spectral density [Pa²/Hz].
    Psd,
    /// Hydrophone sensitivity [V/Pa].
    Sensitivity,
    /// Transducer gain [Pa/V].
    Gain,
    Angle,
    Decibel,
    Dimensionless,
}

impl Unit {
    /// SI symbol used in messages and the provenance log.
    pub fn symbol(self) -> &'static str {
        match self {
            Unit::Length => "m",
            Unit::Speed => "m/s",
            Unit::Frequency => "Hz",
            Unit::Voltage => "V",
            Unit::Pressure => "Pa",
            Unit::Coefficient => "m/V",
            Unit::Density => "kg/m^3",
            Unit::Tension => "N/m",
            Unit::Psd => "Pa^2/Hz",
            Unit::Sensitivity => "V/Pa",
            Unit::Gain => "Pa/V",
            Unit::Angle => "rad",
            Unit::Decibel => "dB",
            Unit::Dimensionless => "",
        }
    }

    /// Accepted spellings and their scale to SI; each may carry an SI
    /// prefix unless marked `false`.
    fn spellings(self) -> &'static [(&'static str, f64, bool)] {
        match self {
            Unit::Length => &[("m", 1.0, true)],
            Unit::Speed => &[("m/s", 1.0, true)],
            Unit::Frequency => &[("Hz", 1.0, true)],
            Unit::Voltage => &[("Vpp", 0.5, true), ("V", 1.0, true)],
            Unit::Pressure => &[("Pa", 1.0, true)],
            Unit::Coefficient => &[("m/V", 1.0, true), ("C/N", 1.0, true)],
            Unit::Density => {
                &[("kg/m^3", 1.0, false), ("kg/m3", 1.0, false), ("g/cm^3", 1e3, false), ("g/cm3", 1e3, false)]
            }
            Unit::Tension => &[("N/m", 1.0, true)],
            Unit::Psd => &[
                ("Pa^2/Hz", 1.0, false),
                ("Pa2/Hz", 1.0, false),
                ("uPa^2/Hz", 1e-12, false),
                ("uPa2/Hz", 1e-12, false),
            ],
            Unit::Sensitivity => &[("V/Pa", 1.0, true)],
            Unit::Gain => &[("Pa/V", 1.0, true)],
            Unit::Angle => &[("rad", 1.0, true), ("deg", std::f64::consts::PI / 180.0, false)],
            Unit::Decibel => &[("dB", 1.0, false)],
            Unit::Dimensionless => &[],
        }
    }
}

/// Decimal exponent of an SI prefix.
fn prefix(p: &str) -> Option<i32> {
    Some(match p {
        "" => 0,
        "G" => 9,
        "M" => 6,
        "k" => 3,
        "c" => -2,
        "m" => -3,
        "u" | "µ" | "μ" => -6,
        "n" => -9,
        "p" => -12,
        "f" => -15,
        _ => return None,
    })
}

/// `value * 10^exp`, dividing for negative exponents so `100um` is exactly `1e-4`.
fn scale10(value: f64, exp: i32) -> f64 {
    if exp < 0 {
        value / 10f64.powi(-exp)
    } else {
        value * 10f64.powi(exp)
    }
}

/// Splits `"25 um"` into `(25.0, "um")` using the longest numeric prefix.
fn split_number(text: &str) -> Option<(f64, &str)> {
    let text = text.trim();
    (1..=text.len())
        .rev()
        .filter(|&i| text.is_char_boundary(i))
        .find_map(|i| text[..i].trim().parse::<f64>().ok().map(|v| (v, text[i..].trim())))
}

/// Sensitivity written in dB re 1 V/µPa.
fn sensitivity_from_db(db: f64) -> f64 {
    10f64.powf(db / 20.0) * 1e6
}

pub fn parse(text: &str, unit: Unit) -> Result<f64, String> {
    let (value, suffix) = split_number(text).ok_or_else(|| format!("`{text}` does not start with a number"))?;
    if suffix.is_empty() {
        return Ok(value);
    }
    let suffix = suffix.replace(' ', "");
    if unit == Unit::Sensitivity && suffix == "dB" {
        return Ok(sensitivity_from_db(value));
    }
    for &(spelling, scale, prefixed) in unit.spellings() {
        if let Some(head) = suffix.strip_suffix(spelling) {
            if let Some(p) = if prefixed { prefix(head) } else { head.is_empty().then_some(0) } {
                let v = scale10(value, p);
                return Ok(if scale == 1.0 { v } else { v * scale });
            }
        }
    }
    let expected = match unit {
        Unit::Dimensionless => "no unit".to_string(),
        Unit::Sensitivity => "V/Pa or dB (re 1 V/uPa)".to_string(),
        _ => unit.symbol().to_string(),
    };
    Err(format!("unit `{suffix}` of `{text}` is not {expected}"))
}

impl Scalar {
    pub fn resolve(&self, unit: Unit) -> Result<f64, String> {
        let value = match self {
            Scalar::Number(v) => *v,
            Scalar::Text(t) => parse(t, unit)?,
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err("must be finite".into())
        }
    }
}
