//! Closed-form electromechanics of a single embossed microdome.
//!
//! A shallow dome is treated as a clamped spherical membrane whose apex
//! height follows
//!
//! ```text
//! x(V) = sqrt( 2·d·V·(R² + H0²)/T + H0² )
//! ```
//!
//! with the instantaneous height inside `(R² + H²)` taken at its
//! steady-state value `H0`. Under a sinusoidal drive of amplitude `Vm`
//! the apex swings by `[x(+Vm) − x(−Vm)]/2` and the radial profile is
//! parabolic, vanishing at the clamped rim.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MechError {
    #[error("negative radicand {radicand:e} m² at {voltage} V: drive collapses the dome")]
    NegativeRadicand { voltage: f64, radicand: f64 },
    #[error("radial position {r} m lies outside the dome of radius {radius} m")]
    OutOfDome { r: f64, radius: f64 },
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: &'static str },
}

impl MechError {
    pub fn code(&self) -> &'static str {
        match self {
            MechError::NegativeRadicand { .. } => "NEGATIVE_RADICAND",
            MechError::OutOfDome { .. } => "OUT_OF_DOME",
            MechError::Invalid { .. } => "INVALID_PARAMETER",
        }
    }
}

fn invalid(field: &'static str, reason: &'static str) -> MechError {
    MechError::Invalid { field, reason }
}

/// Shape of one microdome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomeGeometry {
    pub radius: f64,
    pub apex_height: f64,
    pub thickness: f64,
}

impl DomeGeometry {
    pub fn new(radius: f64, apex_height: f64, thickness: f64) -> Result<Self, MechError> {
        let geom = DomeGeometry { radius, apex_height, thickness };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<(), MechError> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(invalid("radius_R", "must be > 0"));
        }
        if !(self.thickness.is_finite() && self.thickness > 0.0) {
            return Err(invalid("thickness_T", "must be > 0"));
        }
        if !(self.apex_height.is_finite() && self.apex_height >= 0.0) {
            return Err(invalid("apex_height_H0", "must be >= 0"));
        }
        Ok(())
    }

    /// True in the regime the membrane approximation was built for
    /// (`R/T > 100`). Informational only.
    pub fn is_shallow(&self) -> bool {
        self.radius / self.thickness > 100.0
    }

    /// Aperture area `πR²`.
    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }
}

/// Material parameters of the piezoelectric film.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiezoFilm {
    /// Effective piezoelectric coefficient [m/V]; signed.
    pub d_eff: f64,
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub density: f64,
    /// Residual in-plane tension [N/m].
    pub residual_tension: f64,
}

impl PiezoFilm {
    /// Placeholder coefficient until a calibration overrides it.
    pub const DEFAULT_D_EFF: f64 = 30e-12;

    pub fn validate(&self) -> Result<(), MechError> {
        if !self.d_eff.is_finite() {
            return Err(invalid("d_eff", "must be finite"));
        }
        if !(self.youngs_modulus.is_finite() && self.youngs_modulus > 0.0) {
            return Err(invalid("youngs_modulus_E", "must be > 0"));
        }
        if !(0.0..0.5).contains(&self.poisson_ratio) {
            return Err(invalid("poisson_ratio_nu", "must lie in [0, 0.5)"));
        }
        if !(self.density.is_finite() && self.density > 0.0) {
            return Err(invalid("density_rho_f", "must be > 0"));
        }
        if !(self.residual_tension.is_finite() && self.residual_tension >= 0.0) {
            return Err(invalid("residual_tension_T0", "must be >= 0"));
        }
        Ok(())
    }

    pub fn with_d_eff(self, d_eff: f64) -> Self {
        PiezoFilm { d_eff, ..self }
    }
}

impl Default for PiezoFilm {
    /// Bulk PVDF values.
    fn default() -> Self {
        PiezoFilm {
            d_eff: Self::DEFAULT_D_EFF,
            youngs_modulus: 2.5e9,
            poisson_ratio: 0.34,
            density: 1780.0,
            residual_tension: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSignal {
    /// Amplitude `Vm` (half of peak-to-peak) [V].
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl DriveSignal {
    pub fn new(amplitude: f64, frequency: f64) -> Self {
        DriveSignal { amplitude, frequency, phase: 0.0 }
    }

    pub fn validate(&self) -> Result<(), MechError> {
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(invalid("amplitude_Vm", "must be >= 0"));
        }
        if !(self.frequency.is_finite() && self.frequency > 0.0) {
            return Err(invalid("frequency_f", "must be > 0"));
        }
        Ok(())
    }
}

/// Coefficient `s` of the affine radicand `s·V + H0²`.
fn radicand_slope(geom: &DomeGeometry, film: &PiezoFilm) -> f64 {
    let h0 = geom.apex_height;
    2.0 * film.d_eff * (geom.radius * geom.radius + h0 * h0) / geom.thickness
}

fn radicand(geom: &DomeGeometry, film: &PiezoFilm, voltage: f64) -> Result<f64, MechError> {
    let h0 = geom.apex_height;
    let value = radicand_slope(geom, film) * voltage + h0 * h0;
    if value < 0.0 {
        return Err(MechError::NegativeRadicand { voltage, radicand: value });
    }
    Ok(value)
}

/// Apex height `x(V)` under a quasi-static voltage.
pub fn dome_apex_height(geom: &DomeGeometry, film: &PiezoFilm, voltage: f64) -> Result<f64, MechError> {
    geom.validate()?;
    if voltage == 0.0 || film.d_eff == 0.0 {
        return Ok(geom.apex_height);
    }
    Ok(radicand(geom, film, voltage)?.sqrt())
}

/// Apex deflection amplitude `[x(+Vm) − x(−Vm)]/2`.
///
/// Evaluated as `s·Vm / (x₊ + x₋)`, which is algebraically identical but
/// free of the cancellation the direct difference suffers at small drive.
pub fn peak_deflection(geom: &DomeGeometry, film: &PiezoFilm, vm: f64) -> Result<f64, MechError> {
    geom.validate()?;
    let slope = radicand_slope(geom, film);
    if vm == 0.0 || slope == 0.0 {
        return Ok(0.0);
    }
    let upper = radicand(geom, film, vm)?.sqrt();
    let lower = radicand(geom, film, -vm)?.sqrt();
    Ok(slope * vm / (upper + lower))
}

/// Deflection amplitude at radius `r` from the dome centre.
pub fn deflection_profile(geom: &DomeGeometry, film: &PiezoFilm, vm: f64, r: f64) -> Result<f64, MechError> {
    if !(0.0..=geom.radius).contains(&r) {
        return Err(MechError::OutOfDome { r, radius: geom.radius });
    }
    let rho = r / geom.radius;
    Ok(peak_deflection(geom, film, vm)? * (1.0 - rho * rho))
}

/// Area-averaged deflection amplitude over the circular aperture; the
/// parabolic profile averages to exactly half its peak.
pub fn average_deflection(geom: &DomeGeometry, film: &PiezoFilm, vm: f64) -> Result<f64, MechError> {
    Ok(0.5 * peak_deflection(geom, film, vm)?)
}
