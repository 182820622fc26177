//! First resonance of a microdome approximated as a flat clamped circular
//! film under in-plane tension.
//!
//! Free vibration of a stretched plate obeys `D∇⁴w − Tm∇²w = ps·ω²·w`.
//! Its regular axisymmetric solutions combine `J0(αr)` and `I0(βr)` with
//! `β² = α² + Tm/D`; clamping the rim gives the characteristic equation
//!
//! ```text
//! β·J0(αR)·I1(βR) + α·I0(βR)·J1(αR) = 0
//! ```
//!
//! whose smallest root `α = k_r` sets
//! `f_r = (k_r/2π)·sqrt((D/ps)·k_r² + Tm/ps)`.

use crate::dome_mech::{DomeGeometry, MechError, PiezoFilm};
use crate::special::{bessel_i1_over_i0, bessel_j01};
use std::f64::consts::PI;
use thiserror::Error;

/// Upper end of the bracket scan in `k·R`.
pub const SCAN_LIMIT: f64 = 20.0;
/// Bracket scan step in `k·R`.
pub const SCAN_STEP: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResonanceError {
    #[error("no sign change of the characteristic equation below k·R = {limit}")]
    NoRootInBracket { limit: f64 },
    #[error("invalid resonance model: {0}")]
    InvalidModel(&'static str),
    #[error(transparent)]
    Mech(#[from] MechError),
}

impl ResonanceError {
    pub fn code(&self) -> &'static str {
        match self {
            ResonanceError::NoRootInBracket { .. } => "NO_ROOT_IN_BRACKET",
            ResonanceError::InvalidModel(_) => "INVALID_PARAMETER",
            ResonanceError::Mech(e) => e.code(),
        }
    }
}

/// Lumped parameters of the clamped-film eigenproblem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceModel {
    /// Flexural rigidity `D` [N·m].
    pub rigidity: f64,
    /// In-plane tension `Tm` [N/m].
    pub tension: f64,
    /// Areal density `ps` [kg/m²].
    pub areal_density: f64,
    pub radius: f64,
}

/// Root returned by [`solve_wavenumber`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumber {
    /// `k_r` [1/m].
    pub k: f64,
    /// Normalised characteristic function at the root.
    pub residual: f64,
}

impl Wavenumber {
    pub fn k_times_radius(&self, radius: f64) -> f64 {
        self.k * radius
    }
}

impl ResonanceModel {
    pub fn validate(&self) -> Result<(), ResonanceError> {
        if !(self.rigidity.is_finite() && self.rigidity >= 0.0) {
            return Err(ResonanceError::InvalidModel("flexural rigidity must be >= 0"));
        }
        if !(self.tension.is_finite() && self.tension >= 0.0) {
            return Err(ResonanceError::InvalidModel("tension must be >= 0"));
        }
        if self.rigidity == 0.0 && self.tension == 0.0 {
            return Err(ResonanceError::InvalidModel("rigidity and tension cannot both be zero"));
        }
        if !(self.areal_density.is_finite() && self.areal_density > 0.0) {
            return Err(ResonanceError::InvalidModel("areal density must be > 0"));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(ResonanceError::InvalidModel("radius must be > 0"));
        }
        Ok(())
    }

    /// Characteristic function in the dimensionless variable `λ = αR`,
    /// divided through by `β·I0(βR)` so it stays O(1):
    /// `J0(λ)·I1(βR)/I0(βR) + (α/β)·J1(λ)`.
    ///
    /// The pure-membrane case `D = 0` reduces continuously to `J0(λ)`.
    pub fn characteristic(&self, lambda: f64) -> f64 {
        let (j0, j1) = bessel_j01(lambda);
        if self.rigidity == 0.0 {
            return j0;
        }
        let stretch = self.tension * self.radius * self.radius / self.rigidity;
        let beta_r = (lambda * lambda + stretch).sqrt();
        j0 * bessel_i1_over_i0(beta_r) + lambda / beta_r * j1
    }

    /// Eigenfrequency for an arbitrary radial wavenumber `k`.
    pub fn frequency_at(&self, k: f64) -> f64 {
        let ps = self.areal_density;
        k / (2.0 * PI) * (self.rigidity / ps * k * k + self.tension / ps).sqrt()
    }

    pub fn first_resonance(&self) -> Result<f64, ResonanceError> {
        let root = solve_wavenumber(self)?;
        Ok(self.frequency_at(root.k))
    }
}

/// `E·t³ / (12·(1 − ν²))`.
pub fn flexural_rigidity(film: &PiezoFilm, thickness: f64) -> f64 {
    let nu = film.poisson_ratio;
    film.youngs_modulus * thickness.powi(3) / (12.0 * (1.0 - nu * nu))
}

/// Maps a dome to the in-plane tension seen by the resonance model.
pub trait TensionModel {
    fn tension(&self, geom: &DomeGeometry, film: &PiezoFilm) -> f64;
}

/// Residual tension plus the membrane force from the arc-over-chord
/// stretch of the embossed spherical cap, `ε ≈ (2/3)(H0/R)²`, carried by
/// a biaxially strained film of stiffness `E·t/(1 − ν)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct EmbossingPrestrain;

impl TensionModel for EmbossingPrestrain {
    fn tension(&self, geom: &DomeGeometry, film: &PiezoFilm) -> f64 {
        let strain = 2.0 / 3.0 * (geom.apex_height / geom.radius).powi(2);
        film.residual_tension + film.youngs_modulus * geom.thickness / (1.0 - film.poisson_ratio) * strain
    }
}

/// A measured or otherwise known tension, independent of geometry.
#[derive(Debug, Clone, Copy)]
pub struct FixedTension(pub f64);

impl TensionModel for FixedTension {
    fn tension(&self, _geom: &DomeGeometry, _film: &PiezoFilm) -> f64 {
        self.0
    }
}

/// Tension from the default [`EmbossingPrestrain`] mapping.
pub fn tension_from_height(geom: &DomeGeometry, film: &PiezoFilm) -> f64 {
    EmbossingPrestrain.tension(geom, film)
}

/// Smallest positive `k_r` satisfying the clamped-rim condition.
///
/// Scans `k·R` in steps of [`SCAN_STEP`] for the first sign change, then
/// bisects to the last representable bracket.
pub fn solve_wavenumber(model: &ResonanceModel) -> Result<Wavenumber, ResonanceError> {
    model.validate()?;
    let g = |lambda: f64| model.characteristic(lambda);

    let steps = (SCAN_LIMIT / SCAN_STEP).round() as usize;
    let mut lo = 0.0;
    // g(0⁺) = I1/I0(βR) > 0 (or 1 for a membrane); start just above zero.
    let mut g_lo = g(f64::MIN_POSITIVE.sqrt());
    let mut bracket = None;
    for i in 1..=steps {
        let hi = i as f64 * SCAN_STEP;
        let g_hi = g(hi);
        if g_hi == 0.0 {
            return Ok(Wavenumber { k: hi / model.radius, residual: 0.0 });
        }
        if g_lo.signum() != g_hi.signum() {
            bracket = Some((lo, hi, g_lo));
            break;
        }
        lo = hi;
        g_lo = g_hi;
    }
    let (mut lo, mut hi, mut g_lo) = bracket.ok_or(ResonanceError::NoRootInBracket { limit: SCAN_LIMIT })?;

    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    Ok(Wavenumber { k: lambda / model.radius, residual: g(lambda) })
}

/// Assembles the eigenproblem of a dome under a chosen tension mapping.
pub fn resonance_model_with(
    geom: &DomeGeometry,
    film: &PiezoFilm,
    tension: &dyn TensionModel,
) -> Result<ResonanceModel, ResonanceError> {
    geom.validate()?;
    film.validate()?;
    Ok(ResonanceModel {
        rigidity: flexural_rigidity(film, geom.thickness),
        tension: tension.tension(geom, film),
        areal_density: film.density * geom.thickness,
        radius: geom.radius,
    })
}

pub fn resonance_model(geom: &DomeGeometry, film: &PiezoFilm) -> Result<ResonanceModel, ResonanceError> {
    resonance_model_with(geom, film, &EmbossingPrestrain)
}

/// First resonance frequency [Hz] under the embossing tension mapping.
pub fn first_resonance(geom: &DomeGeometry, film: &PiezoFilm) -> Result<f64, ResonanceError> {
    resonance_model(geom, film)?.first_resonance()
}

pub fn first_resonance_with(
    geom: &DomeGeometry,
    film: &PiezoFilm,
    tension: &dyn TensionModel,
) -> Result<f64, ResonanceError> {
    resonance_model_with(geom, film, tension)?.first_resonance()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn film() -> PiezoFilm {
        PiezoFilm::default()
    }

    #[test]
    fn rigidity_reference_and_scaling() {
        let d = flexural_rigidity(&film(), 25e-6);
        assert_relative_eq!(d, 3.68e-6, max_relative = 2e-3);
        assert_relative_eq!(flexural_rigidity(&film(), 50e-6), 8.0 * d, max_relative = 1e-14);
        assert_eq!(flexural_rigidity(&film(), 0.0), 0.0);
    }

    #[test]
    fn tension_reference_and_scaling() {
        let flat = DomeGeometry::new(1e-3, 0.0, 25e-6).unwrap();
        assert_eq!(tension_from_height(&flat, &film()), 0.0);
        let dome = DomeGeometry::new(1e-3, 100e-6, 25e-6).unwrap();
        let t = tension_from_height(&dome, &film());
        assert_relative_eq!(t, 631.3, max_relative = 1e-3);
        let tall = DomeGeometry { apex_height: 400e-6, ..dome };
        assert_relative_eq!(tension_from_height(&tall, &film()), 16.0 * t, max_relative = 1e-12);
        let measured = FixedTension(42.0);
        assert_eq!(measured.tension(&dome, &film()), 42.0);
    }

    #[test]
    fn plate_limit_frequency() {
        let flat = DomeGeometry::new(1e-3, 0.0, 25e-6).unwrap();
        let f = first_resonance(&flat, &film()).unwrap();
        assert_relative_eq!(f, 14.8e3, max_relative = 5e-3);
    }

    #[test]
    fn membrane_limit_frequency() {
        let model = ResonanceModel { rigidity: 0.0, tension: 631.0, areal_density: 0.0445, radius: 1e-3 };
        let f = model.first_resonance().unwrap();
        assert_relative_eq!(f, 45.6e3, max_relative = 2e-3);
    }

    #[test]
    fn quadrupled_density_halves_frequency() {
        for model in [
            ResonanceModel { rigidity: 3.68e-6, tension: 0.0, areal_density: 0.0445, radius: 1e-3 },
            ResonanceModel { rigidity: 0.0, tension: 631.0, areal_density: 0.0445, radius: 1e-3 },
        ] {
            let heavy = ResonanceModel { areal_density: 4.0 * model.areal_density, ..model };
            assert_relative_eq!(
                heavy.first_resonance().unwrap(),
                0.5 * model.first_resonance().unwrap(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn degenerate_models_rejected() {
        let model = ResonanceModel { rigidity: 0.0, tension: 0.0, areal_density: 0.04, radius: 1e-3 };
        assert!(matches!(solve_wavenumber(&model), Err(ResonanceError::InvalidModel(_))));
        let model = ResonanceModel { rigidity: 1e-6, tension: 0.0, areal_density: 0.0, radius: 1e-3 };
        assert!(solve_wavenumber(&model).is_err());
    }

    #[test]
    fn non_finite_rigidity_rejected() {
        let model = ResonanceModel { rigidity: f64::NAN, tension: 1.0, areal_density: 0.04, radius: 1e-3 };
        assert!(solve_wavenumber(&model).is_err());
    }
}
