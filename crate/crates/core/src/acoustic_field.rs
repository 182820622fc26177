//! Radiated pressure of a baffled microdome array.
//!
//! Each dome is lumped into a point source of strength `w̄_n·A_n` on the
//! rigid baffle `z = 0`; the pressure at a point in the half-space `z > 0`
//! is
//!
//! ```text
//! P(r, f) = i·2π·ρ·f² · Σ_n w̄_n(V_n)·A_n·e^{iφ_n} · e^{ik|r − r_n|}/|r − r_n|
//! ```
//!
//! with `k = 2πf/c`. [`subdivided_pressure`] is a brute-force check of the
//! lumping that splits every dome into annular cells carrying the local
//! deflection.

use crate::dome_mech::{self, DomeGeometry, DriveSignal, MechError, PiezoFilm};
use crate::sum::CompensatedSum;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

pub type ComplexPressure = Complex64;

/// Upper bound of the d_eff calibration bracket [m/V].
pub const D_EFF_MAX: f64 = 1e-9;
/// Lower bound of the d_eff calibration bracket [m/V].
pub const D_EFF_MIN: f64 = 1e-16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error(transparent)]
    Mech(#[from] MechError),
    #[error("field point coincides with a dome centre")]
    SingularDistance,
    #[error("field point must lie in the radiation half-space z > 0 (got z = {0})")]
    BehindBaffle(f64),
    #[error("pitch {pitch} m is below the dome diameter {diameter} m")]
    PitchTooSmall { pitch: f64, diameter: f64 },
    #[error("domes {0} and {1} overlap")]
    Overlap(usize, usize),
    #[error("dome {0} lies outside the panel")]
    OutsidePanel(usize),
    #[error("zero pressure has no SPL")]
    ZeroPressure,
    #[error("target {target_db} dB is outside the reachable range [{min_db}, {max_db}] dB")]
    TargetUnreachable { target_db: f64, min_db: f64, max_db: f64 },
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: &'static str },
}

impl FieldError {
    pub fn code(&self) -> &'static str {
        match self {
            FieldError::Mech(e) => e.code(),
            FieldError::SingularDistance => "SINGULAR_DISTANCE",
            FieldError::BehindBaffle(_) => "BEHIND_BAFFLE",
            FieldError::PitchTooSmall { .. } => "PITCH_TOO_SMALL",
            FieldError::Overlap(..) => "OVERLAP",
            FieldError::OutsidePanel(_) => "OUTSIDE_PANEL",
            FieldError::ZeroPressure => "ZERO_PRESSURE",
            FieldError::TargetUnreachable { .. } => "TARGET_UNREACHABLE",
            FieldError::Invalid { .. } => "INVALID_PARAMETER",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn distance(&self, other: &Vec3) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

/// Fluid filling the radiation half-space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    pub density: f64,
    pub sound_speed: f64,
    /// SPL reference pressure [Pa].
    pub ref_pressure: f64,
}

impl Medium {
    pub fn water() -> Self {
        Medium { density: 1000.0, sound_speed: 1480.0, ref_pressure: 1e-6 }
    }

    pub fn wavenumber(&self, frequency: f64) -> f64 {
        2.0 * PI * frequency / self.sound_speed
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.density) {
            return Err(FieldError::Invalid { field: "density_rho", reason: "must be > 0" });
        }
        if !ok(self.sound_speed) {
            return Err(FieldError::Invalid { field: "sound_speed_c", reason: "must be > 0" });
        }
        if !ok(self.ref_pressure) {
            return Err(FieldError::Invalid { field: "ref_pressure_Pr", reason: "must be > 0" });
        }
        Ok(())
    }
}

impl Default for Medium {
    fn default() -> Self {
        Medium::water()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomeElement {
    /// Dome centre on the baffle.
    pub center: Vec3,
    pub area: f64,
    pub phase: f64,
    /// Drive amplitude `V_n` [V].
    pub drive: f64,
}

/// Identical domes sharing one geometry on a rigid baffle at `z = 0`,
/// panel centred on the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayLayout {
    pub elements: Vec<DomeElement>,
    /// Panel side lengths along x and y [m].
    pub panel_extent: (f64, f64),
    pub geom: DomeGeometry,
}

impl ArrayLayout {
    /// Checks non-overlap and panel containment of every dome.
    pub fn validate(&self) -> Result<(), FieldError> {
        self.geom.validate()?;
        let (half_x, half_y) = (0.5 * self.panel_extent.0, 0.5 * self.panel_extent.1);
        let tol = 1e-12 * (half_x + half_y);
        let min_sep = 2.0 * self.geom.radius * (1.0 - 1e-12);
        for (i, e) in self.elements.iter().enumerate() {
            if !(e.area > 0.0) {
                return Err(FieldError::Invalid { field: "area_An", reason: "must be > 0" });
            }
            if e.center.x.abs() > half_x + tol || e.center.y.abs() > half_y + tol {
                return Err(FieldError::OutsidePanel(i));
            }
            for (j, other) in self.elements.iter().enumerate().skip(i + 1) {
                if e.center.distance(&other.center) < min_sep {
                    return Err(FieldError::Overlap(i, j));
                }
            }
        }
        Ok(())
    }

    /// Mean of the dome centres.
    pub fn centroid(&self) -> Vec3 {
        let n = self.elements.len().max(1) as f64;
        let (sx, sy, sz) =
            self.elements.iter().fold((0.0, 0.0, 0.0), |(x, y, z), e| (x + e.center.x, y + e.center.y, z + e.center.z));
        Vec3::new(sx / n, sy / n, sz / n)
    }

    /// Overrides every dome's drive amplitude.
    pub fn with_uniform_drive(mut self, vm: f64) -> Self {
        for e in &mut self.elements {
            e.drive = vm;
        }
        self
    }
}

/// Observation point in the radiation half-space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldPoint {
    pub position: Vec3,
}

impl FieldPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, FieldError> {
        if !(z > 0.0) {
            return Err(FieldError::BehindBaffle(z));
        }
        Ok(FieldPoint { position: Vec3::new(x, y, z) })
    }

    pub fn on_axis(distance: f64) -> Result<Self, FieldError> {
        FieldPoint::new(0.0, 0.0, distance)
    }
}

/// Square grid of domes filling the panel, all driven in phase.
pub fn build_array(
    panel_extent: (f64, f64),
    pitch: f64,
    geom: DomeGeometry,
    drive: DriveSignal,
) -> Result<ArrayLayout, FieldError> {
    geom.validate()?;
    drive.validate()?;
    let diameter = 2.0 * geom.radius;
    if !(pitch >= diameter * (1.0 - 1e-12)) {
        return Err(FieldError::PitchTooSmall { pitch, diameter });
    }
    // Integer division of lengths; the slack absorbs binary representation
    // error (0.03 / 0.002 is not exactly 15 in f64).
    let count = |extent: f64| (extent / pitch + 1e-9).floor() as usize;
    let (nx, ny) = (count(panel_extent.0), count(panel_extent.1));
    let mut elements = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            let x = (ix as f64 - 0.5 * (nx as f64 - 1.0)) * pitch;
            let y = (iy as f64 - 0.5 * (ny as f64 - 1.0)) * pitch;
            elements.push(DomeElement {
                center: Vec3::new(x, y, 0.0),
                area: geom.area(),
                phase: drive.phase,
                drive: drive.amplitude,
            });
        }
    }
    Ok(ArrayLayout { elements, panel_extent, geom })
}

fn check_inputs(layout: &ArrayLayout, medium: &Medium, point: &FieldPoint, frequency: f64) -> Result<(), FieldError> {
    layout.geom.validate()?;
    medium.validate()?;
    if !(frequency.is_finite() && frequency > 0.0) {
        return Err(FieldError::Invalid { field: "frequency", reason: "must be > 0" });
    }
    if !(point.position.z > 0.0) {
        return Err(FieldError::BehindBaffle(point.position.z));
    }
    Ok(())
}

/// Complex contribution `s·e^{iφ}·e^{ikd}/d` of one point source.
fn point_source(strength: f64, phase: f64, source: &Vec3, target: &Vec3, k: f64) -> Result<Complex64, FieldError> {
    let d = source.distance(target);
    if d == 0.0 {
        return Err(FieldError::SingularDistance);
    }
    Ok(Complex64::from_polar(strength / d, phase + k * d))
}

fn prefactor(medium: &Medium, frequency: f64) -> Complex64 {
    Complex64::new(0.0, 2.0 * PI * medium.density * frequency * frequency)
}

/// Lumped-element Rayleigh sum.
pub fn rayleigh_pressure(
    layout: &ArrayLayout,
    film: &PiezoFilm,
    medium: &Medium,
    point: &FieldPoint,
    frequency: f64,
) -> Result<ComplexPressure, FieldError> {
    check_inputs(layout, medium, point, frequency)?;
    let k = medium.wavenumber(frequency);
    let mut acc = CompensatedSum::default();
    let mut cached: Option<(f64, f64)> = None;
    for e in &layout.elements {
        let w = match cached {
            Some((v, w)) if v == e.drive => w,
            _ => {
                let w = dome_mech::average_deflection(&layout.geom, film, e.drive)?;
                cached = Some((e.drive, w));
                w
            }
        };
        acc.add(point_source(w * e.area, e.phase, &e.center, &point.position, k)?);
    }
    Ok(prefactor(medium, frequency) * acc.value())
}

/// Same sum with each dome split into `rings` annuli, each annulus further
/// cut into azimuthal cells that radiate from their own position with the
/// profile deflection at the annulus mid-radius. `rings = 1` lumps the dome
/// at its centre with its mean deflection and reproduces
/// [`rayleigh_pressure`].
pub fn subdivided_pressure(
    layout: &ArrayLayout,
    film: &PiezoFilm,
    medium: &Medium,
    point: &FieldPoint,
    frequency: f64,
    rings: usize,
) -> Result<ComplexPressure, FieldError> {
    if rings == 0 {
        return Err(FieldError::Invalid { field: "rings", reason: "must be >= 1" });
    }
    if rings == 1 {
        return rayleigh_pressure(layout, film, medium, point, frequency);
    }
    check_inputs(layout, medium, point, frequency)?;
    let k = medium.wavenumber(frequency);
    let geom = &layout.geom;
    let radius = geom.radius;
    let mut acc = CompensatedSum::default();
    for e in &layout.elements {
        for ring in 0..rings {
            let inner = radius * ring as f64 / rings as f64;
            let outer = radius * (ring + 1) as f64 / rings as f64;
            let mid = 0.5 * (inner + outer);
            let ring_area = PI * (outer * outer - inner * inner) * e.area / geom.area();
            let w = dome_mech::deflection_profile(geom, film, e.drive, mid)?;
            let cells = 6 * (ring + 1);
            let cell_strength = w * ring_area / cells as f64;
            for c in 0..cells {
                let theta = 2.0 * PI * (c as f64 + 0.5) / cells as f64;
                let pos = e.center + Vec3::new(mid * theta.cos(), mid * theta.sin(), 0.0);
                acc.add(point_source(cell_strength, e.phase, &pos, &point.position, k)?);
            }
        }
    }
    Ok(prefactor(medium, frequency) * acc.value())
}

/// `20·log10(|p|/Pr)`.
pub fn spl(p: ComplexPressure, medium: &Medium) -> Result<f64, FieldError> {
    let magnitude = p.norm();
    if !(magnitude > 0.0) {
        return Err(FieldError::ZeroPressure);
    }
    Ok(20.0 * (magnitude / medium.ref_pressure).log10())
}

/// Pressure magnitude corresponding to an SPL.
pub fn pressure_from_spl(spl_db: f64, medium: &Medium) -> f64 {
    medium.ref_pressure * 10f64.powf(spl_db / 20.0)
}

/// Plane containing the arc of a beam pattern; angles are measured from
/// the +z axis toward +x (`Xz`) or +y (`Yz`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ArcPlane {
    #[default]
    Xz,
    Yz,
}

/// SPL on an arc of radius `arc_radius` about the array centroid.
/// Returns `(angle [rad], SPL [dB])` in the order of `angles`.
pub fn beam_pattern(
    layout: &ArrayLayout,
    film: &PiezoFilm,
    medium: &Medium,
    frequency: f64,
    arc_radius: f64,
    angles: &[f64],
    plane: ArcPlane,
) -> Result<Vec<(f64, f64)>, FieldError> {
    if !(arc_radius > 0.0) {
        return Err(FieldError::Invalid { field: "arc_radius", reason: "must be > 0" });
    }
    let centre = layout.centroid();
    angles
        .par_iter()
        .map(|&theta| {
            let (s, c) = theta.sin_cos();
            if !(theta.abs() < std::f64::consts::FRAC_PI_2) {
                return Err(FieldError::BehindBaffle(arc_radius * c));
            }
            let offset = match plane {
                ArcPlane::Xz => Vec3::new(arc_radius * s, 0.0, arc_radius * c),
                ArcPlane::Yz => Vec3::new(0.0, arc_radius * s, arc_radius * c),
            };
            let p = centre + offset;
            let point = FieldPoint::new(p.x, p.y, p.z)?;
            Ok((theta, spl(rayleigh_pressure(layout, film, medium, &point, frequency)?, medium)?))
        })
        .collect()
}

/// Result of [`calibrate_d_eff`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub d_eff: f64,
    pub achieved_spl_db: f64,
    pub target_spl_db: f64,
    pub iterations: usize,
}

/// Stop once the model SPL is this close to the target [dB].
pub const CALIBRATION_TOLERANCE_DB: f64 = 1e-5;
const CALIBRATION_MAX_ITERATIONS: usize = 100;

/// Finds the effective piezoelectric coefficient that makes the array,
/// driven uniformly at `vm`, produce `target_spl_db` at `at`.
///
/// SPL rises monotonically with `d`, so bisection (in `log d`) over
/// [[`D_EFF_MIN`], [`D_EFF_MAX`]] converges; coefficients that collapse
/// the dome count as "too large".
pub fn calibrate_d_eff(
    layout: &ArrayLayout,
    film: &PiezoFilm,
    medium: &Medium,
    target_spl_db: f64,
    at: &FieldPoint,
    frequency: f64,
    vm: f64,
) -> Result<Calibration, FieldError> {
    let layout = layout.clone().with_uniform_drive(vm);
    let model_spl = |d: f64| -> Result<Option<f64>, FieldError> {
        match rayleigh_pressure(&layout, &film.with_d_eff(d), medium, at, frequency) {
            Ok(p) => spl(p, medium).map(Some),
            Err(FieldError::Mech(MechError::NegativeRadicand { .. })) => Ok(None),
            Err(e) => Err(e),
        }
    };

    let min_db = model_spl(D_EFF_MIN)?.ok_or(FieldError::TargetUnreachable {
        target_db: target_spl_db,
        min_db: f64::NAN,
        max_db: f64::NAN,
    })?;
    let max_db = model_spl(D_EFF_MAX)?;
    let unreachable = |max_db: f64| FieldError::TargetUnreachable { target_db: target_spl_db, min_db, max_db };
    if target_spl_db < min_db {
        return Err(unreachable(max_db.unwrap_or(f64::NAN)));
    }
    if let Some(max_db) = max_db {
        if target_spl_db > max_db {
            return Err(unreachable(max_db));
        }
    }

    let (mut lo, mut hi) = (D_EFF_MIN.ln(), D_EFF_MAX.ln());
    let mut best: Option<(f64, f64)> = None;
    for iteration in 1..=CALIBRATION_MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        let d = mid.exp();
        match model_spl(d)? {
            Some(level) => {
                if (level - target_spl_db).abs() < CALIBRATION_TOLERANCE_DB {
                    return Ok(Calibration { d_eff: d, achieved_spl_db: level, target_spl_db, iterations: iteration });
                }
                best = Some((d, level));
                if level < target_spl_db {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            None => hi = mid,
        }
    }
    // The bracket collapsed onto the collapse boundary without meeting the
    // target: the valid range tops out below it.
    Err(unreachable(best.map_or(f64::NAN, |b| b.1)))
}
