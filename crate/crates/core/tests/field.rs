use domewave::acoustic_field::{build_array, calibrate_d_eff, rayleigh_pressure, spl, subdivided_pressure};
use domewave::{ArrayLayout, DomeElement, DomeGeometry, DriveSignal, FieldPoint, Medium, PiezoFilm, Vec3};
use num_complex::Complex64;
use std::f64::consts::PI;

fn geom() -> DomeGeometry {
    DomeGeometry::new(1e-3, 100e-6, 25e-6).unwrap()
}

/// Rayleigh integral of the parabolic dome profile over a fine Cartesian
/// grid of the aperture, written out from scratch.
fn surface_integral(layout: &ArrayLayout, film: &PiezoFilm, medium: &Medium, at: Vec3, f: f64) -> Complex64 {
    let g = &layout.geom;
    let n = 240;
    let h = 2.0 * g.radius / n as f64;
    let k = 2.0 * PI * f / medium.sound_speed;
    let mut total = Complex64::new(0.0, 0.0);
    for e in &layout.elements {
        let s = 2.0 * film.d_eff * (g.radius.powi(2) + g.apex_height.powi(2)) / g.thickness;
        let up = (s * e.drive + g.apex_height.powi(2)).sqrt();
        let down = (-s * e.drive + g.apex_height.powi(2)).sqrt();
        let peak = 0.5 * (up - down);
        for i in 0..n {
            for j in 0..n {
                let x = -g.radius + (i as f64 + 0.5) * h;
                let y = -g.radius + (j as f64 + 0.5) * h;
                let r2 = x * x + y * y;
                if r2 > g.radius * g.radius {
                    continue;
                }
                let w = peak * (1.0 - r2 / g.radius.powi(2));
                let d = ((at.x - e.center.x - x).powi(2) + (at.y - e.center.y - y).powi(2) + at.z.powi(2)).sqrt();
                total += Complex64::from_polar(w * h * h / d, e.phase + k * d);
            }
        }
    }
    Complex64::new(0.0, 2.0 * PI * medium.density * f * f) * total
}

#[test]
fn lumped_sum_matches_surface_integral_far_away() {
    let film = PiezoFilm::default();
    let medium = Medium::water();
    let elements = vec![
        DomeElement { center: Vec3::new(-3e-3, 0.0, 0.0), area: geom().area(), phase: 0.0, drive: 10.0 },
        DomeElement { center: Vec3::new(2.5e-3, 1e-3, 0.0), area: geom().area(), phase: 1.0, drive: 5.0 },
    ];
    let layout = ArrayLayout { elements, panel_extent: (0.01, 0.01), geom: geom() };
    let at = Vec3::new(0.02, -0.01, 0.3);
    let point = FieldPoint::new(at.x, at.y, at.z).unwrap();
    let f = 20e3;
    let oracle = surface_integral(&layout, &film, &medium, at, f);
    let lumped = rayleigh_pressure(&layout, &film, &medium, &point, f).unwrap();
    let rings = subdivided_pressure(&layout, &film, &medium, &point, f, 64).unwrap();
    assert!((lumped - oracle).norm() / oracle.norm() < 1e-2);
    assert!((rings - oracle).norm() / oracle.norm() < 1e-3);
}

#[test]
fn calibrates_to_the_reference_source_level() {
    let film = PiezoFilm::default();
    let medium = Medium::water();
    let layout = build_array((0.03, 0.03), 2e-3, geom(), DriveSignal::new(10.0, 20e3)).unwrap();
    let at = FieldPoint::on_axis(1.0).unwrap();
    let cal = calibrate_d_eff(&layout, &film, &medium, 108.0, &at, 20e3, 10.0).unwrap();
    assert!(cal.iterations < 100);
    let layout = layout.with_uniform_drive(10.0);
    let level =
        spl(rayleigh_pressure(&layout, &film.with_d_eff(cal.d_eff), &medium, &at, 20e3).unwrap(), &medium).unwrap();
    assert!((level - 108.0).abs() < 0.01);
}
