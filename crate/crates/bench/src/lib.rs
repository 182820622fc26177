//! Shared fixtures for the benchmarks.

use domewave::acoustic_field::build_array;
use domewave::commlink::{encode_image, GrayImage, LinkConfig};
use domewave::{ArrayLayout, DomeGeometry, DriveSignal, Medium, PiezoFilm};

pub fn reference_geometry() -> DomeGeometry {
    DomeGeometry::new(1e-3, 100e-6, 25e-6).unwrap()
}

/// 15 x 15 domes on the 30 mm panel.
pub fn reference_array() -> ArrayLayout {
    build_array((0.03, 0.03), 2e-3, reference_geometry(), DriveSignal::new(10.0, 20e3)).unwrap()
}

pub fn reference_link() -> LinkConfig {
    LinkConfig::new(reference_array(), PiezoFilm::default(), Medium::water())
}

pub fn test_image(side: usize) -> GrayImage {
    GrayImage::new(side, side, (0..side * side).map(|i| ((i * 37) ^ (i >> 3)) as u8).collect()).unwrap()
}

pub fn test_bits(side: usize) -> Vec<bool> {
    encode_image(&test_image(side)).unwrap()
}
