//! Reduced-order models of a piezoelectric microdome-array underwater
//! transducer and of an FH-BFSK acoustic link driven by it.
//!
//! The chain is: drive voltage → dome deflection ([`dome_mech`]) → radiated
//! pressure ([`acoustic_field`]) → SPL; the [`resonance`] module estimates
//! the first clamped-film mode and [`sweep`] runs parametric studies over
//! the lot. [`commlink`] simulates image transmission through the same
//! transducer, a direct water path and a hydrophone.
//!
//! All quantities are SI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acoustic_field;
pub mod commlink;
pub mod dome_mech;
pub mod resonance;
pub mod special;
mod sum;
pub mod sweep;

pub use acoustic_field::{ArrayLayout, ComplexPressure, DomeElement, FieldError, FieldPoint, Medium, Vec3};
pub use dome_mech::{DomeGeometry, DriveSignal, MechError, PiezoFilm};
pub use resonance::{ResonanceError, ResonanceModel, TensionModel};
