//! Simulation of multimode Hong-Ou-Mandel interference of photon pairs from
//! spontaneous parametric down-conversion with structured pump beams.
//!
//! Modules build on each other: [`modes`] evaluates transverse beam profiles,
//! [`biphoton`] turns a pump into a two-photon state, [`hom`] sends it through
//! a beam splitter, and [`oam`] and [`bsa`] analyze the outcome.

// Guards are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod biphoton;
pub mod bsa;
pub mod error;
pub mod hom;
pub mod modes;
pub mod oam;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Crate version, recorded in run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
