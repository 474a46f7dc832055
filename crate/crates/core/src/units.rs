//! Unit conversions.
//!
//! Transverse lengths and propagation distances are in millimetres,
//! wavelengths in nanometres, path delays in micrometres and spatial
//! frequencies in rad/mm. Every conversion between these goes through here.

use std::f64::consts::PI;

pub const MM_PER_NM: f64 = 1e-6;
pub const MM_PER_UM: f64 = 1e-3;
pub const UM_PER_NM: f64 = 1e-3;

/// Wavenumber `2π/λ` in rad/mm for a wavelength given in nm.
#[inline]
pub fn wavenumber_per_mm(wavelength_nm: f64) -> f64 {
    2.0 * PI / (wavelength_nm * MM_PER_NM)
}

#[inline]
pub fn nm_to_mm(nm: f64) -> f64 {
    nm * MM_PER_NM
}

#[inline]
pub fn um_to_mm(um: f64) -> f64 {
    um * MM_PER_UM
}

#[inline]
pub fn nm_to_um(nm: f64) -> f64 {
    nm * UM_PER_NM
}
