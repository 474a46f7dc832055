//! Orbital angular momentum of the biphoton from a Laguerre-Gaussian pump.

mod decompose;
mod locus;
mod nnls;

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::hom::DetectionGeometry;
use crate::modes::{lg_radial, ModeKind, TransverseMode};

pub use decompose::{oam_decompose, oam_decompose_with, DecompositionOptions, OamSpectrum, Truncation};
pub use locus::{
    classical_model_falsifier, default_candidate_family, zero_locus_shift_test, CandidateFamily,
    FalsifierOptions, FalsifierReport, ProfileSpec, Verdict, WeightMode, ZeroLocusReport,
};
pub use nnls::nnls;

/// Polar coordinates of the detector-sum vector `ρ₁ + ρ₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumFrameCoords {
    /// `|ρ₁ + ρ₂|/√2` in mm.
    pub r_mm: f64,
    /// Direction of `ρ₁ + ρ₂` in `[0, 2π)`; `None` when `R = 0`.
    pub theta: Option<f64>,
}

pub fn sum_frame(rho1: (f64, f64), rho2: (f64, f64)) -> SumFrameCoords {
    let sx = rho1.0 + rho2.0;
    let sy = rho1.1 + rho2.1;
    let r = sx.hypot(sy);
    let theta = (r > 0.0).then(|| sy.atan2(sx).rem_euclid(2.0 * PI));
    SumFrameCoords {
        r_mm: r / SQRT_2,
        theta,
    }
}

pub(crate) fn lg_indices(pump: &TransverseMode) -> Result<(u32, i32)> {
    match pump.kind() {
        ModeKind::Lg { p, l } => Ok((*p, *l)),
        other => Err(Error::invalid(format!("expected a Laguerre-Gaussian pump, got {other:?}"))),
    }
}

/// Balanced-interferometer coincidence probability `|u(ρ)|² sin²(lθ)` for a
/// symmetric polarization state, where `u` is the LG radial factor at the
/// detection plane and `ρ = |ρ₁ + ρ₂|/2` is the midpoint radius.
pub fn lg_coincidence_profile(
    pump: &TransverseMode,
    geom: DetectionGeometry,
    rho1: (f64, f64),
    rho2: (f64, f64),
) -> Result<f64> {
    let (p, l) = lg_indices(pump)?;
    let frame = sum_frame(rho1, rho2);
    let Some(theta) = frame.theta else {
        return Ok(0.0);
    };
    let at_detector = pump.geometry().with_z(pump.geometry().z_mm + geom.z_mm);
    let u = lg_radial(p, l, &at_detector, frame.r_mm / SQRT_2);
    Ok(u.norm_sqr() * (f64::from(l) * theta).sin().powi(2))
}
