//! The biphoton produced by a thin crystal: momentum-space amplitude,
//! polarization vectors and the direct (no interferometer) detection
//! amplitude.
//!
//! In the thin-crystal limit the pump field profile is transferred to the
//! two-photon amplitude: the coincidence amplitude at two points of a plane a
//! distance `Z` behind the crystal is the pump field, propagated to that
//! plane, evaluated at the midpoint `(ρ_s + ρ_i)/2`, times a Fresnel phase
//! in the separation `ρ_s - ρ_i` that drops out of all probabilities.

mod polarization;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::modes::TransverseMode;

pub use polarization::{
    bell_state, rotate_polarization_bilateral, Analyzer, BellState, ExchangeSymmetry,
    TwoPhotonPolarization, POLARIZATION_TOLERANCE,
};
pub(crate) use polarization::{analyzer_vectors, project};

/// Fraction of `2 z_R` below which a crystal counts as thin.
pub const THIN_CRYSTAL_FRACTION: f64 = 0.1;

/// Largest transverse wavevector, as a fraction of `K`, accepted by
/// [`phi_momentum`].
pub const PARAXIAL_BUDGET: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrystalConfig {
    pub length_mm: f64,
    /// Pump wavevector magnitude `K` in rad/mm.
    pub pump_wavevector: f64,
    pub thin_crystal: bool,
}

impl CrystalConfig {
    pub fn new(length_mm: f64, pump_wavevector: f64, thin_crystal: bool) -> Result<Self> {
        if !(length_mm > 0.0) || !length_mm.is_finite() {
            return Err(Error::invalid(format!("crystal length must be > 0, got {length_mm} mm")));
        }
        if !(pump_wavevector > 0.0) || !pump_wavevector.is_finite() {
            return Err(Error::invalid(format!(
                "pump wavevector must be > 0, got {pump_wavevector} rad/mm"
            )));
        }
        Ok(Self {
            length_mm,
            pump_wavevector,
            thin_crystal,
        })
    }

    /// Crystal matched to the pump's wavenumber.
    pub fn for_pump(length_mm: f64, pump: &TransverseMode, thin_crystal: bool) -> Result<Self> {
        Self::new(length_mm, pump.wavenumber(), thin_crystal)
    }
}

/// Pump mode (at the crystal plane), pair polarization and crystal.
#[derive(Debug, Clone)]
pub struct BiphotonState {
    pump: TransverseMode,
    polarization: TwoPhotonPolarization,
    crystal: CrystalConfig,
}

impl BiphotonState {
    pub fn new(
        pump: TransverseMode,
        polarization: TwoPhotonPolarization,
        crystal: CrystalConfig,
    ) -> Result<Self> {
        let k = pump.wavenumber();
        if (crystal.pump_wavevector - k).abs() > 1e-9 * k {
            return Err(Error::invalid(format!(
                "crystal pump wavevector {} rad/mm does not match the pump ({k} rad/mm)",
                crystal.pump_wavevector
            )));
        }
        if crystal.thin_crystal {
            let limit = THIN_CRYSTAL_FRACTION * 2.0 * pump.geometry().rayleigh_range();
            if crystal.length_mm >= limit {
                return Err(Error::invalid(format!(
                    "thin-crystal flag needs L < {limit} mm for this pump, got {} mm",
                    crystal.length_mm
                )));
            }
        }
        Ok(Self {
            pump,
            polarization,
            crystal,
        })
    }

    /// Thin crystal of negligible length for `pump`.
    pub fn thin(pump: TransverseMode, polarization: TwoPhotonPolarization) -> Result<Self> {
        let limit = THIN_CRYSTAL_FRACTION * 2.0 * pump.geometry().rayleigh_range();
        let crystal = CrystalConfig::for_pump(0.5 * limit, &pump, true)?;
        Self::new(pump, polarization, crystal)
    }

    pub fn pump(&self) -> &TransverseMode {
        &self.pump
    }

    pub fn polarization(&self) -> &TwoPhotonPolarization {
        &self.polarization
    }

    pub fn crystal(&self) -> &CrystalConfig {
        &self.crystal
    }

    pub fn with_polarization(&self, polarization: TwoPhotonPolarization) -> Self {
        Self {
            polarization,
            ..self.clone()
        }
    }

    pub(crate) fn require_thin(&self) -> Result<()> {
        if self.crystal.thin_crystal {
            Ok(())
        } else {
            Err(Error::unsupported(
                "closed-form detection amplitudes need the thin-crystal approximation",
            ))
        }
    }

    /// The pump field transferred to a detection plane `z_mm` behind the crystal.
    pub fn transferred_field(&self, z_mm: f64) -> Result<TransverseMode> {
        self.require_thin()?;
        if !z_mm.is_finite() {
            return Err(Error::invalid(format!("detection distance must be finite, got {z_mm}")));
        }
        Ok(self.pump.propagated(z_mm))
    }
}

/// `sin(x)/x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Momentum-space two-photon amplitude for wavevectors in rad/mm.
pub fn phi_momentum(state: &BiphotonState, q_s: (f64, f64), q_i: (f64, f64)) -> Result<Complex64> {
    let k = state.crystal.pump_wavevector;
    let budget = PARAXIAL_BUDGET * k;
    for (name, q) in [("signal", q_s), ("idler", q_i)] {
        let mag = q.0.hypot(q.1);
        if !(mag <= budget) {
            return Err(Error::domain(format!(
                "{name} wavevector ({}, {}) rad/mm exceeds the paraxial budget {budget} rad/mm",
                q.0, q.1
            )));
        }
    }
    let l = state.crystal.length_mm;
    let prefactor = (2.0 * l / k).sqrt() / PI;
    let v = state.pump.angular_spectrum(q_s.0 + q_i.0, q_s.1 + q_i.1);
    let phase_matching = if state.crystal.thin_crystal {
        1.0
    } else {
        let dx = q_s.0 - q_i.0;
        let dy = q_s.1 - q_i.1;
        sinc(l * (dx * dx + dy * dy) / (4.0 * k))
    };
    Ok(v * (prefactor * phase_matching))
}

/// Direct coincidence amplitude at `rho_s`, `rho_i` on a plane `z_mm` behind
/// the crystal: the propagated pump at the midpoint. The Fresnel phase in
/// `ρ_s - ρ_i` is omitted.
pub fn wavefunction_direct(
    state: &BiphotonState,
    rho_s: (f64, f64),
    rho_i: (f64, f64),
    z_mm: f64,
) -> Result<Complex64> {
    let field = state.transferred_field(z_mm)?;
    Ok(direct_amplitude(&field, rho_s, rho_i))
}

/// [`wavefunction_direct`] for an already propagated field.
#[inline]
pub fn direct_amplitude(field: &TransverseMode, rho_s: (f64, f64), rho_i: (f64, f64)) -> Complex64 {
    field.eval(0.5 * (rho_s.0 + rho_i.0), 0.5 * (rho_s.1 + rho_i.1))
}

/// Circular detector aperture sampled at equal-area points.
#[derive(Debug, Clone, PartialEq)]
pub struct Aperture {
    pub diameter_mm: f64,
    offsets: Vec<(f64, f64)>,
}

/// Default number of sample points per aperture.
pub const DEFAULT_APERTURE_SAMPLES: usize = 13;

impl Aperture {
    /// A point detector.
    pub fn point() -> Self {
        Self {
            diameter_mm: 0.0,
            offsets: vec![(0.0, 0.0)],
        }
    }

    /// Sunflower (Vogel spiral) sampling of a disk; every point stands for an
    /// equal share of the area.
    pub fn disk(diameter_mm: f64, samples: usize) -> Result<Self> {
        if !(diameter_mm >= 0.0) || !diameter_mm.is_finite() {
            return Err(Error::invalid(format!("aperture diameter must be ≥ 0, got {diameter_mm}")));
        }
        if samples == 0 {
            return Err(Error::invalid("aperture needs at least one sample point"));
        }
        if diameter_mm == 0.0 {
            return Ok(Self::point());
        }
        let golden = PI * (3.0 - 5f64.sqrt());
        let radius = 0.5 * diameter_mm;
        let n = samples as f64;
        let offsets = (0..samples)
            .map(|i| {
                let r = radius * ((i as f64 + 0.5) / n).sqrt();
                let a = golden * i as f64;
                (r * a.cos(), r * a.sin())
            })
            .collect();
        Ok(Self {
            diameter_mm,
            offsets,
        })
    }

    pub fn offsets(&self) -> &[(f64, f64)] {
        &self.offsets
    }

    /// Mean of `f` over the aperture centered at `center`.
    pub fn average<F: FnMut((f64, f64)) -> f64>(&self, center: (f64, f64), mut f: F) -> f64 {
        let sum: f64 = self
            .offsets
            .iter()
            .map(|&(dx, dy)| f((center.0 + dx, center.1 + dy)))
            .sum();
        sum / self.offsets.len() as f64
    }
}

/// Direct coincidence probability averaged over two finite apertures.
pub fn direct_probability_with_apertures(
    field: &TransverseMode,
    rho_s: (f64, f64),
    signal_aperture: &Aperture,
    rho_i: (f64, f64),
    idler_aperture: &Aperture,
) -> f64 {
    signal_aperture.average(rho_s, |s| {
        idler_aperture.average(rho_i, |i| direct_amplitude(field, s, i).norm_sqr())
    })
}
