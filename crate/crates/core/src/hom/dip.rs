//! Coincidence rate versus path delay.
//!
//! The monochromatic amplitudes carry no delay. A delay makes the two
//! interfering pathways partially distinguishable, which scales their cross
//! term by the coherence factor `γ(δ) = exp(-(δ/ℓ_c)²)`. Rates are integrated
//! over the midpoint plane, where the pump enters only through its power and
//! its mirror overlap `X = ∬ W*(u) W(Mu) d²u = 1 - 2·odd_fraction`.

use num_complex::Complex64;

use super::{Interferometer, Port, I};
use crate::biphoton::{analyzer_vectors, project, Analyzer};
use crate::error::{Error, Result};

/// Gaussian coherence envelope derived from the interference-filter bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceModel {
    pub center_wavelength_nm: f64,
    pub filter_fwhm_nm: f64,
    /// Dimensionless factor multiplying `λ²/Δλ`.
    pub shape: f64,
}

impl Default for CoherenceModel {
    fn default() -> Self {
        Self {
            center_wavelength_nm: 702.0,
            filter_fwhm_nm: 1.0,
            shape: 1.0 / std::f64::consts::PI,
        }
    }
}

impl CoherenceModel {
    pub fn new(center_wavelength_nm: f64, filter_fwhm_nm: f64, shape: f64) -> Result<Self> {
        for (name, v) in [
            ("center wavelength", center_wavelength_nm),
            ("filter bandwidth", filter_fwhm_nm),
            ("shape constant", shape),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(Self {
            center_wavelength_nm,
            filter_fwhm_nm,
            shape,
        })
    }

    /// `ℓ_c = shape · λ²/Δλ` in μm.
    pub fn coherence_length_um(&self) -> f64 {
        self.shape * crate::units::nm_to_um(
            self.center_wavelength_nm * self.center_wavelength_nm / self.filter_fwhm_nm,
        )
    }

    /// Cross-term weight at path difference `delay_um`.
    pub fn gamma(&self, delay_um: f64) -> f64 {
        let x = delay_um / self.coherence_length_um();
        (-x * x).exp()
    }
}

/// Evenly spaced path differences in μm, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayScan {
    pub start_um: f64,
    pub stop_um: f64,
    pub points: usize,
}

impl Default for DelayScan {
    fn default() -> Self {
        Self {
            start_um: -300.0,
            stop_um: 300.0,
            points: 61,
        }
    }
}

impl DelayScan {
    pub fn delays(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.start_um],
            n => (0..n)
                .map(|i| self.start_um + (self.stop_um - self.start_um) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

/// Which coincidences are counted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetectionConfig {
    /// One detector behind each output port.
    Cross { analyzer_1: Analyzer, analyzer_2: Analyzer },
    /// Two detectors behind the same output port.
    SamePort {
        port: Port,
        analyzer_a: Analyzer,
        analyzer_b: Analyzer,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DipCurve {
    pub delays_um: Vec<f64>,
    pub rates: Vec<f64>,
    /// Rate far outside the coherence length.
    pub baseline: f64,
    /// `(baseline - rate(0))/baseline`: positive for a dip, negative for a peak.
    pub visibility: f64,
}

/// Plane-integrated probabilities of the three output channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRates {
    pub cross: f64,
    pub port_1: f64,
    pub port_2: f64,
}

impl ChannelRates {
    pub fn total(&self) -> f64 {
        self.cross + self.port_1 + self.port_2
    }
}

/// Integrated rate of `c1 W(u) Π + c2 W(Mu) SΠ` through the analyzers.
fn integrated_rate(
    interf: &Interferometer,
    c1: Complex64,
    c2: Complex64,
    analyzers: (Analyzer, Analyzer),
    overlap: f64,
    gamma: f64,
) -> f64 {
    let pol = interf.state().polarization().coeffs();
    let swapped = interf.swapped.coeffs();
    let mut total = 0.0;
    for e1 in analyzer_vectors(analyzers.0) {
        for e2 in analyzer_vectors(analyzers.1) {
            let a = c1 * project(pol, e1, e2);
            let b = c2 * project(swapped, e1, e2);
            total += a.norm_sqr() + b.norm_sqr() + 2.0 * gamma * overlap * (a.conj() * b).re;
        }
    }
    total.max(0.0)
}

fn pathway_coefficients(interf: &Interferometer, cross: bool) -> (Complex64, Complex64) {
    let t = interf.splitter().t();
    let r = interf.splitter().r();
    if cross {
        (Complex64::new(t * t, 0.0), Complex64::new(-r * r, 0.0))
    } else {
        let c = I * t * r;
        (c, c)
    }
}

/// Channel probabilities at coherence `gamma`; they sum to one for every `gamma`.
pub fn channel_rates(interf: &Interferometer, gamma: f64) -> ChannelRates {
    let overlap = interf.mirror_overlap();
    let (a, b) = pathway_coefficients(interf, true);
    let cross = integrated_rate(interf, a, b, (None, None), overlap, gamma);
    let (a, b) = pathway_coefficients(interf, false);
    // Two photons in one port are counted once per unordered pair.
    let same = 0.5 * integrated_rate(interf, a, b, (None, None), overlap, gamma);
    ChannelRates {
        cross,
        port_1: same,
        port_2: same,
    }
}

/// Integrated rate of one analyzer setting, with the interference term at
/// coherence `gamma`. Same-port rates count ordered detector pairs.
pub(crate) fn analyzed_rate(interf: &Interferometer, cross: bool, analyzers: (Analyzer, Analyzer), gamma: f64) -> f64 {
    let (c1, c2) = pathway_coefficients(interf, cross);
    integrated_rate(interf, c1, c2, analyzers, interf.mirror_overlap(), gamma)
}

pub fn dip_curve(
    interf: &Interferometer,
    scan: DelayScan,
    detection: DetectionConfig,
    coherence: CoherenceModel,
) -> Result<DipCurve> {
    if scan.points == 0 {
        return Err(Error::invalid("delay scan needs at least one point"));
    }
    let overlap = interf.mirror_overlap();
    let (cross, analyzers) = match detection {
        DetectionConfig::Cross {
            analyzer_1,
            analyzer_2,
        } => (true, (analyzer_1, analyzer_2)),
        DetectionConfig::SamePort {
            analyzer_a,
            analyzer_b,
            ..
        } => (false, (analyzer_a, analyzer_b)),
    };
    let (c1, c2) = pathway_coefficients(interf, cross);
    let baseline = integrated_rate(interf, c1, c2, analyzers, overlap, 0.0);
    let interference = integrated_rate(interf, c1, c2, analyzers, overlap, 1.0) - baseline;
    let scale = integrated_rate(interf, c1, c2, (None, None), overlap, 0.0);
    let visibility = if baseline > 1e-12 * scale {
        -interference / baseline
    } else {
        0.0
    };
    let delays_um = scan.delays();
    let rates = delays_um
        .iter()
        .map(|&d| (baseline + coherence.gamma(d) * interference).max(0.0))
        .collect();
    Ok(DipCurve {
        delays_um,
        rates,
        baseline,
        visibility,
    })
}
