//! Multimode Hong-Ou-Mandel interferometer.
//!
//! Each output port has its own transverse frame. Reflection at the beam
//! splitter mirrors the y axis, so every reflected photon contributes through
//! `M = diag(1, -1)`. With `A(a, b) = exp(iK|a - b|²/8Z) W((a + b)/2, Z)`
//! the four detection amplitudes are
//!
//! ```text
//! Ψ_tt(r1, r2) =  t²  A(r1, r2)        Π
//! Ψ_rr(r1, r2) = -r²  A(M r2, M r1)    SΠ
//! Ψ_tr(rA, rB) = itr [A(rA, M rB) Π + A(rB, M rA) SΠ]     (port 1)
//! Ψ_rt(rA, rB) = itr [A(M rA, rB) Π + A(M rB, rA) SΠ]     (port 2)
//! ```
//!
//! where `S` exchanges the photons' polarizations. These hold for any
//! lossless splitter, not only `t = r`.

mod dip;
mod scan;

use num_complex::Complex64;

use crate::biphoton::{analyzer_vectors, project, Analyzer, BiphotonState, TwoPhotonPolarization};
use crate::error::{Error, Result};
use crate::modes::{mirror_overlap, PlaneQuadrature, TransverseMode};

pub use dip::{
    channel_rates, dip_curve, ChannelRates, CoherenceModel, DelayScan, DetectionConfig, DipCurve,
};
pub use scan::{CoincidenceMap, MapMode, ScanGrid};
pub(crate) use dip::analyzed_rate;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Lossless beam splitter with real `t` and `r`; reflection carries a factor `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitter {
    t: f64,
    r: f64,
}

impl BeamSplitter {
    /// Splitter with transmission amplitude `t`; `r = sqrt(1 - t²)`.
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::invalid(format!("transmission amplitude must lie in (0, 1), got {t}")));
        }
        Ok(Self {
            t,
            r: (1.0 - t * t).sqrt(),
        })
    }

    pub fn balanced() -> Self {
        Self {
            t: std::f64::consts::FRAC_1_SQRT_2,
            r: std::f64::consts::FRAC_1_SQRT_2,
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

/// Both detectors sit a distance `z_mm` behind the crystal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionGeometry {
    pub z_mm: f64,
}

impl DetectionGeometry {
    pub fn new(z_mm: f64) -> Result<Self> {
        if !(z_mm > 0.0) || !z_mm.is_finite() {
            return Err(Error::invalid(format!("detector distance must be > 0, got {z_mm} mm")));
        }
        Ok(Self { z_mm })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Port {
    One,
    Two,
}

/// A detection amplitude as its four polarization components over
/// (hh, hv, vh, vv), indexed by the polarizations seen at the first and
/// second detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionAmplitude {
    pub components: [Complex64; 4],
}

impl DetectionAmplitude {
    fn scaled(pol: &TwoPhotonPolarization, factor: Complex64) -> Self {
        Self {
            components: pol.coeffs().map(|c| c * factor),
        }
    }

    pub fn zero() -> Self {
        Self {
            components: [Complex64::new(0.0, 0.0); 4],
        }
    }

    /// Amplitude seen through analyzers at the two detectors.
    pub fn project(&self, e1: [f64; 2], e2: [f64; 2]) -> Complex64 {
        project(&self.components, e1, e2)
    }

    /// Detection probability, summed over unanalyzed polarizations.
    pub fn probability(&self, first: Analyzer, second: Analyzer) -> f64 {
        let mut total = 0.0;
        for e1 in analyzer_vectors(first) {
            for e2 in analyzer_vectors(second) {
                total += self.project(e1, e2).norm_sqr();
            }
        }
        total
    }

    pub fn norm_sqr(&self) -> f64 {
        self.components.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Add for DetectionAmplitude {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut components = self.components;
        for (c, r) in components.iter_mut().zip(rhs.components) {
            *c += r;
        }
        Self { components }
    }
}

impl std::ops::Neg for DetectionAmplitude {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            components: self.components.map(|c| -c),
        }
    }
}

/// Probability of two interfering pathways whose cross term is reduced by
/// the coherence factor `gamma`.
pub fn partially_coherent_probability(
    first: &DetectionAmplitude,
    second: &DetectionAmplitude,
    gamma: f64,
    analyzer_1: Analyzer,
    analyzer_2: Analyzer,
) -> f64 {
    let mut total = 0.0;
    for e1 in analyzer_vectors(analyzer_1) {
        for e2 in analyzer_vectors(analyzer_2) {
            let a = first.project(e1, e2);
            let b = second.project(e1, e2);
            total += a.norm_sqr() + b.norm_sqr() + 2.0 * gamma * (a.conj() * b).re;
        }
    }
    total.max(0.0)
}

#[inline]
fn mirror(p: (f64, f64)) -> (f64, f64) {
    (p.0, -p.1)
}

/// A biphoton sent through a beam splitter to detectors at distance `Z`.
///
/// Holds the pump field propagated to the detection plane so repeated
/// evaluations are cheap.
#[derive(Debug, Clone)]
pub struct Interferometer {
    state: BiphotonState,
    splitter: BeamSplitter,
    geometry: DetectionGeometry,
    field: TransverseMode,
    swapped: TwoPhotonPolarization,
}

impl Interferometer {
    pub fn new(state: BiphotonState, splitter: BeamSplitter, geometry: DetectionGeometry) -> Result<Self> {
        let field = state.transferred_field(geometry.z_mm)?;
        let swapped = state.polarization().swapped();
        Ok(Self {
            state,
            splitter,
            geometry,
            field,
            swapped,
        })
    }

    pub fn state(&self) -> &BiphotonState {
        &self.state
    }

    pub fn splitter(&self) -> &BeamSplitter {
        &self.splitter
    }

    pub fn geometry(&self) -> &DetectionGeometry {
        &self.geometry
    }

    /// The pump field at the detection plane.
    pub fn field(&self) -> &TransverseMode {
        &self.field
    }

    /// `A(a, b)`: Fresnel phase in the separation times the field at the midpoint.
    fn pair_amplitude(&self, a: (f64, f64), b: (f64, f64)) -> Complex64 {
        let dx = a.0 - b.0;
        let dy = a.1 - b.1;
        let k = self.state.crystal().pump_wavevector;
        let phase = k * (dx * dx + dy * dy) / (8.0 * self.geometry.z_mm);
        Complex64::from_polar(1.0, phase) * self.field.eval(0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1))
    }

    /// Both photons transmitted: signal at `r1` (port 1), idler at `r2` (port 2).
    pub fn amplitude_tt(&self, r1: (f64, f64), r2: (f64, f64)) -> DetectionAmplitude {
        let t = self.splitter.t;
        DetectionAmplitude::scaled(self.state.polarization(), t * t * self.pair_amplitude(r1, r2))
    }

    /// Both photons reflected: idler at `r1`, signal at `r2`.
    pub fn amplitude_rr(&self, r1: (f64, f64), r2: (f64, f64)) -> DetectionAmplitude {
        let r = self.splitter.r;
        DetectionAmplitude::scaled(
            &self.swapped,
            -r * r * self.pair_amplitude(mirror(r2), mirror(r1)),
        )
    }

    /// The two pathways leading to both photons in `port`: the first has the
    /// signal at `r_a`, the second the idler at `r_a`.
    pub fn same_port_terms(
        &self,
        port: Port,
        r_a: (f64, f64),
        r_b: (f64, f64),
    ) -> (DetectionAmplitude, DetectionAmplitude) {
        let c = I * self.splitter.t * self.splitter.r;
        let pol = self.state.polarization();
        match port {
            Port::One => (
                DetectionAmplitude::scaled(pol, c * self.pair_amplitude(r_a, mirror(r_b))),
                DetectionAmplitude::scaled(&self.swapped, c * self.pair_amplitude(r_b, mirror(r_a))),
            ),
            Port::Two => (
                DetectionAmplitude::scaled(pol, c * self.pair_amplitude(mirror(r_a), r_b)),
                DetectionAmplitude::scaled(&self.swapped, c * self.pair_amplitude(mirror(r_b), r_a)),
            ),
        }
    }

    pub fn amplitude_same_port(&self, port: Port, r_a: (f64, f64), r_b: (f64, f64)) -> DetectionAmplitude {
        let (a, b) = self.same_port_terms(port, r_a, r_b);
        a + b
    }

    /// Cross-port coincidence probability with the tt/rr cross term scaled by
    /// `gamma` (1 for a balanced interferometer, 0 far outside the coherence
    /// length).
    pub fn coincidence_cross_partial(
        &self,
        r1: (f64, f64),
        r2: (f64, f64),
        analyzer_1: Analyzer,
        analyzer_2: Analyzer,
        gamma: f64,
    ) -> f64 {
        partially_coherent_probability(
            &self.amplitude_tt(r1, r2),
            &self.amplitude_rr(r1, r2),
            gamma,
            analyzer_1,
            analyzer_2,
        )
    }

    pub fn coincidence_cross(
        &self,
        r1: (f64, f64),
        r2: (f64, f64),
        analyzer_1: Analyzer,
        analyzer_2: Analyzer,
    ) -> f64 {
        (self.amplitude_tt(r1, r2) + self.amplitude_rr(r1, r2)).probability(analyzer_1, analyzer_2)
    }

    pub fn coincidence_same_port_partial(
        &self,
        port: Port,
        r_a: (f64, f64),
        r_b: (f64, f64),
        analyzer_a: Analyzer,
        analyzer_b: Analyzer,
        gamma: f64,
    ) -> f64 {
        let (a, b) = self.same_port_terms(port, r_a, r_b);
        partially_coherent_probability(&a, &b, gamma, analyzer_a, analyzer_b)
    }

    pub fn coincidence_same_port(
        &self,
        port: Port,
        r_a: (f64, f64),
        r_b: (f64, f64),
        analyzer_a: Analyzer,
        analyzer_b: Analyzer,
    ) -> f64 {
        self.amplitude_same_port(port, r_a, r_b).probability(analyzer_a, analyzer_b)
    }

    /// `∬ W*(u) W(Mu) d²u` for the unit-power pump; it does not change under
    /// propagation, so it is evaluated at the crystal plane.
    pub fn mirror_overlap(&self) -> f64 {
        mirror_overlap(self.state.pump(), PlaneQuadrature::default())
    }
}

pub fn amplitude_tt(
    state: &BiphotonState,
    bs: BeamSplitter,
    geom: DetectionGeometry,
    r1: (f64, f64),
    r2: (f64, f64),
) -> Result<DetectionAmplitude> {
    Ok(Interferometer::new(state.clone(), bs, geom)?.amplitude_tt(r1, r2))
}

pub fn amplitude_rr(
    state: &BiphotonState,
    bs: BeamSplitter,
    geom: DetectionGeometry,
    r1: (f64, f64),
    r2: (f64, f64),
) -> Result<DetectionAmplitude> {
    Ok(Interferometer::new(state.clone(), bs, geom)?.amplitude_rr(r1, r2))
}

pub fn amplitude_same_port(
    state: &BiphotonState,
    bs: BeamSplitter,
    geom: DetectionGeometry,
    port: Port,
    r_a: (f64, f64),
    r_b: (f64, f64),
) -> Result<DetectionAmplitude> {
    Ok(Interferometer::new(state.clone(), bs, geom)?.amplitude_same_port(port, r_a, r_b))
}

#[allow(clippy::too_many_arguments)]
pub fn coincidence_cross(
    state: &BiphotonState,
    bs: BeamSplitter,
    geom: DetectionGeometry,
    r1: (f64, f64),
    r2: (f64, f64),
    analyzer_1: Analyzer,
    analyzer_2: Analyzer,
) -> Result<f64> {
    Ok(Interferometer::new(state.clone(), bs, geom)?.coincidence_cross(r1, r2, analyzer_1, analyzer_2))
}

#[allow(clippy::too_many_arguments)]
pub fn coincidence_same_port(
    state: &BiphotonState,
    bs: BeamSplitter,
    geom: DetectionGeometry,
    port: Port,
    r_a: (f64, f64),
    r_b: (f64, f64),
    analyzer_a: Analyzer,
    analyzer_b: Analyzer,
) -> Result<f64> {
    Ok(Interferometer::new(state.clone(), bs, geom)?
        .coincidence_same_port(port, r_a, r_b, analyzer_a, analyzer_b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biphoton::{bell_state, BellState, ExchangeSymmetry};
    use crate::modes::BeamGeometry;
    use std::f64::consts::PI;

    fn geom() -> BeamGeometry {
        BeamGeometry::new(1.0, 351.0, 0.0).unwrap()
    }

    fn interferometer(pump: TransverseMode, pol: TwoPhotonPolarization) -> Interferometer {
        let state = BiphotonState::thin(pump, pol).unwrap();
        Interferometer::new(state, BeamSplitter::balanced(), DetectionGeometry::new(500.0).unwrap()).unwrap()
    }

    fn grid(n: i32) -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| -2.0 + 4.0 * f64::from(i) / f64::from(n - 1))
            .collect::<Vec<_>>()
            .iter()
            .flat_map(|&x| (0..n).map(move |j| (x, -1.7 + 3.1 * f64::from(j) / f64::from(n - 1))))
            .collect()
    }

    #[test]
    fn splitter_validation() {
        assert!(BeamSplitter::new(1.0).is_err());
        assert!(BeamSplitter::new(0.0).is_err());
        let bs = BeamSplitter::new(0.6).unwrap();
        assert!((bs.t().powi(2) + bs.r().powi(2) - 1.0).abs() < 1e-15);
        assert!(DetectionGeometry::new(0.0).is_err());
    }

    #[test]
    fn coincident_detectors_have_no_fresnel_phase() {
        let hom = interferometer(TransverseMode::gaussian(geom()), TwoPhotonPolarization::hh());
        let a = hom.amplitude_tt((0.0, 0.0), (0.0, 0.0));
        let w = hom.field().eval(0.0, 0.0);
        assert!((a.components[0] - 0.5 * w).norm() < 1e-15);
    }

    #[test]
    fn odd_pump_node() {
        let hom = interferometer(TransverseMode::hg(0, 1, geom()).unwrap(), TwoPhotonPolarization::hh());
        for x in [-1.0, 0.0, 0.4] {
            assert_eq!(hom.amplitude_tt((x, 0.8), (0.3, -0.8)).norm_sqr(), 0.0);
        }
    }

    #[test]
    fn parity_symmetry_dispatch() {
        let pols = [
            (TwoPhotonPolarization::hh(), ExchangeSymmetry::Symmetric),
            (bell_state(BellState::PsiMinus), ExchangeSymmetry::Antisymmetric),
        ];
        for (pump, even) in [
            (TransverseMode::hg(1, 0, geom()).unwrap(), true),
            (TransverseMode::hg(0, 1, geom()).unwrap(), false),
        ] {
            for (pol, sym) in &pols {
                let hom = interferometer(pump.clone(), *pol);
                let destructive = even == (*sym == ExchangeSymmetry::Symmetric);
                for &r1 in &grid(5) {
                    for &r2 in &grid(5) {
                        let tt = hom.amplitude_tt(r1, r2);
                        let rr = hom.amplitude_rr(r1, r2);
                        let residual = if destructive { tt + rr } else { tt + (-rr) };
                        assert!(residual.norm_sqr().sqrt() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn same_port_singlet_odd_pump_doubles_and_antibunches() {
        let hom = interferometer(TransverseMode::hg(0, 1, geom()).unwrap(), bell_state(BellState::PsiMinus));
        let ra = (0.3, 0.7);
        let rb = (-0.2, 0.1);
        let amp = hom.amplitude_same_port(Port::One, ra, rb);
        let (first, _) = hom.same_port_terms(Port::One, ra, rb);
        assert!(amp.max_abs_diff(&DetectionAmplitude { components: first.components.map(|c| 2.0 * c) }) < 1e-14);
        assert!(hom.coincidence_same_port(Port::One, ra, ra, None, None) < 1e-30);
        // Singlet with even pump never exits through one port.
        let even = interferometer(TransverseMode::hg(2, 0, geom()).unwrap(), bell_state(BellState::PsiMinus));
        for port in [Port::One, Port::Two] {
            assert!(even.amplitude_same_port(port, ra, rb).norm_sqr() < 1e-30);
        }
    }

    #[test]
    fn analyzer_projections() {
        let hom = interferometer(TransverseMode::hg(0, 1, geom()).unwrap(), bell_state(BellState::PsiPlus));
        // ψ⁺ has no (+, -) component.
        let p = hom.coincidence_same_port(Port::One, (0.2, 0.3), (0.1, -0.4), Some(PI / 4.0), Some(3.0 * PI / 4.0));
        assert!(p < 1e-30);
        let all = hom.coincidence_cross((0.2, 0.3), (0.1, -0.4), None, None);
        let split: f64 = [0.0, PI / 2.0]
            .iter()
            .flat_map(|&a| [0.0, PI / 2.0].map(move |b| (a, b)))
            .map(|(a, b)| hom.coincidence_cross((0.2, 0.3), (0.1, -0.4), Some(a), Some(b)))
            .sum();
        assert!((all - split).abs() < 1e-15 * all.max(1e-300));
    }

    #[test]
    fn asymmetric_splitter_reduces_visibility() {
        let state = BiphotonState::thin(TransverseMode::gaussian(geom()), TwoPhotonPolarization::hh()).unwrap();
        let hom = Interferometer::new(state, BeamSplitter::new(0.8).unwrap(), DetectionGeometry::new(300.0).unwrap()).unwrap();
        let r1 = (0.4, 0.2);
        let r2 = (-0.1, 0.5);
        let p = hom.coincidence_cross(r1, r2, None, None);
        let w = hom.field().eval(0.15, 0.35).norm_sqr();
        // Even pump, symmetric state: |t² - r²|² |W|².
        let expected = (0.64f64 - 0.36).powi(2) * w;
        assert!((p - expected).abs() < 1e-12 * expected);
    }
}
