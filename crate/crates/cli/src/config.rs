//! JSON run configuration. Every physical quantity carries its unit in the
//! key name; unknown keys are rejected.

use std::f64::consts::FRAC_1_PI;
use std::fmt;
use std::path::Path;

use clap::ValueEnum;
use multimode_hom::biphoton::{bell_state, BellState, BiphotonState, CrystalConfig, TwoPhotonPolarization};
use multimode_hom::bsa::{DetectorModel, PumpParity};
use multimode_hom::hom::{BeamSplitter, CoherenceModel, DelayScan, DetectionGeometry, Port, ScanGrid};
use multimode_hom::modes::{BeamGeometry, TransverseMode};
use multimode_hom::oam::Truncation;
use multimode_hom::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Experiment {
    Dip,
    Map,
    SamePort,
    OamDecompose,
    ZeroLocus,
    Falsifier,
    Bsa,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
        f.write_str(&name)
    }
}

fn default_pump_wavelength() -> f64 {
    351.0
}

fn beam(waist_mm: f64, wavelength_nm: f64, z_mm: f64) -> Result<BeamGeometry, CliError> {
    Ok(BeamGeometry::new(waist_mm, wavelength_nm, z_mm)?)
}

/// Pump mode. `z_mm` is the crystal position relative to the pump waist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PumpSpec {
    Hg {
        m: u32,
        n: u32,
        waist_mm: f64,
        #[serde(default = "default_pump_wavelength")]
        wavelength_nm: f64,
        #[serde(default)]
        z_mm: f64,
    },
    Lg {
        p: u32,
        l: i32,
        waist_mm: f64,
        #[serde(default = "default_pump_wavelength")]
        wavelength_nm: f64,
        #[serde(default)]
        z_mm: f64,
    },
    Superposition {
        terms: Vec<SuperpositionTerm>,
    },
    PhaseStep {
        step_position_mm: f64,
        phase_rad: f64,
        waist_mm: f64,
        #[serde(default = "default_pump_wavelength")]
        wavelength_nm: f64,
        #[serde(default)]
        z_mm: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuperpositionTerm {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
    pub mode: PumpSpec,
}

impl Default for PumpSpec {
    fn default() -> Self {
        PumpSpec::Hg {
            m: 0,
            n: 0,
            waist_mm: 1.0,
            wavelength_nm: default_pump_wavelength(),
            z_mm: 0.0,
        }
    }
}

impl PumpSpec {
    pub fn build(&self) -> Result<TransverseMode, CliError> {
        Ok(match *self {
            PumpSpec::Hg {
                m,
                n,
                waist_mm,
                wavelength_nm,
                z_mm,
            } => TransverseMode::hg(m, n, beam(waist_mm, wavelength_nm, z_mm)?)?,
            PumpSpec::Lg {
                p,
                l,
                waist_mm,
                wavelength_nm,
                z_mm,
            } => TransverseMode::lg(p, l, beam(waist_mm, wavelength_nm, z_mm)?)?,
            PumpSpec::Superposition { ref terms } => TransverseMode::superposition(
                terms
                    .iter()
                    .map(|t| Ok((Complex64::new(t.re, t.im), t.mode.build()?)))
                    .collect::<Result<Vec<_>, CliError>>()?,
            )?,
            PumpSpec::PhaseStep {
                step_position_mm,
                phase_rad,
                waist_mm,
                wavelength_nm,
                z_mm,
            } => TransverseMode::phase_step(step_position_mm, phase_rad, beam(waist_mm, wavelength_nm, z_mm)?)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellName {
    PsiMinus,
    PsiPlus,
    PhiPlus,
    PhiMinus,
}

impl From<BellName> for BellState {
    fn from(b: BellName) -> Self {
        match b {
            BellName::PsiMinus => BellState::PsiMinus,
            BellName::PsiPlus => BellState::PsiPlus,
            BellName::PhiPlus => BellState::PhiPlus,
            BellName::PhiMinus => BellState::PhiMinus,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PolarizationSpec {
    Bell(BellName),
    /// Both photons horizontal.
    #[default]
    Hh,
    /// `[hh, hv, vh, vv]` as `[re, im]` pairs; normalized on load.
    Coefficients([[f64; 2]; 4]),
}

impl PolarizationSpec {
    pub fn build(&self) -> Result<TwoPhotonPolarization, CliError> {
        Ok(match self {
            PolarizationSpec::Bell(b) => bell_state((*b).into()),
            PolarizationSpec::Hh => TwoPhotonPolarization::hh(),
            PolarizationSpec::Coefficients(c) => {
                TwoPhotonPolarization::normalized(c.map(|[re, im]| Complex64::new(re, im)))?
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interference {
    /// Zero path difference.
    Balanced,
    /// Path difference far beyond the coherence length.
    Unbalanced,
    /// No beam splitter: signal and idler go straight to the detectors.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSpec {
    pub half_width_mm: f64,
    pub points: usize,
    pub fixed_x_mm: f64,
    pub fixed_y_mm: f64,
    /// Detector aperture diameter; 0 for point detectors.
    pub aperture_diameter_mm: f64,
}

impl Default for ScanSpec {
    fn default() -> Self {
        Self {
            half_width_mm: 3.0,
            points: 41,
            fixed_x_mm: 0.0,
            fixed_y_mm: 0.0,
            aperture_diameter_mm: 0.0,
        }
    }
}

impl ScanSpec {
    pub fn grid(&self) -> Result<ScanGrid, CliError> {
        Ok(ScanGrid::square(self.half_width_mm, self.points)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DelaySpec {
    pub start_um: f64,
    pub stop_um: f64,
    pub points: usize,
}

impl Default for DelaySpec {
    fn default() -> Self {
        let d = DelayScan::default();
        Self {
            start_um: d.start_um,
            stop_um: d.stop_um,
            points: d.points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoherenceSpec {
    pub center_wavelength_nm: f64,
    pub filter_fwhm_nm: f64,
    pub shape: f64,
}

impl Default for CoherenceSpec {
    fn default() -> Self {
        Self {
            center_wavelength_nm: 702.0,
            filter_fwhm_nm: 1.0,
            shape: FRAC_1_PI,
        }
    }
}

/// Polarizer angles in front of the two detectors; `null` for none.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzerSpec {
    pub first_rad: Option<f64>,
    pub second_rad: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PortName {
    #[default]
    One,
    Two,
}

impl From<PortName> for Port {
    fn from(p: PortName) -> Self {
        match p {
            PortName::One => Port::One,
            PortName::Two => Port::Two,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OamSpec {
    pub l_max: u32,
    pub p_max: u32,
}

impl Default for OamSpec {
    fn default() -> Self {
        Self { l_max: 3, p_max: 2 }
    }
}

impl OamSpec {
    pub fn truncation(&self) -> Truncation {
        Truncation {
            l_max: self.l_max,
            p_max: self.p_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocusSpec {
    pub delta_x_mm: f64,
    pub delta_y_mm: f64,
    /// Largest `|l_s|`, `|l_i|` of the default separable candidate family.
    pub candidate_l_max: u32,
    pub threshold: f64,
}

impl Default for LocusSpec {
    fn default() -> Self {
        Self {
            delta_x_mm: 1.0,
            delta_y_mm: 1.0,
            candidate_l_max: 3,
            threshold: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityName {
    Even,
    Odd,
}

impl From<ParityName> for PumpParity {
    fn from(p: ParityName) -> Self {
        match p {
            ParityName::Even => PumpParity::Even,
            ParityName::Odd => PumpParity::Odd,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BsaSpec {
    pub state: BellName,
    pub parity: ParityName,
    pub gates: u64,
    pub visibility: f64,
}

impl Default for BsaSpec {
    fn default() -> Self {
        Self {
            state: BellName::PsiMinus,
            parity: ParityName::Odd,
            gates: 100_000,
            visibility: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorSpec {
    pub efficiency: f64,
    pub dark_prob: f64,
    pub number_resolving: bool,
}

impl Default for DetectorSpec {
    fn default() -> Self {
        Self {
            efficiency: 1.0,
            dark_prob: 0.0,
            number_resolving: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Must match the subcommand when present.
    pub experiment: Option<Experiment>,
    pub pump: PumpSpec,
    pub polarization: PolarizationSpec,
    /// Crystal to detector plane distance.
    pub detector_distance_mm: f64,
    /// `None` selects a thin crystal at half the thin-crystal limit.
    pub crystal_length_mm: Option<f64>,
    pub beam_splitter_transmission: f64,
    pub interference: Interference,
    pub analyzers: AnalyzerSpec,
    pub port: PortName,
    pub scan: ScanSpec,
    pub delay: DelaySpec,
    pub coherence: CoherenceSpec,
    pub oam: OamSpec,
    pub locus: LocusSpec,
    pub bsa: BsaSpec,
    pub detector: DetectorSpec,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            pump: PumpSpec::default(),
            polarization: PolarizationSpec::default(),
            detector_distance_mm: 500.0,
            crystal_length_mm: None,
            beam_splitter_transmission: std::f64::consts::FRAC_1_SQRT_2,
            interference: Interference::Balanced,
            analyzers: AnalyzerSpec::default(),
            port: PortName::default(),
            scan: ScanSpec::default(),
            delay: DelaySpec::default(),
            coherence: CoherenceSpec::default(),
            oam: OamSpec::default(),
            locus: LocusSpec::default(),
            bsa: BsaSpec::default(),
            detector: DetectorSpec::default(),
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid configuration: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Builds every model object the experiment needs, so invalid values
    /// surface before any computation.
    pub fn validate(&self, experiment: Experiment) -> Result<(), CliError> {
        if let Some(e) = self.experiment {
            if e != experiment {
                return Err(CliError::Config(format!(
                    "configuration is for experiment '{e}' but '{experiment}' was requested"
                )));
            }
        }
        self.pump.build()?;
        self.polarization.build()?;
        self.splitter()?;
        self.detection()?;
        self.scan.grid()?;
        self.coherence()?;
        self.detector_model()?;
        if self.delay.points == 0 {
            return Err(CliError::Config("delay.points must be at least 1".into()));
        }
        if self.bsa.gates == 0 {
            return Err(CliError::Config("bsa.gates must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.bsa.visibility) {
            return Err(CliError::Config(format!(
                "bsa.visibility must lie in [0, 1], got {}",
                self.bsa.visibility
            )));
        }
        if self.scan.aperture_diameter_mm.is_nan() || self.scan.aperture_diameter_mm < 0.0 {
            return Err(CliError::Config("scan.aperture_diameter_mm must be ≥ 0".into()));
        }
        if matches!(experiment, Experiment::Dip | Experiment::Map | Experiment::SamePort) {
            self.state()?;
        }
        Ok(())
    }

    pub fn splitter(&self) -> Result<BeamSplitter, CliError> {
        Ok(BeamSplitter::new(self.beam_splitter_transmission)?)
    }

    pub fn detection(&self) -> Result<DetectionGeometry, CliError> {
        Ok(DetectionGeometry::new(self.detector_distance_mm)?)
    }

    pub fn coherence(&self) -> Result<CoherenceModel, CliError> {
        let c = &self.coherence;
        Ok(CoherenceModel::new(c.center_wavelength_nm, c.filter_fwhm_nm, c.shape)?)
    }

    pub fn delay_scan(&self) -> DelayScan {
        DelayScan {
            start_um: self.delay.start_um,
            stop_um: self.delay.stop_um,
            points: self.delay.points,
        }
    }

    pub fn detector_model(&self) -> Result<DetectorModel, CliError> {
        let d = &self.detector;
        Ok(DetectorModel::uniform(d.efficiency, d.dark_prob, d.number_resolving, self.seed)?)
    }

    pub fn state(&self) -> Result<BiphotonState, CliError> {
        let pump = self.pump.build()?;
        let pol = self.polarization.build()?;
        Ok(match self.crystal_length_mm {
            None => BiphotonState::thin(pump, pol)?,
            Some(length) => {
                let crystal = CrystalConfig::for_pump(length, &pump, true)?;
                BiphotonState::new(pump, pol, crystal)?
            }
        })
    }
}
