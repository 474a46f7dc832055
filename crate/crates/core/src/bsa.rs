//! Bell-state analyzer: a balanced beam splitter followed by a polarizing
//! beam splitter on each output, four detectors `A_h, A_v, B_h, B_v`.
//!
//! Outcome probabilities come from the interferometer amplitudes of the
//! [`hom`](crate::hom) module, integrated over the detector planes. Only the
//! pump's mirror parity enters, so a representative HG pump of each parity
//! is used.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::biphoton::{bell_state, BellState, BiphotonState};
use crate::error::{Error, Result};
use crate::hom::{analyzed_rate, BeamSplitter, DetectionGeometry, Interferometer};
use crate::modes::{BeamGeometry, TransverseMode};

/// Generator used by [`run_monte_carlo`], for run metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.9), seed_from_u64, stream = block index";

/// Gates simulated per RNG stream.
const BLOCK_GATES: u64 = 4096;

/// Mirror parity of the pump about the beam-splitter plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PumpParity {
    Even,
    Odd,
}

impl PumpParity {
    pub fn name(&self) -> &'static str {
        match self {
            PumpParity::Even => "even",
            PumpParity::Odd => "odd",
        }
    }

    /// Lowest HG mode with this parity under `y → -y`.
    fn representative_pump(&self) -> Result<TransverseMode> {
        let geom = BeamGeometry::new(1.0, 351.0, 0.0)?;
        match self {
            PumpParity::Even => TransverseMode::hg(0, 0, geom),
            PumpParity::Odd => TransverseMode::hg(0, 1, geom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DetectorLabel {
    Ah,
    Av,
    Bh,
    Bv,
}

impl DetectorLabel {
    pub const ALL: [DetectorLabel; 4] = [
        DetectorLabel::Ah,
        DetectorLabel::Av,
        DetectorLabel::Bh,
        DetectorLabel::Bv,
    ];

    fn index(self) -> usize {
        self as usize
    }

    fn port_a(self) -> bool {
        matches!(self, DetectorLabel::Ah | DetectorLabel::Av)
    }

    /// Polarizer angle of the PBS output feeding this detector.
    fn analyzer(self) -> f64 {
        match self {
            DetectorLabel::Ah | DetectorLabel::Bh => 0.0,
            DetectorLabel::Av | DetectorLabel::Bv => std::f64::consts::FRAC_PI_2,
        }
    }
}

impl fmt::Display for DetectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DetectorLabel::Ah => "A_h",
            DetectorLabel::Av => "A_v",
            DetectorLabel::Bh => "B_h",
            DetectorLabel::Bv => "B_v",
        })
    }
}

/// Unordered detector pair; both labels equal for two photons at one detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature(DetectorLabel, DetectorLabel);

impl Signature {
    pub fn new(a: DetectorLabel, b: DetectorLabel) -> Self {
        if a <= b {
            Self(a, b)
        } else {
            Self(b, a)
        }
    }

    pub fn detectors(&self) -> (DetectorLabel, DetectorLabel) {
        (self.0, self.1)
    }

    /// All ten unordered pairs.
    pub fn all() -> Vec<Signature> {
        let mut out = Vec::with_capacity(10);
        for (i, &a) in DetectorLabel::ALL.iter().enumerate() {
            for &b in &DetectorLabel::ALL[i..] {
                out.push(Signature(a, b));
            }
        }
        out
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0, self.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BellClass {
    PsiMinus,
    PsiPlus,
    PhiPair,
}

impl BellClass {
    pub const ALL: [BellClass; 3] = [BellClass::PsiMinus, BellClass::PsiPlus, BellClass::PhiPair];

    pub fn of(state: BellState) -> Self {
        match state {
            BellState::PsiMinus => BellClass::PsiMinus,
            BellState::PsiPlus => BellClass::PsiPlus,
            BellState::PhiPlus | BellState::PhiMinus => BellClass::PhiPair,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BellClass::PsiMinus => "psi_minus",
            BellClass::PsiPlus => "psi_plus",
            BellClass::PhiPair => "phi_pair",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Class assignment of a coincidence signature. Signatures outside every
/// class of the given parity are `None` (ambiguous).
pub fn classify(signature: Signature, parity: PumpParity) -> Option<BellClass> {
    use DetectorLabel::*;
    let (a, b) = signature.detectors();
    let same_port_hv = matches!((a, b), (Ah, Av) | (Bh, Bv));
    let cross_hv = matches!((a, b), (Ah, Bv) | (Av, Bh));
    let cross_same_pol = matches!((a, b), (Ah, Bh) | (Av, Bv));
    let same_detector = a == b;
    match parity {
        PumpParity::Odd => {
            if same_port_hv {
                Some(BellClass::PsiMinus)
            } else if cross_hv {
                Some(BellClass::PsiPlus)
            } else if cross_same_pol {
                Some(BellClass::PhiPair)
            } else {
                None
            }
        }
        PumpParity::Even => {
            if cross_hv {
                Some(BellClass::PsiMinus)
            } else if same_port_hv {
                Some(BellClass::PsiPlus)
            } else if same_detector {
                Some(BellClass::PhiPair)
            } else {
                None
            }
        }
    }
}

/// Probability of each two-photon signature; all ten signatures are present.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    pub probabilities: BTreeMap<Signature, f64>,
}

impl OutcomeDistribution {
    pub fn get(&self, sig: Signature) -> f64 {
        self.probabilities.get(&sig).copied().unwrap_or(0.0)
    }

    /// Signatures with probability above `1e-12`.
    pub fn support(&self) -> Vec<Signature> {
        self.probabilities
            .iter()
            .filter(|(_, p)| **p > 1e-12)
            .map(|(s, _)| *s)
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.probabilities.values().sum()
    }

    /// Probability that the pair is not assigned `truth` (ambiguous
    /// signatures count as errors).
    pub fn classification_error(&self, parity: PumpParity, truth: BellClass) -> f64 {
        self.probabilities
            .iter()
            .filter(|(s, _)| classify(**s, parity) != Some(truth))
            .map(|(_, p)| p)
            .sum()
    }
}

/// Ideal distribution (perfect overlap at zero delay).
pub fn outcome_distribution(input: BellState, parity: PumpParity, bs: BeamSplitter) -> Result<OutcomeDistribution> {
    outcome_distribution_with_visibility(input, parity, bs, 1.0)
}

/// Distribution with interference visibility `v`: `v = 1` is the ideal
/// analyzer, `v = 0` the distribution of distinguishable photons.
pub fn outcome_distribution_with_visibility(
    input: BellState,
    parity: PumpParity,
    bs: BeamSplitter,
    visibility: f64,
) -> Result<OutcomeDistribution> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err(Error::invalid(format!("visibility must lie in [0, 1], got {visibility}")));
    }
    let state = BiphotonState::thin(parity.representative_pump()?, bell_state(input))?;
    let interf = Interferometer::new(state, bs, DetectionGeometry::new(500.0)?)?;
    let mut probabilities = BTreeMap::new();
    for sig in Signature::all() {
        let (a, b) = sig.detectors();
        let analyzers = (Some(a.analyzer()), Some(b.analyzer()));
        let p = if a.port_a() != b.port_a() {
            // Port A carries detector 1 of the cross-port amplitudes.
            let (first, second) = if a.port_a() { (a, b) } else { (b, a) };
            analyzed_rate(&interf, true, (Some(first.analyzer()), Some(second.analyzer())), visibility)
        } else if a == b {
            // Ordered pairs over the plane count each configuration twice.
            0.5 * analyzed_rate(&interf, false, analyzers, visibility)
        } else {
            analyzed_rate(&interf, false, analyzers, visibility)
        };
        probabilities.insert(sig, p);
    }
    let total: f64 = probabilities.values().sum();
    if !(total > 0.0) {
        return Err(Error::numerical("outcome_distribution", "zero total probability"));
    }
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::numerical(
            "outcome_distribution",
            format!("channel probabilities sum to {total}"),
        ));
    }
    for p in probabilities.values_mut() {
        *p /= total;
    }
    Ok(OutcomeDistribution { probabilities })
}

/// Per-detector efficiency and dark-count probability.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorModel {
    /// Indexed by `DetectorLabel` order `A_h, A_v, B_h, B_v`.
    pub efficiency: [f64; 4],
    pub dark_prob: [f64; 4],
    pub number_resolving: bool,
    pub seed: u64,
}

impl DetectorModel {
    pub fn uniform(efficiency: f64, dark_prob: f64, number_resolving: bool, seed: u64) -> Result<Self> {
        let model = Self {
            efficiency: [efficiency; 4],
            dark_prob: [dark_prob; 4],
            number_resolving,
            seed,
        };
        model.validate()?;
        Ok(model)
    }

    /// Unit efficiency, no dark counts, threshold detectors.
    pub fn ideal(seed: u64) -> Self {
        Self {
            efficiency: [1.0; 4],
            dark_prob: [0.0; 4],
            number_resolving: false,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for p in self.efficiency.iter().chain(&self.dark_prob) {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::invalid(format!("detector probabilities must lie in [0, 1], got {p}")));
            }
        }
        Ok(())
    }
}

/// Analyzer settings beyond the detectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzerSetup {
    pub splitter: BeamSplitter,
    pub visibility: f64,
}

impl Default for AnalyzerSetup {
    fn default() -> Self {
        Self {
            splitter: BeamSplitter::balanced(),
            visibility: 1.0,
        }
    }
}

/// What the detectors report in one gate. Gates with no click are not recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Record {
    Pair(Signature),
    Single(DetectorLabel),
    /// Three or more detection events.
    Multi,
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Record::Pair(s) => write!(f, "{s}"),
            Record::Single(d) => write!(f, "{d}"),
            Record::Multi => f.write_str("multi"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventTally {
    pub counts: BTreeMap<Record, u64>,
    pub total_gates: u64,
    /// Rows: true class; columns: assigned class. Ambiguous pairs and
    /// non-pair records are left out.
    pub misidentification: [[u64; 3]; 3],
    pub parity: PumpParity,
    pub true_class: BellClass,
}

impl EventTally {
    pub fn pairs(&self) -> u64 {
        self.counts
            .iter()
            .filter(|(r, _)| matches!(r, Record::Pair(_)))
            .map(|(_, c)| c)
            .sum()
    }

    pub fn count(&self, record: Record) -> u64 {
        self.counts.get(&record).copied().unwrap_or(0)
    }

    /// Off-diagonal entries of the misidentification matrix.
    pub fn misidentified(&self) -> u64 {
        let m = &self.misidentification;
        (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).filter(|(i, j)| i != j).map(|(i, j)| m[i][j]).sum()
    }

    /// Fraction of gates in which the true class was not assigned: lost
    /// gates, single clicks, ambiguous pairs and misidentified pairs all
    /// count. This is one minus the analyzer efficiency.
    pub fn error_rate(&self) -> f64 {
        let correct = self.misidentification[self.true_class.index()][self.true_class.index()];
        (self.total_gates - correct) as f64 / self.total_gates as f64
    }

    fn merge(&mut self, other: &EventTally) {
        for (r, c) in &other.counts {
            *self.counts.entry(*r).or_insert(0) += c;
        }
        self.total_gates += other.total_gates;
        for i in 0..3 {
            for j in 0..3 {
                self.misidentification[i][j] += other.misidentification[i][j];
            }
        }
    }

    /// CSV with columns `signature,count,assigned_class,true_class`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "signature,count,assigned_class,true_class")?;
        for (record, count) in &self.counts {
            let assigned = match record {
                Record::Pair(s) => classify(*s, self.parity).map_or("ambiguous", |c| c.name()),
                _ => "none",
            };
            writeln!(out, "{record},{count},{assigned},{}", self.true_class.name())?;
        }
        Ok(())
    }
}

pub fn run_monte_carlo(
    input: BellState,
    parity: PumpParity,
    model: &DetectorModel,
    gates: u64,
) -> Result<EventTally> {
    run_monte_carlo_with(input, parity, AnalyzerSetup::default(), model, gates)
}

/// Seeded gate simulation. Gates are split into fixed blocks, each drawn
/// from its own ChaCha8 stream, so the tally does not depend on thread count.
pub fn run_monte_carlo_with(
    input: BellState,
    parity: PumpParity,
    setup: AnalyzerSetup,
    model: &DetectorModel,
    gates: u64,
) -> Result<EventTally> {
    if gates == 0 {
        return Err(Error::invalid("at least one gate is required"));
    }
    model.validate()?;
    let dist = outcome_distribution_with_visibility(input, parity, setup.splitter, setup.visibility)?;
    let signatures: Vec<Signature> = dist.probabilities.keys().copied().collect();
    let sampler = WeightedIndex::new(dist.probabilities.values().copied())
        .map_err(|e| Error::numerical("run_monte_carlo", e.to_string()))?;
    let truth = BellClass::of(input);
    let empty = EventTally {
        counts: BTreeMap::new(),
        total_gates: 0,
        misidentification: [[0; 3]; 3],
        parity,
        true_class: truth,
    };
    let blocks = gates.div_ceil(BLOCK_GATES);
    let partials: Vec<EventTally> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
            rng.set_stream(block);
            let n = BLOCK_GATES.min(gates - block * BLOCK_GATES);
            let mut tally = empty.clone();
            for _ in 0..n {
                let sig = signatures[sampler.sample(&mut rng)];
                if let Some(record) = detect(sig, model, &mut rng) {
                    *tally.counts.entry(record).or_insert(0) += 1;
                    if let Record::Pair(s) = record {
                        if let Some(assigned) = classify(s, parity) {
                            tally.misidentification[truth.index()][assigned.index()] += 1;
                        }
                    }
                }
            }
            tally.total_gates = n;
            tally
        })
        .collect();
    let mut tally = empty;
    for p in &partials {
        tally.merge(p);
    }
    Ok(tally)
}

/// Applies efficiency, dark counts and the detector response to one photon pair.
fn detect<R: Rng>(sig: Signature, model: &DetectorModel, rng: &mut R) -> Option<Record> {
    let mut counts = [0u32; 4];
    let (a, b) = sig.detectors();
    for d in [a, b] {
        if rng.random_bool(model.efficiency[d.index()]) {
            counts[d.index()] += 1;
        }
    }
    for (i, c) in counts.iter_mut().enumerate() {
        if rng.random_bool(model.dark_prob[i]) {
            *c += 1;
        }
    }
    if !model.number_resolving {
        for c in counts.iter_mut() {
            *c = (*c).min(1);
        }
    }
    let total: u32 = counts.iter().sum();
    let fired: Vec<DetectorLabel> = DetectorLabel::ALL
        .iter()
        .copied()
        .filter(|d| counts[d.index()] > 0)
        .collect();
    match total {
        0 => None,
        1 => Some(Record::Single(fired[0])),
        2 if fired.len() == 1 => Some(Record::Pair(Signature::new(fired[0], fired[0]))),
        2 => Some(Record::Pair(Signature::new(fired[0], fired[1]))),
        _ => Some(Record::Multi),
    }
}
