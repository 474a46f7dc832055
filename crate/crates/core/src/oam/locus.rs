//! Zero locus of the LG-pumped biphoton and the test against classically
//! correlated OAM states.
//!
//! For a pump with a vortex at `u₀`, the direct amplitude vanishes whenever
//! the midpoint of the two detectors sits on `u₀`. Moving the detectors by
//! `+Δ` and `-Δ` keeps the midpoint fixed, so the zero persists. A mixture
//! `Σ P_j |F_j(ρ_s)|² |G_j(ρ_i)|²` of product states can only vanish on all
//! those displaced points if some profile vanishes identically.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector};

use super::{lg_indices, nnls};
use crate::biphoton::direct_amplitude;
use crate::error::{Error, Result};
use crate::hom::DetectionGeometry;
use crate::modes::{BeamGeometry, TransverseMode};

type Point = (f64, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroLocusReport {
    /// Largest `|Ψ|²` on the displaced locus, relative to the map peak.
    pub max_violation: f64,
    /// The same on the undisplaced locus.
    pub undisplaced_max: f64,
    /// Located phase singularity of the transferred pump, in mm.
    pub null_position: Point,
    /// Undisplaced `(ρ_s0, ρ_i0)` pairs.
    pub locus_points: Vec<(Point, Point)>,
    pub peak: f64,
}

/// Minimizes `|W|²` on successively finer grids around the beam center.
fn locate_null(field: &TransverseMode) -> Point {
    let w = field.width();
    let mut best = (0.0, 0.0);
    let mut best_val = f64::INFINITY;
    let mut half = 0.5 * w;
    let mut n = 20;
    for _ in 0..40 {
        let center = best;
        for i in 0..=n {
            for j in 0..=n {
                let x = center.0 - half + 2.0 * half * f64::from(i) / f64::from(n);
                let y = center.1 - half + 2.0 * half * f64::from(j) / f64::from(n);
                let v = field.eval(x, y).norm_sqr();
                if v < best_val {
                    best_val = v;
                    best = (x, y);
                }
            }
        }
        half *= 0.3;
        n = 6;
    }
    best
}

/// Ring of offsets around the null used to build locus points.
fn locus_offsets(width: f64) -> Vec<Point> {
    let mut out = Vec::new();
    for r in [0.25, 0.5, 1.0, 1.5] {
        for k in 0..8 {
            let a = 2.0 * PI * f64::from(k) / 8.0 + 0.1;
            out.push((r * width * a.cos(), r * width * a.sin()));
        }
    }
    out
}

fn field_peak(field: &TransverseMode) -> f64 {
    let w = field.width();
    let n = 80;
    let mut peak: f64 = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            let x = -2.0 * w + 4.0 * w * f64::from(i) / f64::from(n);
            let y = -2.0 * w + 4.0 * w * f64::from(j) / f64::from(n);
            peak = peak.max(field.eval(x, y).norm_sqr());
        }
    }
    peak
}

struct Locus {
    field: TransverseMode,
    null: Point,
    points: Vec<(Point, Point)>,
    peak: f64,
}

fn build_locus(pump: &TransverseMode, geom: DetectionGeometry) -> Result<Locus> {
    let (_, l) = lg_indices(pump)?;
    if l == 0 {
        return Err(Error::invalid("zero locus needs a pump with l ≠ 0"));
    }
    let field = pump.propagated(geom.z_mm);
    let null = locate_null(&field);
    let points = locus_offsets(field.width())
        .into_iter()
        .map(|(dx, dy)| ((null.0 + dx, null.1 + dy), (null.0 - dx, null.1 - dy)))
        .collect();
    let peak = field_peak(&field);
    Ok(Locus {
        field,
        null,
        points,
        peak,
    })
}

fn displaced(points: &[(Point, Point)], delta: Point) -> impl Iterator<Item = (Point, Point)> + '_ {
    points
        .iter()
        .map(move |&(s, i)| ((s.0 + delta.0, s.1 + delta.1), (i.0 - delta.0, i.1 - delta.1)))
}

pub fn zero_locus_shift_test(
    pump: &TransverseMode,
    geom: DetectionGeometry,
    delta: Point,
) -> Result<ZeroLocusReport> {
    let locus = build_locus(pump, geom)?;
    let prob = |(s, i): (Point, Point)| direct_amplitude(&locus.field, s, i).norm_sqr() / locus.peak;
    let undisplaced_max = locus.points.iter().map(|&p| prob(p)).fold(0.0, f64::max);
    let max_violation = displaced(&locus.points, delta).map(prob).fold(0.0, f64::max);
    Ok(ZeroLocusReport {
        max_violation,
        undisplaced_max,
        null_position: locus.null,
        locus_points: locus.points,
        peak: locus.peak,
    })
}

/// Transverse profile of one photon in a classical mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileSpec {
    Lg { p: u32, l: i32 },
    /// Identically zero field.
    Zero,
}

impl ProfileSpec {
    fn label(&self) -> String {
        match self {
            ProfileSpec::Lg { p, l } => format!("LG(p={p},l={l})"),
            ProfileSpec::Zero => "0".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightMode {
    /// Weights chosen by nonnegative least squares against the quantum map.
    Fitted,
    /// Given mixture weights; only an overall scale is fitted.
    Fixed(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateFamily {
    /// `(F_j, G_j)` signal and idler profiles.
    pub pairs: Vec<(ProfileSpec, ProfileSpec)>,
    pub weights: WeightMode,
}

/// Separable pairs `LG(0, l_s) ⊗ LG(0, l - l_s)` with both `|l_s|`, `|l_i| ≤ l_max`.
pub fn default_candidate_family(l: i32, l_max: u32) -> CandidateFamily {
    let lm = l_max as i32;
    let pairs = (-lm..=lm)
        .filter(|ls| (l - ls).abs() <= lm)
        .map(|ls| (ProfileSpec::Lg { p: 0, l: ls }, ProfileSpec::Lg { p: 0, l: l - ls }))
        .collect();
    CandidateFamily {
        pairs,
        weights: WeightMode::Fitted,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FalsifierOptions {
    /// Exclusion threshold relative to the quantum map peak.
    pub threshold: f64,
    /// Fit samples per axis for each detector.
    pub samples_per_axis: usize,
    /// Half-width of the fit grid in units of the profile beam radius.
    pub extent: f64,
    /// Opposing displacements applied to the locus, in mm.
    pub deltas: Vec<Point>,
    /// Profile waist in units of the pump waist.
    pub profile_waist_factor: f64,
}

impl Default for FalsifierOptions {
    fn default() -> Self {
        Self {
            threshold: 1e-4,
            samples_per_axis: 7,
            extent: 1.5,
            deltas: vec![(0.0, 0.0), (1.0, 1.0), (-0.5, 0.75), (0.3, -1.2)],
            profile_waist_factor: SQRT_2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Excluded,
    NotExcluded { degenerate: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FalsifierReport {
    /// Largest fitted classical probability on the displaced loci, relative
    /// to the quantum map peak.
    pub min_residual_on_locus: f64,
    pub verdict: Verdict,
    /// Mixture weights, normalized to sum to one (all zero if nothing fitted).
    pub weights: Vec<f64>,
    /// Human-readable list of the tested profile pairs.
    pub family: Vec<String>,
    pub quantum_peak: f64,
    /// RMS misfit of the classical model over the fit samples, relative to peak.
    pub fit_rms: f64,
}

pub fn classical_model_falsifier(
    pump: &TransverseMode,
    candidate: &CandidateFamily,
    geom: DetectionGeometry,
    opts: &FalsifierOptions,
) -> Result<FalsifierReport> {
    if candidate.pairs.is_empty() {
        return Err(Error::invalid("candidate family is empty"));
    }
    if let WeightMode::Fixed(w) = &candidate.weights {
        if w.len() != candidate.pairs.len() {
            return Err(Error::invalid(format!(
                "{} weights for {} profile pairs",
                w.len(),
                candidate.pairs.len()
            )));
        }
        let total: f64 = w.iter().sum();
        if w.iter().any(|x| !(*x >= 0.0)) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("fixed weights must be nonnegative and sum to one"));
        }
    }
    if opts.samples_per_axis < 2 {
        return Err(Error::invalid("falsifier needs at least two samples per axis"));
    }
    let locus = build_locus(pump, geom)?;

    // Down-converted photons at twice the pump wavelength; with the waist
    // scaled by √2 their Rayleigh range equals the pump's.
    let g = pump.geometry();
    let profile_geom = BeamGeometry::new(
        opts.profile_waist_factor * g.waist_mm,
        2.0 * g.wavelength_nm,
        g.z_mm + geom.z_mm,
    )?;
    let build = |spec: &ProfileSpec| -> Result<Option<TransverseMode>> {
        match spec {
            ProfileSpec::Lg { p, l } => TransverseMode::lg(*p, *l, profile_geom).map(Some),
            ProfileSpec::Zero => Ok(None),
        }
    };
    let profiles = candidate
        .pairs
        .iter()
        .map(|(f, g)| Ok((build(f)?, build(g)?)))
        .collect::<Result<Vec<_>>>()?;
    let intensity = |m: &Option<TransverseMode>, p: Point| -> f64 {
        m.as_ref().map_or(0.0, |m| m.eval(p.0, p.1).norm_sqr())
    };
    let term = |j: usize, s: Point, i: Point| -> f64 {
        let (f, g) = &profiles[j];
        intensity(f, s) * intensity(g, i)
    };

    let half = opts.extent * profile_geom.width();
    let n = opts.samples_per_axis;
    let axis: Vec<f64> = (0..n)
        .map(|k| -half + 2.0 * half * k as f64 / (n - 1) as f64)
        .collect();
    let points: Vec<Point> = axis
        .iter()
        .flat_map(|&y| axis.iter().map(move |&x| (x, y)))
        .collect();
    let samples: Vec<(Point, Point)> = points
        .iter()
        .flat_map(|&s| points.iter().map(move |&i| (s, i)))
        .collect();
    let quantum: Vec<f64> = samples
        .iter()
        .map(|&(s, i)| direct_amplitude(&locus.field, s, i).norm_sqr())
        .collect();
    let quantum_peak = quantum.iter().copied().fold(locus.peak, f64::max);

    let m = samples.len();
    let b = DVector::from_vec(quantum.iter().map(|q| q / quantum_peak).collect());
    // Columns of the design matrix and the mixture coefficients they carry.
    let (design, coeffs): (DMatrix<f64>, Vec<f64>) = match &candidate.weights {
        WeightMode::Fitted => {
            let jn = profiles.len();
            let a = DMatrix::from_fn(m, jn, |r, c| {
                let (s, i) = samples[r];
                term(c, s, i)
            });
            let x = nnls(&a, &b)?;
            (a, x.iter().copied().collect())
        }
        WeightMode::Fixed(w) => {
            let col = DMatrix::from_fn(m, 1, |r, _| {
                let (s, i) = samples[r];
                w.iter().enumerate().map(|(j, wj)| wj * term(j, s, i)).sum()
            });
            let scale = nnls(&col, &b)?[0];
            (col, w.iter().map(|wj| wj * scale).collect())
        }
    };
    let fitted = match &candidate.weights {
        WeightMode::Fitted => &design * DVector::from_vec(coeffs.clone()),
        WeightMode::Fixed(_) => {
            let total: f64 = coeffs.iter().sum();
            &design * DVector::from_element(1, total)
        }
    };
    let fit_rms = ((&fitted - &b).norm_squared() / m as f64).sqrt();

    let classical = |s: Point, i: Point| -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * term(j, s, i))
            .sum::<f64>()
    };
    let residual = opts
        .deltas
        .iter()
        .flat_map(|&d| displaced(&locus.points, d).collect::<Vec<_>>())
        .map(|(s, i)| classical(s, i))
        .fold(0.0, f64::max);

    let total: f64 = coeffs.iter().sum();
    let degenerate = total <= 0.0
        || candidate
            .pairs
            .iter()
            .zip(&coeffs)
            .any(|((f, g), c)| *c > 0.0 && (*f == ProfileSpec::Zero || *g == ProfileSpec::Zero));
    let verdict = if residual > opts.threshold {
        Verdict::Excluded
    } else {
        Verdict::NotExcluded { degenerate }
    };
    let weights = if total > 0.0 {
        coeffs.iter().map(|c| c / total).collect()
    } else {
        vec![0.0; coeffs.len()]
    };
    Ok(FalsifierReport {
        min_residual_on_locus: residual,
        verdict,
        weights,
        family: candidate
            .pairs
            .iter()
            .map(|(f, g)| format!("{} x {}", f.label(), g.label()))
            .collect(),
        quantum_peak,
        fit_rms,
    })
}
