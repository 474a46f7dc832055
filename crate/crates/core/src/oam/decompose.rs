//! Expansion of the biphoton in products of signal and idler LG modes.
//!
//! For a thin crystal, `Ψ(ρ_s, ρ_i) = W((ρ_s + ρ_i)/2)` and the overlap with
//! `U_s(ρ_s) U_i(ρ_i)` becomes, in the Fourier domain,
//!
//! ```text
//! C = 8π ∫ q dq V(2q) V_s*(q) V_i*(q) · ∫₀^{2π} exp(i(l_s + l_i - l)φ) dφ
//! ```
//!
//! with `V` the radial spectra. The angular factor is evaluated by the
//! trapezoid rule, which is exact for these trigonometric polynomials, so the
//! selection rule comes out of the computation instead of being imposed.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;

use super::lg_indices;
use crate::error::{Error, Result};
use crate::modes::{lg_fourier, GaussLegendreRule, TransverseMode};

/// Largest accepted truncation.
pub const MAX_TRUNCATION: Truncation = Truncation { l_max: 6, p_max: 4 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    pub l_max: u32,
    pub p_max: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionOptions {
    /// Basis waist in units of the pump waist.
    pub basis_waist_factor: f64,
    /// Radial cutoff in units of `1/w_basis`.
    pub q_max_factor: f64,
    pub radial_nodes: usize,
    /// Trapezoid points for the azimuthal integral.
    pub angular_samples: usize,
    /// Largest accepted relative change when the radial nodes are doubled.
    pub doubling_tolerance: f64,
}

impl Default for DecompositionOptions {
    fn default() -> Self {
        Self {
            basis_waist_factor: SQRT_2,
            q_max_factor: 10.0,
            radial_nodes: 256,
            angular_samples: 64,
            doubling_tolerance: 1e-6,
        }
    }
}

/// Index of an expansion coefficient: `(l_s, p_s, l_i, p_i)`.
pub type ModePair = (i32, u32, i32, u32);

#[derive(Debug, Clone, PartialEq)]
pub struct OamSpectrum {
    /// Normalized coefficients for every index pair within the truncation.
    pub entries: BTreeMap<ModePair, Complex64>,
    pub truncation: Truncation,
    /// Pump `(l, p)`.
    pub pump_indices: (i32, u32),
    pub basis_waist_mm: f64,
    /// `1 - Σ|C|²` over the truncated set.
    pub deficit: f64,
    /// Raw overlaps are `C · raw_scale`.
    pub raw_scale: f64,
    /// Largest relative change of a retained coefficient under node doubling.
    pub doubling_change: f64,
}

impl OamSpectrum {
    pub fn get(&self, l_s: i32, p_s: u32, l_i: i32, p_i: u32) -> Complex64 {
        self.entries
            .get(&(l_s, p_s, l_i, p_i))
            .copied()
            .unwrap_or_default()
    }

    /// Unnormalized overlap `⟨U_s U_i | Ψ⟩`.
    pub fn raw(&self, l_s: i32, p_s: u32, l_i: i32, p_i: u32) -> Complex64 {
        self.get(l_s, p_s, l_i, p_i) * self.raw_scale
    }

    pub fn power(&self) -> f64 {
        self.entries.values().map(|c| c.norm_sqr()).sum()
    }

    /// Largest magnitude among entries violating `l_s + l_i = l`.
    pub fn max_off_rule(&self) -> f64 {
        let l = self.pump_indices.0;
        self.entries
            .iter()
            .filter(|((ls, _, li, _), _)| ls + li != l)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }
}

pub fn oam_decompose(pump: &TransverseMode, truncation: Truncation) -> Result<OamSpectrum> {
    oam_decompose_with(pump, truncation, DecompositionOptions::default())
}

fn index_set(t: Truncation) -> Vec<(i32, u32)> {
    let l = t.l_max as i32;
    (-l..=l)
        .flat_map(|ls| (0..=t.p_max).map(move |p| (ls, p)))
        .collect()
}

/// Radial integrals `∫ q V(2q) V_s* V_i* dq` for every basis pair.
struct RadialTables {
    pump: Vec<Complex64>,
    basis: HashMap<(u32, u32), Vec<Complex64>>,
    weights: Vec<f64>,
}

impl RadialTables {
    fn build(
        pump: &TransverseMode,
        (p, l): (u32, i32),
        basis_waist: f64,
        reference: Truncation,
        q_max: f64,
        nodes: usize,
    ) -> Result<Self> {
        let rule = GaussLegendreRule::new(nodes);
        let (qs, weights): (Vec<f64>, Vec<f64>) = rule.on_interval(0.0, q_max).unzip();
        let g = pump.geometry();
        let k = g.wavenumber();
        let pump_table = qs
            .iter()
            .map(|&q| {
                let big_q = 2.0 * q;
                // Spectrum at the crystal plane, which may sit away from the waist.
                let phase = Complex64::from_polar(1.0, -big_q * big_q * g.z_mm / (2.0 * k));
                lg_fourier(p, l, g.waist_mm, big_q).map(|v| v * phase)
            })
            .collect::<Result<Vec<_>>>()?;
        let keys: Vec<(u32, u32)> = (0..=reference.p_max)
            .flat_map(|ps| (0..=reference.l_max).map(move |al| (ps, al)))
            .collect();
        let basis = keys
            .par_iter()
            .map(|&(ps, al)| {
                let values = qs
                    .iter()
                    .map(|&q| lg_fourier(ps, al as i32, basis_waist, q))
                    .collect::<Result<Vec<_>>>()?;
                Ok(((ps, al), values))
            })
            .collect::<Result<HashMap<_, _>>>()?;
        Ok(Self {
            pump: pump_table,
            basis,
            weights: qs.iter().zip(&weights).map(|(q, w)| q * w).collect(),
        })
    }

    fn integral(&self, (ls, ps): (i32, u32), (li, pi): (i32, u32)) -> Complex64 {
        let vs = &self.basis[&(ps, ls.unsigned_abs())];
        let vi = &self.basis[&(pi, li.unsigned_abs())];
        (0..self.weights.len())
            .map(|k| self.pump[k] * vs[k].conj() * vi[k].conj() * self.weights[k])
            .sum()
    }
}

/// Trapezoid value of `∫₀^{2π} exp(i m φ) dφ`.
fn angular_factor(m: i32, samples: usize) -> Complex64 {
    let step = 2.0 * PI / samples as f64;
    (0..samples)
        .map(|k| Complex64::from_polar(step, f64::from(m) * step * k as f64))
        .sum()
}

fn raw_coefficients(
    tables: &RadialTables,
    l: i32,
    reference: Truncation,
    angular_samples: usize,
) -> BTreeMap<ModePair, Complex64> {
    let idx = index_set(reference);
    let mut out = BTreeMap::new();
    for &(ls, ps) in &idx {
        for &(li, pi) in &idx {
            let ang = angular_factor(ls + li - l, angular_samples);
            let c = 8.0 * PI * ang * tables.integral((ls, ps), (li, pi));
            out.insert((ls, ps, li, pi), c);
        }
    }
    out
}

pub fn oam_decompose_with(
    pump: &TransverseMode,
    truncation: Truncation,
    opts: DecompositionOptions,
) -> Result<OamSpectrum> {
    let (p, l) = lg_indices(pump)?;
    if truncation.l_max > MAX_TRUNCATION.l_max || truncation.p_max > MAX_TRUNCATION.p_max {
        return Err(Error::domain(format!(
            "truncation ({}, {}) exceeds ({}, {})",
            truncation.l_max, truncation.p_max, MAX_TRUNCATION.l_max, MAX_TRUNCATION.p_max
        )));
    }
    let reference = Truncation {
        l_max: truncation.l_max + 2,
        p_max: truncation.p_max + 2,
    };
    let needed = 2 * reference.l_max as usize + l.unsigned_abs() as usize + 1;
    if opts.angular_samples <= needed {
        return Err(Error::invalid(format!(
            "angular sampling needs more than {needed} points, got {}",
            opts.angular_samples
        )));
    }
    let basis_waist = opts.basis_waist_factor * pump.geometry().waist_mm;
    let q_max = opts.q_max_factor / basis_waist;

    let coarse = RadialTables::build(pump, (p, l), basis_waist, reference, q_max, opts.radial_nodes)?;
    let fine = RadialTables::build(pump, (p, l), basis_waist, reference, q_max, 2 * opts.radial_nodes)?;
    let raw = raw_coefficients(&coarse, l, reference, opts.angular_samples);
    let raw_fine = raw_coefficients(&fine, l, reference, opts.angular_samples);

    let in_truncation = |&(ls, ps, li, pi): &ModePair| {
        ls.unsigned_abs() <= truncation.l_max
            && li.unsigned_abs() <= truncation.l_max
            && ps <= truncation.p_max
            && pi <= truncation.p_max
    };
    let peak = raw
        .iter()
        .filter(|(k, _)| in_truncation(k))
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max);
    let doubling_change = raw
        .iter()
        .filter(|(k, _)| in_truncation(k))
        .map(|(k, c)| {
            let diff = (raw_fine[k] - c).norm();
            if c.norm() > 1e-6 * peak {
                diff / c.norm()
            } else {
                diff / peak.max(f64::MIN_POSITIVE)
            }
        })
        .fold(0.0, f64::max);
    if doubling_change > opts.doubling_tolerance {
        return Err(Error::numerical(
            "oam_decompose",
            format!(
                "radial quadrature changed a coefficient by {doubling_change:e} when doubling {} nodes",
                opts.radial_nodes
            ),
        ));
    }

    let reference_power: f64 = raw.values().map(|c| c.norm_sqr()).sum();
    if !(reference_power > 0.0) {
        return Err(Error::numerical("oam_decompose", "all overlaps vanish"));
    }
    let raw_scale = reference_power.sqrt();
    let entries: BTreeMap<ModePair, Complex64> = raw
        .into_iter()
        .filter(|(k, _)| in_truncation(k))
        .map(|(k, c)| (k, c / raw_scale))
        .collect();
    let power: f64 = entries.values().map(|c| c.norm_sqr()).sum();
    Ok(OamSpectrum {
        entries,
        truncation,
        pump_indices: (l, p),
        basis_waist_mm: basis_waist,
        deficit: (1.0 - power).max(0.0),
        raw_scale,
        doubling_change,
    })
}
