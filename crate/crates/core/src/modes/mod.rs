//! Transverse beam modes.
//!
//! Hermite-Gaussian and Laguerre-Gaussian modes are evaluated in closed form
//! at any propagation distance. All modes are L²-normalized over the
//! transverse plane at every `z`.
//!
//! Phase convention: a field propagates as `exp(i(q·ρ - q² z / 2k))` in
//! angular-spectrum space, so a diverging beam carries the curvature factor
//! `exp(+i k ρ² / 2R(z))` and the Gouy factor `exp(-i (N + 1) θ(z))`, where
//! `N` is the mode order. Laguerre-Gaussian modes carry the azimuthal factor
//! `exp(-i l φ)`, so their phase winds by `-2πl` counter-clockwise.

mod hankel;
mod quadrature;
mod special;

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::units;

pub use hankel::{hankel_transform, lg_fourier, lg_fourier_analytic, lg_fourier_inverse, HankelOptions};
pub use quadrature::{GaussLegendreRule, SquareGrid};
pub use special::{hermite_poly, laguerre_poly, MAX_POLY_ORDER};

pub(crate) use special::{factorial, hermite, laguerre};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Powers of `-i`.
#[inline]
pub(crate) fn minus_i_pow(n: u32) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Waist, wavelength and axial position of a paraxial beam.
///
/// `z_mm` is measured from the beam waist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamGeometry {
    pub waist_mm: f64,
    pub wavelength_nm: f64,
    pub z_mm: f64,
}

impl BeamGeometry {
    pub fn new(waist_mm: f64, wavelength_nm: f64, z_mm: f64) -> Result<Self> {
        if !(waist_mm > 0.0) || !waist_mm.is_finite() {
            return Err(Error::invalid(format!("waist must be > 0, got {waist_mm} mm")));
        }
        if !(wavelength_nm > 0.0) || !wavelength_nm.is_finite() {
            return Err(Error::invalid(format!(
                "wavelength must be > 0, got {wavelength_nm} nm"
            )));
        }
        if !z_mm.is_finite() {
            return Err(Error::invalid(format!("z must be finite, got {z_mm} mm")));
        }
        Ok(Self {
            waist_mm,
            wavelength_nm,
            z_mm,
        })
    }

    /// Wavenumber in rad/mm.
    pub fn wavenumber(&self) -> f64 {
        units::wavenumber_per_mm(self.wavelength_nm)
    }

    /// Rayleigh range `z_R = π w² / λ` in mm.
    pub fn rayleigh_range(&self) -> f64 {
        PI * self.waist_mm * self.waist_mm / units::nm_to_mm(self.wavelength_nm)
    }

    /// Beam radius `w(z)`.
    pub fn width(&self) -> f64 {
        let s = self.z_mm / self.rayleigh_range();
        self.waist_mm * (1.0 + s * s).sqrt()
    }

    /// Wavefront radius `R(z) = (z² + z_R²)/z`; `None` at the waist.
    pub fn curvature_radius(&self) -> Option<f64> {
        if self.z_mm == 0.0 {
            None
        } else {
            let zr = self.rayleigh_range();
            Some((self.z_mm * self.z_mm + zr * zr) / self.z_mm)
        }
    }

    /// `1/R(z)`, which is finite (zero) at the waist.
    pub fn inverse_curvature(&self) -> f64 {
        let zr = self.rayleigh_range();
        self.z_mm / (self.z_mm * self.z_mm + zr * zr)
    }

    /// Gouy phase `θ(z) = arctan(z / z_R)`.
    pub fn gouy(&self) -> f64 {
        (self.z_mm / self.rayleigh_range()).atan()
    }

    pub fn with_z(&self, z_mm: f64) -> Self {
        Self { z_mm, ..*self }
    }

    /// Quadratic exponent coefficient: the envelope is `exp(-b ρ²)`.
    fn gaussian_coefficient(&self) -> Complex64 {
        let w = self.width();
        Complex64::new(1.0 / (w * w), -0.5 * self.wavenumber() * self.inverse_curvature())
    }
}

/// Shape of a transverse mode.
#[derive(Debug, Clone)]
pub enum ModeKind {
    Hg { m: u32, n: u32 },
    Lg { p: u32, l: i32 },
    Superposition(Vec<(Complex64, TransverseMode)>),
    /// Gaussian beam whose upper part (`y > step_position_mm`) is retarded by
    /// `phase_rad` at a laminate plane, observed `distance_mm` downstream.
    PhaseStepGaussian {
        step_position_mm: f64,
        phase_rad: f64,
        distance_mm: f64,
        fresnel: Option<Arc<FresnelRule>>,
    },
}

/// Quadrature used to propagate a stepped profile through free space.
#[derive(Debug)]
pub struct FresnelRule {
    rule: GaussLegendreRule,
}

/// Minimum per-panel node count for stepped-profile propagation.
pub const DEFAULT_FRESNEL_NODES: usize = 512;

/// A complex transverse field profile at a fixed plane.
#[derive(Debug, Clone)]
pub struct TransverseMode {
    kind: ModeKind,
    geometry: BeamGeometry,
}

impl TransverseMode {
    pub fn hg(m: u32, n: u32, geometry: BeamGeometry) -> Result<Self> {
        if m > MAX_POLY_ORDER || n > MAX_POLY_ORDER {
            return Err(Error::domain(format!(
                "HG indices ({m}, {n}) exceed {MAX_POLY_ORDER}"
            )));
        }
        Ok(Self {
            kind: ModeKind::Hg { m, n },
            geometry,
        })
    }

    pub fn lg(p: u32, l: i32, geometry: BeamGeometry) -> Result<Self> {
        if p > MAX_POLY_ORDER || l.unsigned_abs() > MAX_POLY_ORDER {
            return Err(Error::domain(format!(
                "LG indices (p={p}, l={l}) exceed {MAX_POLY_ORDER}"
            )));
        }
        Ok(Self {
            kind: ModeKind::Lg { p, l },
            geometry,
        })
    }

    pub fn gaussian(geometry: BeamGeometry) -> Self {
        Self {
            kind: ModeKind::Hg { m: 0, n: 0 },
            geometry,
        }
    }

    /// Coherent sum of modes. Weights must have unit total squared magnitude
    /// and all components must share one wavelength and axial position.
    pub fn superposition(terms: Vec<(Complex64, TransverseMode)>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::invalid("superposition needs at least one term"));
        };
        let geometry = first.geometry;
        let total: f64 = terms.iter().map(|(c, _)| c.norm_sqr()).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "superposition weights must have unit squared norm, got {total}"
            )));
        }
        for (_, mode) in &terms {
            let g = mode.geometry;
            if g.wavelength_nm != geometry.wavelength_nm || g.z_mm != geometry.z_mm {
                return Err(Error::invalid(
                    "superposition components must share wavelength and plane",
                ));
            }
        }
        let geometry = BeamGeometry {
            waist_mm: terms
                .iter()
                .map(|(_, m)| m.geometry.waist_mm)
                .fold(0.0, f64::max),
            ..geometry
        };
        Ok(Self {
            kind: ModeKind::Superposition(terms),
            geometry,
        })
    }

    /// Normalized Gaussian with a phase step, observed at the laminate plane
    /// (`geometry.z_mm` is the laminate position relative to the waist).
    pub fn phase_step(step_position_mm: f64, phase_rad: f64, geometry: BeamGeometry) -> Result<Self> {
        if !step_position_mm.is_finite() || !phase_rad.is_finite() {
            return Err(Error::invalid("phase step parameters must be finite"));
        }
        Ok(Self {
            kind: ModeKind::PhaseStepGaussian {
                step_position_mm,
                phase_rad,
                distance_mm: 0.0,
                fresnel: None,
            },
            geometry,
        })
    }

    pub fn kind(&self) -> &ModeKind {
        &self.kind
    }

    pub fn geometry(&self) -> &BeamGeometry {
        &self.geometry
    }

    pub fn wavenumber(&self) -> f64 {
        self.geometry.wavenumber()
    }

    /// Largest beam radius among the components at the current plane.
    pub fn width(&self) -> f64 {
        match &self.kind {
            ModeKind::Superposition(terms) => {
                terms.iter().map(|(_, m)| m.width()).fold(0.0, f64::max)
            }
            _ => self.geometry.width(),
        }
    }

    /// Mode order `m + n` or `2p + |l|`; the maximum over components for
    /// superpositions, zero for stepped beams.
    pub fn order(&self) -> u32 {
        match &self.kind {
            ModeKind::Hg { m, n } => m + n,
            ModeKind::Lg { p, l } => 2 * p + l.unsigned_abs(),
            ModeKind::Superposition(terms) => terms.iter().map(|(_, m)| m.order()).max().unwrap_or(0),
            ModeKind::PhaseStepGaussian { .. } => 0,
        }
    }

    /// The same beam after free propagation over `distance_mm`.
    pub fn propagated(&self, distance_mm: f64) -> Self {
        let geometry = self.geometry.with_z(self.geometry.z_mm + distance_mm);
        let kind = match &self.kind {
            ModeKind::Hg { .. } | ModeKind::Lg { .. } => self.kind.clone(),
            ModeKind::Superposition(terms) => ModeKind::Superposition(
                terms
                    .iter()
                    .map(|(c, m)| (*c, m.propagated(distance_mm)))
                    .collect(),
            ),
            ModeKind::PhaseStepGaussian {
                step_position_mm,
                phase_rad,
                distance_mm: d0,
                ..
            } => {
                let d = d0 + distance_mm;
                let laminate = self.geometry.with_z(self.geometry.z_mm - d0);
                let fresnel = (d != 0.0).then(|| {
                    Arc::new(FresnelRule::for_propagation(
                        &laminate,
                        d,
                        geometry.width(),
                        DEFAULT_FRESNEL_NODES,
                    ))
                });
                ModeKind::PhaseStepGaussian {
                    step_position_mm: *step_position_mm,
                    phase_rad: *phase_rad,
                    distance_mm: d,
                    fresnel,
                }
            }
        };
        Self { kind, geometry }
    }

    /// Field value at transverse point `(x, y)` in mm.
    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        let g = &self.geometry;
        match &self.kind {
            ModeKind::Hg { m, n } => {
                let w = g.width();
                let norm = (2.0 / (PI * 2f64.powi((m + n) as i32) * factorial(*m) * factorial(*n)))
                    .sqrt()
                    / w;
                let poly = hermite(*m, SQRT_2 * x / w) * hermite(*n, SQRT_2 * y / w);
                envelope(g, x * x + y * y, m + n) * (norm * poly)
            }
            ModeKind::Lg { p, l } => {
                let rho = x.hypot(y);
                let phi = y.atan2(x);
                lg_radial(*p, *l, g, rho) * Complex64::from_polar(1.0, -f64::from(*l) * phi)
            }
            ModeKind::Superposition(terms) => terms.iter().map(|(c, m)| c * m.eval(x, y)).sum(),
            ModeKind::PhaseStepGaussian {
                step_position_mm,
                phase_rad,
                distance_mm,
                fresnel,
            } => {
                let step = Step {
                    position: *step_position_mm,
                    phase: *phase_rad,
                };
                let gx = gaussian_1d(g, x);
                let gy = match fresnel {
                    None => gaussian_1d(g, y) * step.factor(y),
                    Some(rule) => {
                        let laminate = g.with_z(g.z_mm - distance_mm);
                        rule.propagate_stepped(&laminate, step, *distance_mm, y)
                    }
                };
                gx * gy
            }
        }
    }

    /// Unitary angular spectrum `(1/2π) ∬ W(ρ) exp(-i q·ρ) d²ρ` at the current plane.
    pub fn angular_spectrum(&self, qx: f64, qy: f64) -> Complex64 {
        let g = &self.geometry;
        let k = g.wavenumber();
        let q2 = qx * qx + qy * qy;
        let propagation = Complex64::from_polar(1.0, -q2 * g.z_mm / (2.0 * k));
        match &self.kind {
            ModeKind::Hg { m, n } => {
                let waist = g.with_z(0.0);
                let dual = BeamGeometry {
                    waist_mm: 2.0 / g.waist_mm,
                    ..waist
                };
                let shape = TransverseMode {
                    kind: ModeKind::Hg { m: *m, n: *n },
                    geometry: dual,
                };
                minus_i_pow(m + n) * shape.eval(qx, qy) * propagation
            }
            ModeKind::Lg { p, l } => {
                let dual = BeamGeometry {
                    waist_mm: 2.0 / g.waist_mm,
                    ..g.with_z(0.0)
                };
                let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                let shape = TransverseMode {
                    kind: ModeKind::Lg { p: *p, l: *l },
                    geometry: dual,
                };
                minus_i_pow(l.unsigned_abs()) * sign * shape.eval(qx, qy) * propagation
            }
            ModeKind::Superposition(terms) => terms
                .iter()
                .map(|(c, m)| c * m.angular_spectrum(qx, qy))
                .sum(),
            ModeKind::PhaseStepGaussian {
                step_position_mm,
                phase_rad,
                distance_mm,
                ..
            } => {
                let laminate = g.with_z(g.z_mm - distance_mm);
                let step = Step {
                    position: *step_position_mm,
                    phase: *phase_rad,
                };
                let extra = Complex64::from_polar(1.0, -q2 * distance_mm / (2.0 * k));
                gaussian_1d_spectrum(&laminate, qx) * stepped_spectrum_1d(&laminate, step, qy) * extra
            }
        }
    }
}

/// Field value of `mode` at `point = (x, y)` in mm.
pub fn eval_mode(mode: &TransverseMode, point: (f64, f64)) -> Complex64 {
    mode.eval(point.0, point.1)
}

/// Radial factor of an LG mode: the field without its `exp(-ilφ)` factor.
pub fn lg_radial(p: u32, l: i32, geometry: &BeamGeometry, rho: f64) -> Complex64 {
    let w = geometry.width();
    let al = l.unsigned_abs();
    let norm = (2.0 * factorial(p) / (PI * factorial(p + al))).sqrt() / w;
    let s = SQRT_2 * rho / w;
    let radial = s.powi(al as i32) * laguerre(p, al, s * s);
    envelope(geometry, rho * rho, 2 * p + al) * (norm * radial)
}

/// Gaussian envelope with curvature and Gouy phase for a mode of order `order`.
#[inline]
fn envelope(g: &BeamGeometry, rho2: f64, order: u32) -> Complex64 {
    let w = g.width();
    let phase = 0.5 * g.wavenumber() * g.inverse_curvature() * rho2
        - f64::from(order + 1) * g.gouy();
    Complex64::from_polar((-rho2 / (w * w)).exp(), phase)
}

/// One Cartesian factor of the normalized fundamental Gaussian.
fn gaussian_1d(g: &BeamGeometry, x: f64) -> Complex64 {
    let w = g.width();
    let amp = (2.0 / PI).powf(0.25) / w.sqrt();
    let phase = 0.5 * g.wavenumber() * g.inverse_curvature() * x * x - 0.5 * g.gouy();
    Complex64::from_polar(amp * (-x * x / (w * w)).exp(), phase)
}

/// Unitary 1D Fourier transform of [`gaussian_1d`].
fn gaussian_1d_spectrum(g: &BeamGeometry, q: f64) -> Complex64 {
    let b = g.gaussian_coefficient();
    let amp = (2.0 / PI).powf(0.25) / g.width().sqrt();
    let gouy = Complex64::from_polar(1.0, -0.5 * g.gouy());
    gouy * amp / (2.0 * b).sqrt() * (-(q * q) / (4.0 * b)).exp()
}

#[derive(Debug, Clone, Copy)]
struct Step {
    position: f64,
    phase: f64,
}

impl Step {
    #[inline]
    fn factor(&self, y: f64) -> Complex64 {
        if y > self.position {
            Complex64::from_polar(1.0, self.phase)
        } else {
            Complex64::new(1.0, 0.0)
        }
    }

    /// Integration panels covering `[-half, half]`, split at the step.
    fn panels(&self, half: f64) -> Vec<(f64, f64)> {
        if self.position <= -half || self.position >= half {
            vec![(-half, half)]
        } else {
            vec![(-half, self.position), (self.position, half)]
        }
    }
}

/// Half-width in units of `w` beyond which the Gaussian factor is negligible.
const GAUSSIAN_CUTOFF: f64 = 7.0;

fn stepped_spectrum_1d(laminate: &BeamGeometry, step: Step, q: f64) -> Complex64 {
    let half = GAUSSIAN_CUTOFF * laminate.width();
    let cycles = q.abs() * half / PI;
    let rule = GaussLegendreRule::new(256usize.max((8.0 * cycles) as usize + 64));
    let scale = 1.0 / (2.0 * PI).sqrt();
    step.panels(half)
        .into_iter()
        .map(|(a, b)| {
            rule.integrate_complex(a, b, |y| {
                gaussian_1d(laminate, y) * step.factor(y) * Complex64::from_polar(1.0, -q * y)
            })
        })
        .sum::<Complex64>()
        * scale
}

impl FresnelRule {
    fn for_propagation(laminate: &BeamGeometry, distance: f64, out_width: f64, min_nodes: usize) -> Self {
        let half = GAUSSIAN_CUTOFF * laminate.width();
        // Kernel cycles across one panel for an observation point 10 widths out.
        let reach = half + 10.0 * out_width.max(laminate.width());
        let cycles = laminate.wavenumber() * reach * 2.0 * half / (2.0 * PI * distance.abs());
        let nodes = ((8.0 * cycles) as usize + 64).clamp(min_nodes, 1 << 16);
        Self {
            rule: GaussLegendreRule::new(nodes),
        }
    }

    /// 1D Fresnel integral of the stepped Gaussian factor over `distance`.
    fn propagate_stepped(&self, laminate: &BeamGeometry, step: Step, distance: f64, y: f64) -> Complex64 {
        let k = laminate.wavenumber();
        let half = GAUSSIAN_CUTOFF * laminate.width();
        // sqrt(k / (2π i d))
        let prefactor = (Complex64::new(k / (2.0 * PI * distance), 0.0) / I).sqrt();
        let integral: Complex64 = step
            .panels(half)
            .into_iter()
            .map(|(a, b)| {
                self.rule.integrate_complex(a, b, |yp| {
                    let dy = y - yp;
                    gaussian_1d(laminate, yp)
                        * step.factor(yp)
                        * Complex64::from_polar(1.0, k * dy * dy / (2.0 * distance))
                })
            })
            .sum();
        prefactor * integral
    }
}

/// Parity of a profile under `y → -y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParityClass {
    Even,
    Odd,
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parity {
    pub class: ParityClass,
    /// Fraction of the mode power in the y-odd component.
    pub odd_fraction: f64,
}

/// Classification threshold on the odd (or even) power fraction.
pub const PARITY_EPSILON: f64 = 1e-6;

/// Quadrature settings for plane integrals over a mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneQuadrature {
    /// Gauss-Legendre nodes per axis.
    pub order: usize,
    /// Half-width of the integration square in units of the beam radius.
    pub half_width_factor: f64,
}

impl Default for PlaneQuadrature {
    fn default() -> Self {
        Self {
            order: 128,
            half_width_factor: 4.0,
        }
    }
}

impl PlaneQuadrature {
    pub fn grid_for(&self, mode: &TransverseMode) -> SquareGrid {
        SquareGrid::new(self.order, self.half_width_factor * mode.width())
    }
}

/// `∬ |W|² dx dy` over the quadrature square.
pub fn mode_power(mode: &TransverseMode, quad: PlaneQuadrature) -> f64 {
    quad.grid_for(mode).integrate(|x, y| mode.eval(x, y).norm_sqr())
}

/// y-parity of a mode with the default quadrature.
pub fn parity_y(mode: &TransverseMode) -> Parity {
    parity_y_with(mode, PlaneQuadrature::default())
}

pub fn parity_y_with(mode: &TransverseMode, quad: PlaneQuadrature) -> Parity {
    let (total, odd) = parity_split(mode, quad);
    let odd_fraction = if total > 0.0 { (odd / total).clamp(0.0, 1.0) } else { 0.0 };
    let class = if odd_fraction < PARITY_EPSILON {
        ParityClass::Even
    } else if odd_fraction > 1.0 - PARITY_EPSILON {
        ParityClass::Odd
    } else {
        ParityClass::Undefined
    };
    Parity {
        class,
        odd_fraction,
    }
}

/// Total power and y-odd power on a mirror-symmetric grid.
fn parity_split(mode: &TransverseMode, quad: PlaneQuadrature) -> (f64, f64) {
    let grid = quad.grid_for(mode);
    let n = grid.len();
    let values: Vec<Complex64> = (0..n * n)
        .map(|idx| mode.eval(grid.points[idx % n], grid.points[idx / n]))
        .collect();
    let mut total = 0.0;
    let mut odd = 0.0;
    for iy in 0..n {
        let my = grid.mirror_index(iy);
        for ix in 0..n {
            let w = grid.weights[ix] * grid.weights[iy];
            let v = values[iy * n + ix];
            let mirrored = values[my * n + ix];
            total += w * v.norm_sqr();
            odd += w * (0.5 * (v - mirrored)).norm_sqr();
        }
    }
    (total, odd)
}

/// Real overlap `∬ W*(x, y) W(x, -y) dx dy / ∬ |W|²`; equals `1 - 2·odd_fraction`.
pub fn mirror_overlap(mode: &TransverseMode, quad: PlaneQuadrature) -> f64 {
    let (total, odd) = parity_split(mode, quad);
    if total > 0.0 {
        1.0 - 2.0 * odd / total
    } else {
        0.0
    }
}
