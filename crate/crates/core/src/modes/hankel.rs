//! Radial (Hankel) transforms of Laguerre-Gaussian profiles.
//!
//! For a field `f(ρ) exp(-ilφ)` the unitary 2D Fourier transform is
//! `(-i)^|l| H_|l|[f](q) exp(-ilφ_q)` with
//! `H_n[f](q) = ∫₀^∞ f(ρ) J_n(qρ) ρ dρ`. `H_n` is its own inverse.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use super::quadrature::GaussLegendreRule;
use super::special::{bessel_j, factorial, laguerre};
use super::{minus_i_pow, MAX_POLY_ORDER};
use crate::error::{Error, Result};

/// Node-doubling controls for [`hankel_transform`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HankelOptions {
    pub initial_nodes: usize,
    pub max_nodes: usize,
    /// Accepted change between successive doublings, relative to the larger
    /// of the result and `∫|f| ρ dρ`.
    pub rel_tol: f64,
}

impl Default for HankelOptions {
    fn default() -> Self {
        Self {
            initial_nodes: 64,
            max_nodes: 8192,
            rel_tol: 1e-11,
        }
    }
}

/// `∫₀^r_max f(ρ) J_order(kρ) ρ dρ` by Gauss-Legendre with node doubling.
pub fn hankel_transform<F: Fn(f64) -> f64>(
    order: u32,
    f: F,
    r_max: f64,
    k: f64,
    opts: HankelOptions,
) -> Result<f64> {
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(Error::domain(format!("Hankel cutoff must be > 0, got {r_max}")));
    }
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::domain(format!("Hankel frequency must be ≥ 0, got {k}")));
    }
    let eval = |nodes: usize| -> (f64, f64) {
        let rule = GaussLegendreRule::new(nodes);
        let mut value = 0.0;
        let mut scale = 0.0;
        for (r, w) in rule.on_interval(0.0, r_max) {
            let fr = f(r) * r * w;
            value += fr * bessel_j(order, k * r);
            scale += fr.abs();
        }
        (value, scale)
    };
    let mut nodes = opts.initial_nodes.max(2);
    let (mut prev, _) = eval(nodes);
    let mut last_change = f64::INFINITY;
    while nodes < opts.max_nodes {
        nodes *= 2;
        let (cur, scale) = eval(nodes);
        last_change = (cur - prev).abs();
        if last_change <= opts.rel_tol * cur.abs().max(scale) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::numerical(
        "hankel_transform",
        format!(
            "order {order}, k = {k} rad/mm, cutoff {r_max} mm: change {last_change:e} after {nodes} nodes"
        ),
    ))
}

/// Real radial profile of the normalized LG mode at its waist.
pub(crate) fn lg_waist_radial(p: u32, l: i32, waist: f64, rho: f64) -> f64 {
    let al = l.unsigned_abs();
    let norm = (2.0 * factorial(p) / (PI * factorial(p + al))).sqrt() / waist;
    let s = SQRT_2 * rho / waist;
    norm * s.powi(al as i32) * laguerre(p, al, s * s) * (-rho * rho / (waist * waist)).exp()
}

fn check_lg(p: u32, l: i32, waist: f64) -> Result<()> {
    if p > MAX_POLY_ORDER || l.unsigned_abs() > MAX_POLY_ORDER {
        return Err(Error::domain(format!("LG indices (p={p}, l={l}) exceed {MAX_POLY_ORDER}")));
    }
    if !(waist > 0.0) || !waist.is_finite() {
        return Err(Error::domain(format!("waist must be > 0, got {waist}")));
    }
    Ok(())
}

/// Support radius beyond which an LG profile of order `N` is negligible.
fn lg_cutoff(p: u32, l: i32, waist: f64) -> f64 {
    let order = f64::from(2 * p + l.unsigned_abs());
    waist * (6.0 + 2.0 * (order + 1.0).sqrt())
}

/// Radial profile of the Fourier transform of LG(p, l) with waist `waist_mm`,
/// including the `(-i)^|l|` factor; the azimuthal factor is `exp(-ilφ_q)`.
pub fn lg_fourier(p: u32, l: i32, waist_mm: f64, q: f64) -> Result<Complex64> {
    check_lg(p, l, waist_mm)?;
    if !(q >= 0.0) || !q.is_finite() {
        return Err(Error::domain(format!("radial frequency must be ≥ 0, got {q}")));
    }
    let h = hankel_transform(
        l.unsigned_abs(),
        |r| lg_waist_radial(p, l, waist_mm, r),
        lg_cutoff(p, l, waist_mm),
        q,
        HankelOptions::default(),
    )?;
    Ok(minus_i_pow(l.unsigned_abs()) * h)
}

/// Closed form of [`lg_fourier`]: an LG profile of waist `2/w` times
/// `(-1)^p (-i)^|l|`.
pub fn lg_fourier_analytic(p: u32, l: i32, waist_mm: f64, q: f64) -> Result<Complex64> {
    check_lg(p, l, waist_mm)?;
    let sign = if p.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(minus_i_pow(l.unsigned_abs()) * (sign * lg_waist_radial(p, l, 2.0 / waist_mm, q)))
}

/// Inverse of [`lg_fourier`]: transforms the numerically computed spectrum
/// back to the radial profile at `rho`.
pub fn lg_fourier_inverse(p: u32, l: i32, waist_mm: f64, rho: f64) -> Result<f64> {
    check_lg(p, l, waist_mm)?;
    let al = l.unsigned_abs();
    let q_max = (8.0 / waist_mm).max(lg_cutoff(p, l, 2.0 / waist_mm));
    // Undo the (-i)^|l| factor so the integrand is real.
    let undo = minus_i_pow(al).conj();
    let spectrum = |q: f64| -> f64 {
        lg_fourier(p, l, waist_mm, q)
            .map(|v| (v * undo).re)
            .unwrap_or(f64::NAN)
    };
    let opts = HankelOptions {
        initial_nodes: 32,
        max_nodes: 1024,
        rel_tol: 1e-9,
    };
    let value = hankel_transform(al, spectrum, q_max, rho, opts)?;
    if value.is_nan() {
        return Err(Error::numerical("lg_fourier_inverse", "forward transform failed"));
    }
    Ok(value)
}
