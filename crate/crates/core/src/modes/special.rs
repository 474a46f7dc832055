//! Orthogonal polynomials and Bessel functions used by the beam modes.

use crate::error::{Error, Result};

/// Highest polynomial order accepted by the checked entry points.
pub const MAX_POLY_ORDER: u32 = 30;

/// Physicists' Hermite polynomial `H_n(x)`.
///
/// Evaluated with the three-term recurrence `H_{n+1} = 2x H_n - 2n H_{n-1}`.
pub fn hermite_poly(n: u32, x: f64) -> Result<f64> {
    if n > MAX_POLY_ORDER {
        return Err(Error::domain(format!(
            "Hermite order {n} exceeds {MAX_POLY_ORDER}"
        )));
    }
    if !x.is_finite() {
        return Err(Error::domain(format!("Hermite argument {x} is not finite")));
    }
    Ok(hermite(n, x))
}

/// Generalized Laguerre polynomial `L_p^α(x)` for `x ≥ 0`.
pub fn laguerre_poly(p: u32, alpha: u32, x: f64) -> Result<f64> {
    if p > MAX_POLY_ORDER {
        return Err(Error::domain(format!(
            "Laguerre order {p} exceeds {MAX_POLY_ORDER}"
        )));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(format!(
            "Laguerre argument must be finite and non-negative, got {x}"
        )));
    }
    Ok(laguerre(p, alpha, x))
}

#[inline]
pub(crate) fn hermite(n: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * f64::from(k) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[inline]
pub(crate) fn laguerre(p: u32, alpha: u32, x: f64) -> f64 {
    let a = f64::from(alpha);
    let mut prev = 1.0;
    if p == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for k in 1..p {
        let kf = f64::from(k);
        let next = ((2.0 * kf + 1.0 + a - x) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `n!` as a float; exact for the orders used here.
pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * f64::from(k))
}

/// Bessel function of the first kind `J_n(x)` for integer order.
#[inline]
pub(crate) fn bessel_j(n: u32, x: f64) -> f64 {
    libm::jn(n as i32, x)
}
