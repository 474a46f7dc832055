//! Nonnegative least squares (Lawson-Hanson active set).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Solves `min ||A x - b||₂` subject to `x ≥ 0`.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let (m, n) = a.shape();
    if b.len() != m {
        return Err(Error::invalid(format!("nnls: {m} rows but rhs has {}", b.len())));
    }
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs())) * b.amax().max(1.0);
    let tol = 1e-12 * scale.max(f64::MIN_POSITIVE) * (m.max(n) as f64);
    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    let max_outer = 3 * n + 10;

    for _ in 0..max_outer {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = candidate else {
            return Ok(x);
        };
        passive[j] = true;

        for _ in 0..max_outer {
            let s = solve_passive(a, b, &passive)?;
            let feasible = (0..n).filter(|&k| passive[k]).all(|k| s[k] > 0.0);
            if feasible {
                x = s;
                break;
            }
            // Step back to the boundary and drop the variables that hit it.
            let alpha = (0..n)
                .filter(|&k| passive[k] && s[k] <= 0.0)
                .map(|k| x[k] / (x[k] - s[k]))
                .fold(f64::INFINITY, f64::min);
            x += (s - &x) * alpha;
            let floor = 1e-14 * x.amax();
            for k in 0..n {
                if passive[k] && x[k] <= floor {
                    passive[k] = false;
                    x[k] = 0.0;
                }
            }
        }
    }
    Err(Error::numerical("nnls", format!("no convergence for a {m}×{n} system")))
}

/// Unconstrained least squares restricted to the passive columns.
fn solve_passive(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[bool]) -> Result<DVector<f64>> {
    let cols: Vec<usize> = (0..passive.len()).filter(|&k| passive[k]).collect();
    let sub = a.select_columns(&cols);
    let svd = sub.svd(true, true);
    let sol = svd
        .solve(b, 1e-13)
        .map_err(|e| Error::numerical("nnls", e.to_string()))?;
    let mut full = DVector::zeros(passive.len());
    for (i, &k) in cols.iter().enumerate() {
        full[k] = sol[i];
    }
    Ok(full)
}
