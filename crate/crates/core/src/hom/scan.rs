//! Fixed-detector coincidence maps.

use rayon::prelude::*;

use super::{Interferometer, Port};
use crate::biphoton::{direct_amplitude, Analyzer, Aperture};
use crate::error::{Error, Result};

/// Rectangular grid of moving-detector positions in mm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGrid {
    pub x_min_mm: f64,
    pub x_max_mm: f64,
    pub nx: usize,
    pub y_min_mm: f64,
    pub y_max_mm: f64,
    pub ny: usize,
}

impl ScanGrid {
    pub fn new(x: (f64, f64), nx: usize, y: (f64, f64), ny: usize) -> Result<Self> {
        let grid = Self {
            x_min_mm: x.0,
            x_max_mm: x.1,
            nx,
            y_min_mm: y.0,
            y_max_mm: y.1,
            ny,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// `n × n` points over `[-half, half]²`.
    pub fn square(half_width_mm: f64, n: usize) -> Result<Self> {
        Self::new((-half_width_mm, half_width_mm), n, (-half_width_mm, half_width_mm), n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::invalid("scan grid needs at least one point per axis"));
        }
        for (lo, hi) in [(self.x_min_mm, self.x_max_mm), (self.y_min_mm, self.y_max_mm)] {
            if !lo.is_finite() || !hi.is_finite() || hi < lo {
                return Err(Error::invalid(format!("invalid scan range [{lo}, {hi}] mm")));
            }
        }
        Ok(())
    }

    fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            vec![lo]
        } else {
            (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x_min_mm, self.x_max_mm, self.nx)
    }

    pub fn ys(&self) -> Vec<f64> {
        Self::axis(self.y_min_mm, self.y_max_mm, self.ny)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// What a map records at each moving-detector position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapMode {
    /// Cross-port coincidences; `gamma` weights the interference term
    /// (1 balanced, 0 unbalanced).
    Cross {
        analyzer_1: Analyzer,
        analyzer_2: Analyzer,
        gamma: f64,
    },
    /// Both detectors behind one port.
    SamePort {
        port: Port,
        analyzer_a: Analyzer,
        analyzer_b: Analyzer,
        gamma: f64,
    },
    /// No interferometer: signal at the fixed detector, idler scanned.
    Direct,
}

/// Coincidence probability over a scan grid.
///
/// Values are stored row-major with `y` as the outer (slow) index and `x` as
/// the inner one, both ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceMap {
    pub fixed_mm: (f64, f64),
    pub grid: ScanGrid,
    pub values: Vec<f64>,
    pub peak_normalized: bool,
}

impl CoincidenceMap {
    pub fn from_values(
        grid: ScanGrid,
        fixed_mm: (f64, f64),
        values: Vec<f64>,
        peak_normalized: bool,
    ) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "map has {} values for a {}×{} grid",
                values.len(),
                grid.nx,
                grid.ny
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::invalid(format!("map values must be finite and ≥ 0, found {v}")));
        }
        Ok(Self {
            fixed_mm,
            grid,
            values,
            peak_normalized,
        })
    }

    /// Scans the moving detector (detector 2, or B for same-port maps) with
    /// the other held at `fixed_mm`. Apertures average the probability over
    /// each detector's area.
    pub fn scan(
        interf: &Interferometer,
        mode: MapMode,
        fixed_mm: (f64, f64),
        grid: ScanGrid,
        fixed_aperture: &Aperture,
        moving_aperture: &Aperture,
    ) -> Result<Self> {
        grid.validate()?;
        let xs = grid.xs();
        let ys = grid.ys();
        let probability = |r1: (f64, f64), r2: (f64, f64)| -> f64 {
            match mode {
                MapMode::Cross {
                    analyzer_1,
                    analyzer_2,
                    gamma,
                } => interf.coincidence_cross_partial(r1, r2, analyzer_1, analyzer_2, gamma),
                MapMode::SamePort {
                    port,
                    analyzer_a,
                    analyzer_b,
                    gamma,
                } => interf.coincidence_same_port_partial(port, r1, r2, analyzer_a, analyzer_b, gamma),
                MapMode::Direct => direct_amplitude(interf.field(), r1, r2).norm_sqr(),
            }
        };
        let values: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let moving = (xs[idx % grid.nx], ys[idx / grid.nx]);
                fixed_aperture.average(fixed_mm, |r1| {
                    moving_aperture.average(moving, |r2| probability(r1, r2))
                })
            })
            .collect();
        Self::from_values(grid, fixed_mm, values, false)
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.nx + ix]
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// The map divided by its peak; an all-zero map is returned unchanged.
    pub fn normalized(&self) -> Self {
        let peak = self.peak();
        let values = if peak > 0.0 {
            self.values.iter().map(|v| v / peak).collect()
        } else {
            self.values.clone()
        };
        Self {
            values,
            peak_normalized: true,
            ..self.clone()
        }
    }

    /// `(x, y, value)` in storage order.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let xs = self.grid.xs();
        let ys = self.grid.ys();
        let nx = self.grid.nx;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (xs[i % nx], ys[i / nx], v))
    }
}
