//! Gauss-Legendre rules on finite intervals and square grids.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

/// A Gauss-Legendre rule on `[-1, 1]` with exactly mirror-symmetric nodes.
///
/// Symmetry matters for parity splitting: the reflection of every node is
/// itself a node, so `f(x, -y)` is sampled on the same grid as `f(x, y)`.
#[derive(Debug, Clone)]
pub struct GaussLegendreRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendreRule {
    pub fn new(order: usize) -> Self {
        let order = order.max(1);
        let raw = GaussLegendre::new(NonZeroUsize::new(order).expect("order ≥ 1"));
        let mut pairs: Vec<(f64, f64)> = raw.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = pairs.len();
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let j = n - 1 - i;
            let x = 0.5 * (pairs[j].0 - pairs[i].0);
            let w = 0.5 * (pairs[i].1 + pairs[j].1);
            nodes[i] = -x;
            nodes[j] = x;
            weights[i] = w;
            weights[j] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.on_interval(a, b).map(|(x, w)| w * f(x)).sum()
    }

    pub fn integrate_complex<F: FnMut(f64) -> Complex64>(
        &self,
        a: f64,
        b: f64,
        mut f: F,
    ) -> Complex64 {
        self.on_interval(a, b).map(|(x, w)| f(x) * w).sum()
    }
}

/// Tensor-product Gauss-Legendre grid over the square `[-h, h]²`.
#[derive(Debug, Clone)]
pub struct SquareGrid {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SquareGrid {
    pub fn new(order: usize, half_width: f64) -> Self {
        let rule = GaussLegendreRule::new(order);
        let (points, weights) = rule.on_interval(-half_width, half_width).unzip();
        Self { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the node mirrored through the origin.
    #[inline]
    pub fn mirror_index(&self, i: usize) -> usize {
        self.points.len() - 1 - i
    }

    /// `∬ f(x, y) dx dy` over the grid.
    pub fn integrate<F: FnMut(f64, f64) -> f64>(&self, mut f: F) -> f64 {
        let mut total = 0.0;
        for (&y, &wy) in self.points.iter().zip(&self.weights) {
            for (&x, &wx) in self.points.iter().zip(&self.weights) {
                total += wx * wy * f(x, y);
            }
        }
        total
    }
}
