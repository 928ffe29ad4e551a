use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;

use crate::{Error, Result};

/// Strictly increasing nodes `a = x_0 < … < x_m = b`, `m ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    nodes: Vec<f64>,
}

impl Grid1D {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 nodes, got {}", nodes.len())));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidGrid("non-finite node".into()));
        }
        if let Some(w) = nodes.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidGrid(format!("nodes not increasing at {} / {}", w[0], w[1])));
        }
        Ok(Self { nodes })
    }

    pub fn uniform(a: f64, b: f64, cells: usize) -> Result<Self> {
        if !(a < b) {
            return Err(Error::InvalidGrid(format!("empty interval ({a}, {b})")));
        }
        let mut nodes: Vec<f64> = (0..=cells)
            .map(|i| a + (b - a) * i as f64 / cells as f64)
            .collect();
        if let Some(last) = nodes.last_mut() {
            *last = b;
        }
        Self::new(nodes)
    }

    /// Uniform grid with `cells` cells that also contains every point of
    /// `extra` lying strictly inside `(a, b)`.
    pub fn uniform_with(a: f64, b: f64, cells: usize, extra: &[f64]) -> Result<Self> {
        let g = Self::uniform(a, b, cells)?;
        g.with_nodes(extra)
    }

    /// Graded grid: spacing `fine` within `band` of every
    /// centre, at most `coarse` elsewhere, always keeping the nodes of `self`.
    pub fn graded(&self, centres: &[f64], band: f64, fine: f64, coarse: f64) -> Result<Self> {
        let mut out: Vec<f64> = Vec::new();
        for w in self.nodes.windows(2) {
            let (x0, x1) = (w[0], w[1]);
            let mut cuts: Vec<f64> = Vec::new();
            for &c in centres {
                for z in [c - band, c + band] {
                    if z > x0 && z < x1 {
                        cuts.push(z);
                    }
                }
            }
            cuts.push(x0);
            cuts.push(x1);
            cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for seg in cuts.windows(2) {
                let (s0, s1) = (seg[0], seg[1]);
                let mid = 0.5 * (s0 + s1);
                let near = centres.iter().any(|&c| (mid - c).abs() < band);
                let width = if near { fine } else { coarse };
                let n = ((s1 - s0) / width).ceil().max(1.0) as usize;
                for i in 0..n {
                    out.push(s0 + (s1 - s0) * i as f64 / n as f64);
                }
            }
        }
        out.push(self.b());
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
        Self::new(out)
    }

    pub fn with_nodes(&self, extra: &[f64]) -> Result<Self> {
        let (a, b) = (self.a(), self.b());
        let tol = 1e-12 * (b - a);
        let mut nodes = self.nodes.clone();
        for &x in extra {
            if x > a && x < b && !nodes.iter().any(|&y| (y - x).abs() <= tol) {
                nodes.push(x);
            }
        }
        nodes.sort_by(|p, q| p.partial_cmp(q).unwrap());
        Self::new(nodes)
    }

    /// Every cell split into `k` equal parts.
    pub fn refined(&self, k: usize) -> Self {
        let k = k.max(1);
        let mut nodes = Vec::with_capacity(self.cells() * k + 1);
        for w in self.nodes.windows(2) {
            for i in 0..k {
                nodes.push(w[0] + (w[1] - w[0]) * i as f64 / k as f64);
            }
        }
        nodes.push(self.b());
        Self { nodes }
    }

    pub fn a(&self) -> f64 {
        self.nodes[0]
    }

    pub fn b(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn len(&self) -> f64 {
        self.b() - self.a()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of cells `m`.
    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn cell(&self, i: usize) -> (f64, f64) {
        (self.nodes[i], self.nodes[i + 1])
    }

    pub fn max_width(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Index of the node at `x`, tolerance `1e-12 (b - a)`.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let tol = 1e-12 * self.len();
        let i = self.nodes.partition_point(|&y| y < x - tol);
        (i < self.nodes.len() && (self.nodes[i] - x).abs() <= tol).then_some(i)
    }

    /// Cell containing `x` with right-continuous convention; `b` maps to the
    /// last cell. Points outside are clamped.
    pub fn locate(&self, x: f64) -> usize {
        let i = self.nodes.partition_point(|&y| y <= x);
        i.saturating_sub(1).min(self.cells() - 1)
    }

    /// Whether every node of `other` is also a node of `self`.
    pub fn refines(&self, other: &Grid1D) -> bool {
        other.nodes.iter().all(|&x| self.node_index(x).is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_nodes() {
        assert!(Grid1D::new(alloc::vec![0.0, 1.0]).is_err());
        assert!(Grid1D::new(alloc::vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(Grid1D::uniform(1.0, 0.0, 4).is_err());
    }

    #[test]
    fn locate_and_node_index() {
        let g = Grid1D::uniform(0.0, 1.0, 4).unwrap();
        assert_eq!(g.locate(0.0), 0);
        assert_eq!(g.locate(0.25), 1);
        assert_eq!(g.locate(1.0), 3);
        assert_eq!(g.node_index(0.5), Some(2));
        assert_eq!(g.node_index(0.3), None);
    }

    #[test]
    fn graded_keeps_original_nodes() {
        let g = Grid1D::uniform(0.0, 1.0, 2).unwrap();
        let f = g.graded(&[0.5], 0.05, 0.01, 0.1).unwrap();
        assert!(f.refines(&g));
        assert!(f.max_width() <= 0.1 + 1e-12);
        let near: Vec<f64> = f.nodes().windows(2).filter(|w| (w[0] - 0.5).abs() < 0.04).map(|w| w[1] - w[0]).collect();
        assert!(near.iter().all(|&w| w <= 0.01 + 1e-12));
    }
}
