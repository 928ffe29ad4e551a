use alloc::vec::Vec;

use num_traits::{Float, Zero};

use super::Grid1D;
use crate::numerics::QuadratureRule;
use crate::{Error, Result, C64};

/// Polynomial `c_0 + c_1 x + c_2 x² + …` in the global coordinate.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    pub coeffs: Vec<C64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Self { coeffs }
    }

    pub fn real(coeffs: &[f64]) -> Self {
        Self { coeffs: coeffs.iter().map(|&c| C64::new(c, 0.0)).collect() }
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::zero(), |acc, &c| acc * x + c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| !c.is_zero())
            .unwrap_or(0)
    }
}

/// A delta mass of `q`: the primitive jumps by `height` at the grid node
/// `node` located at `site`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub site: f64,
    pub node: usize,
    pub height: C64,
}

/// Piecewise-quadratic primitive `u` on a grid, `q = u'` in the sense of
/// distributions.
///
/// On cell `i` the primitive is `c0 + c1 t + c2 t²` with `t = x - x_i`.
/// Discontinuities sit on grid nodes and are listed in `jumps`.
#[derive(Debug, Clone, PartialEq)]
pub struct Primitive1D {
    grid: Grid1D,
    cells: Vec<[C64; 3]>,
    jumps: Vec<Jump>,
}

fn poly(c: &[C64; 3], t: f64) -> C64 {
    c[0] + (c[1] + c[2] * t) * t
}

impl Primitive1D {
    pub fn zero(grid: Grid1D) -> Self {
        let cells = alloc::vec![[C64::zero(); 3]; grid.cells()];
        Self { grid, cells, jumps: Vec::new() }
    }

    /// Builds the primitive from per-cell local coefficients; jumps are
    /// detected at interior nodes where the one-sided values differ.
    pub fn from_cells(grid: Grid1D, cells: Vec<[C64; 3]>) -> Result<Self> {
        if cells.len() != grid.cells() {
            return Err(Error::Potential("cell count does not match the grid".into()));
        }
        if cells.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Potential("non-finite cell coefficient".into()));
        }
        let scale = cells
            .iter()
            .map(|c| c[0].norm())
            .fold(1.0, f64::max);
        let mut jumps = Vec::new();
        for node in 1..grid.cells() {
            let (x0, x1) = grid.cell(node - 1);
            let left = poly(&cells[node - 1], x1 - x0);
            let right = cells[node][0];
            let d = right - left;
            if d.norm() > 1e-12 * scale {
                jumps.push(Jump { site: grid.nodes()[node], node, height: d });
            }
        }
        Ok(Self { grid, cells, jumps })
    }

    /// Quadratic interpolation of `f` at both ends and the midpoint of each
    /// cell. Exact for quadratics.
    pub fn interpolate<F: Fn(f64) -> C64>(grid: Grid1D, f: F) -> Result<Self> {
        let cells = (0..grid.cells())
            .map(|i| {
                let (x0, x1) = grid.cell(i);
                quad_fit(f(x0), f(0.5 * (x0 + x1)), f(x1), x1 - x0)
            })
            .collect();
        Self::from_cells(grid, cells)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn cells(&self) -> &[[C64; 3]] {
        &self.cells
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn a(&self) -> f64 {
        self.grid.a()
    }

    pub fn b(&self) -> f64 {
        self.grid.b()
    }

    /// `u(x)` using the cell to the right of a node (the last cell at `b`).
    pub fn eval(&self, x: f64) -> C64 {
        let i = self.grid.locate(x);
        poly(&self.cells[i], x - self.grid.nodes()[i])
    }

    pub fn eval_in_cell(&self, cell: usize, x: f64) -> C64 {
        poly(&self.cells[cell], x - self.grid.nodes()[cell])
    }

    /// One-sided limits `(u(x-), u(x+))`; at the endpoints both equal the
    /// interior limit.
    pub fn one_sided(&self, x: f64) -> (C64, C64) {
        match self.grid.node_index(x) {
            Some(0) => {
                let v = self.eval_in_cell(0, self.a());
                (v, v)
            }
            Some(i) if i == self.grid.cells() => {
                let v = self.eval_in_cell(i - 1, self.b());
                (v, v)
            }
            Some(i) => (self.eval_in_cell(i - 1, x), self.eval_in_cell(i, x)),
            None => {
                let v = self.eval(x);
                (v, v)
            }
        }
    }

    /// `u'` inside a cell.
    pub fn derivative_in_cell(&self, cell: usize, x: f64) -> C64 {
        let c = &self.cells[cell];
        c[1] + c[2] * (2.0 * (x - self.grid.nodes()[cell]))
    }

    pub fn is_real(&self) -> bool {
        self.cells.iter().flatten().all(|c| c.im == 0.0)
    }

    /// Upper bound of `|u|` from cell end points, vertex and samples.
    pub fn sup_norm(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.grid.cells() {
            let (x0, x1) = self.grid.cell(i);
            for k in 0..=16 {
                let x = x0 + (x1 - x0) * k as f64 / 16.0;
                m = m.max(self.eval_in_cell(i, x).norm());
            }
        }
        m
    }

    /// Maximum oscillation of `u` over a single cell.
    pub fn cell_variation(&self, cell: usize) -> f64 {
        let (x0, x1) = self.grid.cell(cell);
        let c = &self.cells[cell];
        let h = x1 - x0;
        // |u(t) - u(0)| ≤ |c1| h + |c2| h²
        c[1].norm() * h + c[2].norm() * h * h
    }

    /// `∫_a^b u`.
    pub fn integral(&self) -> C64 {
        (0..self.grid.cells())
            .map(|i| {
                let (x0, x1) = self.grid.cell(i);
                let h = x1 - x0;
                let c = &self.cells[i];
                c[0] * h + c[1] * (h * h / 2.0) + c[2] * (h * h * h / 3.0)
            })
            .sum()
    }

    /// `‖u‖_{L2}` integrated exactly (Gauss rule of order 5 per cell).
    pub fn l2_norm(&self) -> f64 {
        let rule = QuadratureRule::gauss_legendre(3);
        (0..self.grid.cells())
            .map(|i| {
                let (x0, x1) = self.grid.cell(i);
                rule.integrate_interval(x0, x1, |x| self.eval_in_cell(i, x).norm_sqr())
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, c: C64) -> Self {
        let cells = self
            .cells
            .iter()
            .map(|p| [p[0] * c, p[1] * c, p[2] * c])
            .collect();
        let jumps = self
            .jumps
            .iter()
            .filter(|_| !c.is_zero())
            .map(|j| Jump { height: j.height * c, ..*j })
            .collect();
        Self { grid: self.grid.clone(), cells, jumps }
    }

    /// `u + c`; leaves `q = u'` unchanged.
    pub fn shifted(&self, c: C64) -> Self {
        let cells = self.cells.iter().map(|p| [p[0] + c, p[1], p[2]]).collect();
        Self { grid: self.grid.clone(), cells, jumps: self.jumps.clone() }
    }

    /// The same function on a grid that refines the current one.
    pub fn on_grid(&self, grid: &Grid1D) -> Result<Self> {
        if !grid.refines(&self.grid) || grid.a() != self.a() || grid.b() != self.b() {
            return Err(Error::Potential("target grid does not refine the primitive grid".into()));
        }
        let cells = (0..grid.cells())
            .map(|i| {
                let (x0, x1) = grid.cell(i);
                let src = self.grid.locate(0.5 * (x0 + x1));
                let c = &self.cells[src];
                let s = x0 - self.grid.nodes()[src];
                // re-centre c0 + c1 (s + t) + c2 (s + t)²
                [poly(c, s), c[1] + c[2] * (2.0 * s), c[2]]
            })
            .collect();
        Self::from_cells(grid.clone(), cells)
    }

    /// Piecewise-constant panels `(x0, x1, u(mid))` subdividing each cell so
    /// the oscillation of `u` on a panel is at most `max_variation`.
    pub fn panels(&self, max_variation: f64) -> Vec<(f64, f64, C64)> {
        let mut out = Vec::new();
        for i in 0..self.grid.cells() {
            let (x0, x1) = self.grid.cell(i);
            let var = self.cell_variation(i);
            let n = if var <= max_variation {
                1
            } else {
                (var / max_variation).ceil() as usize
            };
            for k in 0..n {
                let a = x0 + (x1 - x0) * k as f64 / n as f64;
                let b = if k + 1 == n { x1 } else { x0 + (x1 - x0) * (k + 1) as f64 / n as f64 };
                out.push((a, b, self.eval_in_cell(i, 0.5 * (a + b))));
            }
        }
        out
    }
}

fn quad_fit(f0: C64, fm: C64, f1: C64, h: f64) -> [C64; 3] {
    let c2 = (f1 - fm * 2.0 + f0) * (2.0 / (h * h));
    let c1 = (fm * 4.0 - f0 * 3.0 - f1) / h;
    [f0, c1, c2]
}

/// Primitive of `base' + Σ strength·δ(x - site)`:
/// `u = base + Σ strength·H(x - site)`.
///
/// `base` is interpolated quadratically on each cell. Zero strengths are
/// ignored.
pub fn primitive_from_deltas<F: Fn(f64) -> C64>(
    base: F,
    deltas: &[(f64, C64)],
    grid: &Grid1D,
) -> Result<Primitive1D> {
    let (a, b) = (grid.a(), grid.b());
    let mut resolved: Vec<(usize, C64)> = Vec::new();
    for &(site, strength) in deltas {
        if !(site > a && site < b) {
            return Err(Error::SiteOutsideInterval { site, a, b });
        }
        let node = grid.node_index(site).ok_or(Error::SiteNotOnGrid(site))?;
        if !strength.is_zero() {
            resolved.push((node, strength));
        }
    }
    let cells = (0..grid.cells())
        .map(|i| {
            let (x0, x1) = grid.cell(i);
            let mut c = quad_fit(base(x0), base(0.5 * (x0 + x1)), base(x1), x1 - x0);
            let step: C64 = resolved
                .iter()
                .filter(|(node, _)| *node <= i)
                .map(|(_, s)| *s)
                .sum();
            c[0] += step;
            c
        })
        .collect();
    let mut p = Primitive1D::from_cells(grid.clone(), cells)?;
    // report the requested strengths exactly, merged per node
    let mut jumps: Vec<Jump> = Vec::new();
    for (node, s) in resolved {
        match jumps.iter_mut().find(|j| j.node == node) {
            Some(j) => j.height += s,
            None => jumps.push(Jump { site: grid.nodes()[node], node, height: s }),
        }
    }
    jumps.retain(|j| !j.height.is_zero());
    jumps.sort_by_key(|j| j.node);
    p.jumps = jumps;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn zero_potential() {
        let g = Grid1D::uniform(0.0, 1.0, 4).unwrap();
        let u = primitive_from_deltas(|_| C64::zero(), &[], &g).unwrap();
        assert!(u.jumps().is_empty());
        assert_eq!(u.sup_norm(), 0.0);
    }

    #[test]
    fn single_step() {
        let g = Grid1D::uniform(0.0, 1.0, 2).unwrap();
        let u = primitive_from_deltas(|_| C64::zero(), &[(0.5, c(10.0))], &g).unwrap();
        assert_eq!(u.jumps(), &[Jump { site: 0.5, node: 1, height: c(10.0) }]);
        assert_eq!(u.eval(0.25), c(0.0));
        assert_eq!(u.eval(0.75), c(10.0));
        let (l, r) = u.one_sided(0.5);
        assert_eq!(r - l, c(10.0));
    }

    #[test]
    fn cumulative_jumps_on_linear_base() {
        let g = Grid1D::uniform(0.0, 1.0, 3).unwrap();
        let u = primitive_from_deltas(|x| c(x), &[(1.0 / 3.0, c(-2.0)), (2.0 / 3.0, c(5.0))], &g).unwrap();
        for (x, want) in [(0.1, 0.1), (0.5, 0.5 - 2.0), (0.9, 0.9 + 3.0)] {
            assert!((u.eval(x) - c(want)).norm() < 1e-14, "{x}");
        }
        assert_eq!(u.jumps().len(), 2);
    }

    #[test]
    fn site_errors() {
        let g = Grid1D::uniform(0.0, 1.0, 4).unwrap();
        assert!(matches!(
            primitive_from_deltas(|_| C64::zero(), &[(1.0, c(1.0))], &g),
            Err(Error::SiteOutsideInterval { .. })
        ));
        assert_eq!(
            primitive_from_deltas(|_| C64::zero(), &[(0.3, c(1.0))], &g),
            Err(Error::SiteNotOnGrid(0.3))
        );
    }

    #[test]
    fn step_l2_norm_closed_form() {
        let g = Grid1D::uniform(0.0, 1.0, 2).unwrap();
        let u = primitive_from_deltas(|_| C64::zero(), &[(0.5, c(1.0))], &g).unwrap();
        assert!((u.l2_norm() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn on_grid_preserves_values() {
        let g = Grid1D::uniform(0.0, 2.0, 2).unwrap();
        let u = Primitive1D::interpolate(g.clone(), |x| C64::new(x * x - 1.0, 0.5 * x)).unwrap();
        let fine = g.refined(3);
        let v = u.on_grid(&fine).unwrap();
        for k in 0..=40 {
            let x = 2.0 * k as f64 / 40.0;
            assert!((u.eval(x) - v.eval(x)).norm() < 1e-13);
        }
        assert!(v.jumps().is_empty());
    }

    #[test]
    fn panels_bound_variation() {
        let g = Grid1D::uniform(0.0, 1.0, 2).unwrap();
        let u = Primitive1D::interpolate(g, |x| c(3.0 * x)).unwrap();
        let p = u.panels(1e-3);
        assert!(p.len() >= 3000);
        for w in p.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
    }
}
