use alloc::vec::Vec;

use num_traits::Zero;

use crate::numerics::CsrMatrix;
use crate::C64;

/// Which nodal values are unknowns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Space {
    /// Boundary values eliminated (set to zero).
    Dirichlet,
    /// All nodes kept; the boundary condition is natural.
    Neumann,
    /// 1D: all nodes kept, boundary terms `α y(a)φ̄(a) - β y(b)φ̄(b)` in `B`.
    ThirdKind { alpha: C64, beta: C64 },
    /// 1D: the last node is identified with the first, `y(b) = e^{-iθ} y(a)`.
    QuasiPeriodic { theta: f64 },
}

/// Galerkin matrices of the form `a(f, φ) = (∇f, ∇φ) + b(f, φ)`.
///
/// `stiffness` is the Laplacian part, `singular` the potential part
/// (including 1D boundary terms), `mass` the Gram matrix. Rows and
/// columns are indexed by unknowns; `node_map` relates them to mesh nodes.
#[derive(Debug, Clone)]
pub struct AssembledForms {
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    pub singular: CsrMatrix,
    pub space: Space,
    /// Per mesh node: `Some((unknown, c))` when the nodal value is
    /// `c · x[unknown]`, `None` when it is fixed to zero.
    pub node_map: Vec<Option<(usize, C64)>>,
}

impl AssembledForms {
    /// Number of unknowns.
    pub fn dim(&self) -> usize {
        self.stiffness.dim()
    }

    /// `A + B`.
    pub fn total(&self) -> CsrMatrix {
        self.stiffness.combine(C64::new(1.0, 0.0), &self.singular, C64::new(1.0, 0.0))
    }

    /// Nodal values from a coefficient vector.
    pub fn expand(&self, coeffs: &[C64]) -> Vec<C64> {
        self.node_map
            .iter()
            .map(|m| match m {
                Some((k, c)) => coeffs[*k] * c,
                None => C64::zero(),
            })
            .collect()
    }

    /// Stored `(row, col)` pairs of `A`.
    pub fn pattern(&self) -> Vec<(usize, usize)> {
        self.stiffness.pattern().collect()
    }

    /// Whether every stored entry of `B` is also stored in `A`.
    pub fn singular_pattern_contained(&self) -> bool {
        self.singular.pattern().all(|(i, j)| self.stiffness.row(i).any(|(c, _)| c == j))
    }
}
