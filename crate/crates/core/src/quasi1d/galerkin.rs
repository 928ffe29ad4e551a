//! P1 Galerkin discretization of the 1D form
//!
//! ```text
//! a(y, φ) = (y', φ') - (u y, φ') - (u y', φ) + α y(a)φ̄(a) - β y(b)φ̄(b)
//! ```
//!
//! obtained from `(l(y), φ)` by one integration by parts; the boundary
//! term `-y1 φ̄ |_a^b` is where the third-kind data enter.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::boundary::BoundaryCondition1D;
use super::spectrum::{Eigenfunction1D, Engine, Spectrum1D};
use crate::femnd::{lowest_eigenpairs, nodal_values, AssembledForms, Space};
use crate::numerics::{cluster_groups, CsrMatrix, QuadratureRule};
use crate::potentials::{Grid1D, Primitive1D};
use crate::{Error, Result, C64};

fn space_of(bc: &BoundaryCondition1D) -> Space {
    match *bc {
        BoundaryCondition1D::Dirichlet => Space::Dirichlet,
        BoundaryCondition1D::GeneralizedNeumann => Space::Neumann,
        BoundaryCondition1D::ThirdKind { alpha, beta } => Space::ThirdKind { alpha, beta },
        BoundaryCondition1D::QuasiPeriodic { theta } => Space::QuasiPeriodic { theta },
    }
}

fn node_map(m: usize, bc: &BoundaryCondition1D) -> Vec<Option<(usize, C64)>> {
    let one = C64::one();
    (0..=m)
        .map(|i| match *bc {
            BoundaryCondition1D::Dirichlet => (i > 0 && i < m).then(|| (i - 1, one)),
            BoundaryCondition1D::QuasiPeriodic { theta } if i == m => Some((0, C64::from_polar(1.0, -theta))),
            _ => Some((i, one)),
        })
        .collect()
}

/// `(∫ u φ_0, ∫ u φ_1)` over the element `[x0, x1]`, split at the
/// primitive's nodes so each piece is polynomial.
fn element_moments(u: &Primitive1D, x0: f64, x1: f64, rule: &QuadratureRule) -> [C64; 2] {
    let h = x1 - x0;
    let g = u.grid();
    let mut cuts = vec![x0];
    cuts.extend(g.nodes().iter().copied().filter(|&x| x > x0 && x < x1));
    cuts.push(x1);
    let mut m = [C64::zero(); 2];
    for w in cuts.windows(2) {
        let (p0, p1) = (w[0], w[1]);
        let cell = g.locate(0.5 * (p0 + p1));
        let len = p1 - p0;
        for (pt, wt) in rule.points.iter().zip(&rule.weights) {
            let x = p0 + len * pt[0];
            let v = u.eval_in_cell(cell, x) * (wt * len);
            m[0] += v * ((x1 - x) / h);
            m[1] += v * ((x - x0) / h);
        }
    }
    m
}

/// Galerkin matrices on `mesh`: `A` (stiffness), `B` (potential and
/// boundary terms) and `M` (mass). Jump sites of `u` must be mesh nodes.
pub fn galerkin_1d(u: &Primitive1D, bc: &BoundaryCondition1D, mesh: &Grid1D) -> Result<AssembledForms> {
    let scale = mesh.len();
    if (mesh.a() - u.a()).abs() > 1e-12 * scale || (mesh.b() - u.b()).abs() > 1e-12 * scale {
        return Err(Error::Quasi("mesh and potential intervals differ".into()));
    }
    for j in u.jumps() {
        if mesh.node_index(j.site).is_none() {
            return Err(Error::MeshMissingSite(j.site));
        }
    }
    let m = mesh.cells();
    let map = node_map(m, bc);
    let n = map.iter().flatten().map(|(k, _)| k + 1).max().unwrap_or(0);
    if n == 0 {
        return Err(Error::Quasi("mesh has no unknowns".into()));
    }
    let rule = QuadratureRule::gauss_legendre(3);
    let mut ta = Vec::with_capacity(4 * m);
    let mut tb = Vec::with_capacity(4 * m);
    let mut tm = Vec::with_capacity(4 * m);
    for e in 0..m {
        let (x0, x1) = mesh.cell(e);
        let h = x1 - x0;
        let d = [-1.0 / h, 1.0 / h];
        let mom = element_moments(u, x0, x1, &rule);
        for p in 0..2 {
            let Some((gi, ci)) = map[e + p] else { continue };
            for q in 0..2 {
                let Some((gj, cj)) = map[e + q] else { continue };
                let c = ci.conj() * cj;
                let k = d[p] * d[q] * h;
                let mass = if p == q { h / 3.0 } else { h / 6.0 };
                let b = -(mom[q] * d[p] + mom[p] * d[q]);
                ta.push((gi, gj, c * k));
                tm.push((gi, gj, c * mass));
                tb.push((gi, gj, c * b));
            }
        }
    }
    if let BoundaryCondition1D::ThirdKind { alpha, beta } = *bc {
        tb.push((0, 0, alpha));
        tb.push((m, m, -beta));
    }
    let space = space_of(bc);
    Ok(AssembledForms {
        stiffness: CsrMatrix::from_triplets(n, ta),
        mass: CsrMatrix::from_triplets(n, tm),
        singular: CsrMatrix::from_triplets(n, tb),
        space,
        node_map: map,
    })
}

/// Galerkin eigenvalues with nodal eigenfunctions; `y1` at a node is the
/// mean of the adjacent element slopes minus `u y` (right limit of `u`).
pub fn galerkin_eigenvalues(u: &Primitive1D, bc: &BoundaryCondition1D, mesh: &Grid1D, count: usize) -> Result<Spectrum1D> {
    let forms = galerkin_1d(u, bc, mesh)?;
    let s = lowest_eigenpairs(&forms, count)?;
    let x = mesh.nodes().to_vec();
    let eigenfunctions = (0..s.eigenvalues.len())
        .map(|j| {
            let y = nodal_values(&forms, &s, j);
            let last = x.len() - 1;
            let y1 = (0..x.len())
                .map(|i| {
                    let slope = |e: usize| (y[e + 1] - y[e]) / (x[e + 1] - x[e]);
                    let dy = match i {
                        0 => slope(0),
                        _ if i == last => slope(last - 1),
                        _ => (slope(i - 1) + slope(i)) * 0.5,
                    };
                    dy - u.eval(x[i]) * y[i]
                })
                .collect();
            Eigenfunction1D { x: x.clone(), y, y1 }
        })
        .collect();
    Ok(Spectrum1D {
        clusters: cluster_groups(&s.eigenvalues),
        refined: vec![false; s.eigenvalues.len()],
        site_checks: vec![Vec::new(); s.eigenvalues.len()],
        eigenvalues: s.eigenvalues,
        eigenfunctions,
        residuals: s.residuals,
        engine: Engine::Galerkin,
    })
}
