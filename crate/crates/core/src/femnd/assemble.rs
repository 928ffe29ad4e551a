use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Float, Zero};

use super::mesh::cross;
use super::{AssembledForms, Mesh2D, Space, SpectrumND};
use crate::numerics::{CsrMatrix, QuadratureRule};
use crate::potentials::VectorField;
use crate::{Error, Result, C64};

/// Relative agreement between successive refinement levels near a site.
pub const SINGULAR_TOL: f64 = 1e-6;
/// Refinement levels allowed before giving up. Children shrink by 2 per
/// level, so this stays well clear of coordinate roundoff.
pub const MAX_SINGULAR_LEVELS: usize = 32;

/// `∫_T V φ_l` for the three hat functions of a triangle, as `[l][axis]`.
type Moments = [[C64; 2]; 3];

fn add(a: &mut Moments, b: &Moments) {
    for l in 0..3 {
        for d in 0..2 {
            a[l][d] += b[l][d];
        }
    }
}

fn moments_norm(m: &Moments) -> f64 {
    m.iter().flatten().fold(0.0f64, |s, z| s.max(z.norm()))
}

/// Affine data of a parent triangle: barycentric coordinates of any point.
struct Parent {
    p0: [f64; 2],
    inv: [[f64; 2]; 2],
}

impl Parent {
    fn new(p: [[f64; 2]; 3]) -> Self {
        let (a, b, c, d) = (p[1][0] - p[0][0], p[2][0] - p[0][0], p[1][1] - p[0][1], p[2][1] - p[0][1]);
        let det = a * d - b * c;
        Self { p0: p[0], inv: [[d / det, -b / det], [-c / det, a / det]] }
    }

    fn bary(&self, x: [f64; 2]) -> [f64; 3] {
        let (dx, dy) = (x[0] - self.p0[0], x[1] - self.p0[1]);
        let xi = self.inv[0][0] * dx + self.inv[0][1] * dy;
        let eta = self.inv[1][0] * dx + self.inv[1][1] * dy;
        [1.0 - xi - eta, xi, eta]
    }
}

fn rule_moments(v: &VectorField, parent: &Parent, q: [[f64; 2]; 3], rule: &QuadratureRule) -> Moments {
    let jac = cross(q[0], q[1], q[2]);
    let mut m = [[C64::zero(); 2]; 3];
    for (pt, &w) in rule.points.iter().zip(&rule.weights) {
        let x = [
            q[0][0] + pt[0] * (q[1][0] - q[0][0]) + pt[1] * (q[2][0] - q[0][0]),
            q[0][1] + pt[0] * (q[1][1] - q[0][1]) + pt[1] * (q[2][1] - q[0][1]),
        ];
        let val = v.eval(&x);
        if !(val[0].norm().is_finite() && val[1].norm().is_finite()) {
            continue;
        }
        let phi = parent.bary(x);
        for l in 0..3 {
            for d in 0..2 {
                m[l][d] += val[d] * (w * jac * phi[l]);
            }
        }
    }
    m
}

fn contains(q: &[[f64; 2]; 3], s: [f64; 2]) -> bool {
    let scale = cross(q[0], q[1], q[2]).abs();
    let tol = -1e-12 * scale;
    cross(q[0], q[1], s) >= tol && cross(q[1], q[2], s) >= tol && cross(q[2], q[0], s) >= tol
}

fn split(q: [[f64; 2]; 3]) -> [[[f64; 2]; 3]; 4] {
    let mid = |a: [f64; 2], b: [f64; 2]| [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    let (ab, bc, ca) = (mid(q[0], q[1]), mid(q[1], q[2]), mid(q[2], q[0]));
    [[q[0], ab, ca], [ab, q[1], bc], [ca, bc, q[2]], [ab, bc, ca]]
}

/// Moments over one mesh triangle, refining dyadically toward any site it
/// contains until two successive levels agree entrywise.
fn triangle_moments(v: &VectorField, p: [[f64; 2]; 3], sites: &[[f64; 2]], rule: &QuadratureRule) -> Result<Moments> {
    let parent = Parent::new(p);
    let hits: Vec<[f64; 2]> = sites.iter().copied().filter(|&s| contains(&p, s)).collect();
    if hits.is_empty() {
        return Ok(rule_moments(v, &parent, p, rule));
    }
    let touches = |q: &[[f64; 2]; 3]| hits.iter().any(|&s| contains(q, s));
    let mut settled = [[C64::zero(); 2]; 3];
    let mut active = vec![p];
    let mut previous = rule_moments(v, &parent, p, rule);
    for _ in 0..MAX_SINGULAR_LEVELS {
        let mut next = Vec::new();
        for q in active {
            for child in split(q) {
                if touches(&child) {
                    next.push(child);
                } else {
                    add(&mut settled, &rule_moments(v, &parent, child, rule));
                }
            }
        }
        active = next;
        let mut estimate = settled;
        for &q in &active {
            add(&mut estimate, &rule_moments(v, &parent, q, rule));
        }
        let floor = SINGULAR_TOL * moments_norm(&estimate);
        let agreed = (0..3).all(|l| {
            (0..2).all(|d| (estimate[l][d] - previous[l][d]).norm() <= SINGULAR_TOL * estimate[l][d].norm().max(floor))
        });
        if agreed {
            return Ok(estimate);
        }
        previous = estimate;
    }
    Err(Error::RefinementExceeded)
}

fn gradients(p: [[f64; 2]; 3]) -> [[f64; 2]; 3] {
    let det = cross(p[0], p[1], p[2]);
    let mut g = [[0.0; 2]; 3];
    for l in 0..3 {
        let (b, c) = (p[(l + 1) % 3], p[(l + 2) % 3]);
        g[l] = [(b[1] - c[1]) / det, (c[0] - b[0]) / det];
    }
    g
}

/// P1 Galerkin matrices of `∫∇f·∇φ̄ - ∫(V·∇f)φ̄ - ∫f V·∇φ̄` and the mass
/// matrix on `mesh`.
///
/// Integrating the last term by parts shows the form belongs to
/// `-Δ + div V`, for complex `V` as well. Triangles containing a singular
/// site of `V` are refined toward it.
pub fn assemble_forms(mesh: &Mesh2D, v: Option<&VectorField>, space: Space) -> Result<AssembledForms> {
    if let Some(f) = v {
        if f.dim() != 2 {
            return Err(Error::Fem("2D assembly needs a 2D field".into()));
        }
    }
    let mut next = 0usize;
    let node_map: Vec<Option<(usize, C64)>> = match space {
        Space::Dirichlet => mesh
            .boundary
            .iter()
            .map(|&b| {
                (!b).then(|| {
                    next += 1;
                    (next - 1, C64::new(1.0, 0.0))
                })
            })
            .collect(),
        Space::Neumann => (0..mesh.vertices.len()).map(|k| Some((k, C64::new(1.0, 0.0)))).collect(),
        _ => return Err(Error::Fem("2D assembly supports Dirichlet and Neumann spaces".into())),
    };
    let n = node_map.iter().flatten().count();
    let rule = QuadratureRule::triangle_7();
    let sites: Vec<[f64; 2]> = v.map(|f| f.singular_sites().iter().map(|s| [s[0], s[1]]).collect()).unwrap_or_default();

    let cap = 9 * mesh.triangles.len();
    let (mut ta, mut tm, mut tb) = (Vec::with_capacity(cap), Vec::with_capacity(cap), Vec::new());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let p = mesh.corners(t);
        let area = mesh.triangle_area(t);
        let g = gradients(p);
        let w = match v {
            Some(f) => Some(triangle_moments(f, p, &sites, &rule)?),
            None => None,
        };
        for i in 0..3 {
            let Some((ri, _)) = node_map[tri[i]] else { continue };
            for j in 0..3 {
                let Some((rj, _)) = node_map[tri[j]] else { continue };
                let k = area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                let m = area / if i == j { 6.0 } else { 12.0 };
                ta.push((ri, rj, C64::new(k, 0.0)));
                tm.push((ri, rj, C64::new(m, 0.0)));
                if let Some(w) = &w {
                    // two separate dot products keep (i, j) and (j, i) bitwise equal
                    let wi_gj = w[i][0] * g[j][0] + w[i][1] * g[j][1];
                    let wj_gi = w[j][0] * g[i][0] + w[j][1] * g[i][1];
                    let b = -(wi_gj + wj_gi);
                    tb.push((ri, rj, b));
                }
            }
        }
    }
    Ok(AssembledForms {
        stiffness: CsrMatrix::from_triplets(n, ta),
        mass: CsrMatrix::from_triplets(n, tm),
        singular: CsrMatrix::from_triplets(n, tb),
        space,
        node_map,
    })
}

/// `∫_∂Ω |(∇f - V f)·n| ds` for eigenfunction `j`, normalized to unit
/// `L_2` norm.
pub fn boundary_flux(
    mesh: &Mesh2D,
    forms: &AssembledForms,
    spectrum: &SpectrumND,
    j: usize,
    v: Option<&VectorField>,
) -> Result<f64> {
    if forms.space != Space::Neumann {
        return Err(Error::WrongSpace);
    }
    let coeffs: Vec<C64> = spectrum.vectors.column(j).iter().copied().collect();
    let mv = forms.mass.mul_vec(&coeffs);
    let norm = coeffs.iter().zip(&mv).map(|(a, b)| (a.conj() * b).re).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Ok(0.0);
    }
    let f: Vec<C64> = forms.expand(&coeffs).into_iter().map(|z| z / norm).collect();
    let rule = QuadratureRule::gauss_legendre(4);
    let mut total = 0.0;
    for (a, b, t) in mesh.boundary_edges() {
        let tri = mesh.triangles[t];
        let g = gradients(mesh.corners(t));
        let mut grad = [C64::zero(); 2];
        for l in 0..3 {
            for d in 0..2 {
                grad[d] += f[tri[l]] * g[l][d];
            }
        }
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        let (dx, dy) = (pb[0] - pa[0], pb[1] - pa[1]);
        let len = dx.hypot(dy);
        let normal = [dy / len, -dx / len];
        let gn = grad[0] * normal[0] + grad[1] * normal[1];
        let Some(field) = v else {
            total += gn.norm() * len;
            continue;
        };
        for (pt, &w) in rule.points.iter().zip(&rule.weights) {
            let s = pt[0];
            let x = [pa[0] + s * dx, pa[1] + s * dy];
            let fx = f[a] * (1.0 - s) + f[b] * s;
            let val = field.eval(&x);
            let vn = val[0] * normal[0] + val[1] * normal[1];
            let r = (gn - vn * fx).norm();
            if r.is_finite() {
                total += w * len * r;
            }
        }
    }
    Ok(total)
}

/// Fills `spectrum.flux` for every eigenpair.
pub fn attach_flux(mesh: &Mesh2D, forms: &AssembledForms, spectrum: &mut SpectrumND, v: Option<&VectorField>) -> Result<()> {
    let flux = (0..spectrum.eigenvalues.len())
        .map(|j| boundary_flux(mesh, forms, spectrum, j, v))
        .collect::<Result<Vec<_>>>()?;
    spectrum.flux = flux;
    Ok(())
}
