//! Smooth approximants by convolution with a scaled C^∞ bump kernel.
//!
//! In 1D the primitive is extended by even reflection across both
//! endpoints before convolving, which keeps `∫ u_h = ∫ u` exactly.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::{Float, Zero};

use super::field::Repr;
use super::{lp_distance_field, Domain, Grid1D, Primitive1D, QuadratureSpec, VectorField};
use crate::numerics::quadrature::gauss_legendre_nodes;
use crate::{Error, Result, C64};

/// `∫_{-1}^{1} exp(-1/(1-t²)) dt`.
pub const BUMP_MASS: f64 = 0.443_993_816_168_079_44;

/// Unit-mass bump kernel supported on `(-1, 1)`.
pub fn bump(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp() / BUMP_MASS
    } else {
        0.0
    }
}

/// Uniform panels on `[-1, 1]`; the essential zeros at `±1` need about 32
/// panels of 12 points for 1e-13 accuracy.
const KERNEL_PANELS: usize = 32;
const KERNEL_POINTS: usize = 12;

/// Composite Gauss nodes/weights for `∫_{-1}^{1} ρ(s) g(s) ds` with extra
/// breakpoints.
fn kernel_rule(extra: &mut Vec<f64>, gl: &(Vec<f64>, Vec<f64>), out: &mut Vec<(f64, f64)>) {
    extra.extend((0..=KERNEL_PANELS).map(|k| -1.0 + 2.0 * k as f64 / KERNEL_PANELS as f64));
    extra.retain(|s| (-1.0..=1.0).contains(s));
    extra.sort_by(|a, b| a.partial_cmp(b).unwrap());
    extra.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    out.clear();
    for w in extra.windows(2) {
        let (s0, s1) = (w[0], w[1]);
        let half = 0.5 * (s1 - s0);
        for (x, wt) in gl.0.iter().zip(&gl.1) {
            let s = s0 + half * (x + 1.0);
            out.push((s, half * wt * bump(s)));
        }
    }
}

/// `ρ_h * ũ` where `ũ` is the even reflection of a primitive.
#[derive(Debug, Clone, PartialEq)]
pub struct MollifiedPrimitive {
    base: Primitive1D,
    h: f64,
}

impl MollifiedPrimitive {
    pub fn base(&self) -> &Primitive1D {
        &self.base
    }

    pub fn scale(&self) -> f64 {
        self.h
    }

    fn reflected(&self, y: f64) -> C64 {
        let (a, b) = (self.base.a(), self.base.b());
        let y = if y < a {
            2.0 * a - y
        } else if y > b {
            2.0 * b - y
        } else {
            y
        };
        self.base.eval(y)
    }

    pub fn eval(&self, x: f64) -> C64 {
        let gl = gauss_legendre_nodes(KERNEL_POINTS);
        let mut bps = Vec::new();
        let mut rule = Vec::new();
        self.eval_with(x, &gl, &mut bps, &mut rule)
    }

    fn eval_with(
        &self,
        x: f64,
        gl: &(Vec<f64>, Vec<f64>),
        bps: &mut Vec<f64>,
        rule: &mut Vec<(f64, f64)>,
    ) -> C64 {
        let (a, b) = (self.base.a(), self.base.b());
        let h = self.h;
        bps.clear();
        for &y in self.base.grid().nodes() {
            for z in [y, 2.0 * a - y, 2.0 * b - y] {
                let s = (x - z) / h;
                if s > -1.0 && s < 1.0 {
                    bps.push(s);
                }
            }
        }
        kernel_rule(bps, gl, rule);
        rule.iter()
            .map(|&(s, w)| self.reflected(x - h * s) * w)
            .sum()
    }

    /// Values at many points, sharing quadrature buffers.
    pub fn eval_many(&self, xs: &[f64]) -> Vec<C64> {
        let gl = gauss_legendre_nodes(KERNEL_POINTS);
        let mut bps = Vec::new();
        let mut rule = Vec::new();
        xs.iter().map(|&x| self.eval_with(x, &gl, &mut bps, &mut rule)).collect()
    }

    /// Grid resolving the smoothing layers: spacing `h/16` within `1.5h` of
    /// every jump and endpoint.
    pub fn default_grid(&self) -> Result<Grid1D> {
        let g = self.base.grid();
        let mut centres: Vec<f64> = self.base.jumps().iter().map(|j| j.site).collect();
        centres.push(g.a());
        centres.push(g.b());
        let coarse = g.max_width().min(g.len() / 64.0);
        g.graded(&centres, 1.5 * self.h, self.h / 16.0, coarse)
    }

    /// Piecewise-quadratic interpolant on `grid` (a smooth primitive with
    /// no jumps).
    pub fn to_primitive(&self, grid: &Grid1D) -> Result<Primitive1D> {
        let mut xs = Vec::with_capacity(2 * grid.cells() + 1);
        for i in 0..grid.cells() {
            let (x0, x1) = grid.cell(i);
            xs.push(x0);
            xs.push(0.5 * (x0 + x1));
        }
        xs.push(grid.b());
        let v = self.eval_many(&xs);
        let cells = (0..grid.cells())
            .map(|i| {
                let (x0, x1) = grid.cell(i);
                let hh = x1 - x0;
                let (f0, fm, f1) = (v[2 * i], v[2 * i + 1], v[2 * i + 2]);
                let c2 = (f1 - fm * 2.0 + f0) * (2.0 / (hh * hh));
                let c1 = (fm * 4.0 - f0 * 3.0 - f1) / hh;
                [f0, c1, c2]
            })
            .collect();
        let mut p = Primitive1D::from_cells(grid.clone(), cells)?;
        // interpolation of a smooth function: any detected jump is roundoff
        if !p.jumps().is_empty() {
            p = Primitive1D::from_cells(grid.clone(), p.cells().to_vec())?;
        }
        Ok(p)
    }

    /// Breakpoints splitting `[a, b]` into pieces on which `u_h - u` is
    /// smooth and resolved.
    pub(crate) fn pieces(&self) -> Vec<(f64, f64)> {
        let g = self.base.grid();
        let (a, b) = (g.a(), g.b());
        let h = self.h;
        let mut pts: Vec<f64> = g.nodes().to_vec();
        let mut centres: Vec<f64> = self.base.jumps().iter().map(|j| j.site).collect();
        centres.push(a);
        centres.push(b);
        for &c in &centres {
            for k in -4..=4 {
                let z = c + h * k as f64 / 4.0;
                if z > a && z < b {
                    pts.push(z);
                }
            }
        }
        for &y in g.nodes() {
            for z in [y - h, y + h] {
                if z > a && z < b {
                    pts.push(z);
                }
            }
        }
        pts.sort_by(|p, q| p.partial_cmp(q).unwrap());
        pts.dedup_by(|p, q| (*p - *q).abs() < 1e-14 * (b - a));
        pts.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// `‖u_h - u‖_{L2}`.
    pub fn l2_distance(&self) -> f64 {
        let gl = gauss_legendre_nodes(16);
        let mut bps = Vec::new();
        let mut rule = Vec::new();
        let kgl = gauss_legendre_nodes(KERNEL_POINTS);
        let mut acc = 0.0;
        for (x0, x1) in self.pieces() {
            let half = 0.5 * (x1 - x0);
            for (t, w) in gl.0.iter().zip(&gl.1) {
                let x = x0 + half * (t + 1.0);
                let d = self.eval_with(x, &kgl, &mut bps, &mut rule) - self.base.eval(x);
                acc += half * w * d.norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `∫_a^b u_h`.
    pub fn integral(&self) -> C64 {
        let gl = gauss_legendre_nodes(16);
        let kgl = gauss_legendre_nodes(KERNEL_POINTS);
        let mut bps = Vec::new();
        let mut rule = Vec::new();
        let mut acc = C64::zero();
        for (x0, x1) in self.pieces() {
            let half = 0.5 * (x1 - x0);
            for (t, w) in gl.0.iter().zip(&gl.1) {
                let x = x0 + half * (t + 1.0);
                acc += self.eval_with(x, &kgl, &mut bps, &mut rule) * (half * w);
            }
        }
        acc
    }
}

/// Largest admissible scale: half the minimum distance between jump sites
/// and endpoints (half the interval length without jumps). The bound itself
/// is allowed: smoothing layers then touch but do not overlap.
fn scale_limit(u: &Primitive1D) -> f64 {
    let mut pts: Vec<f64> = u.jumps().iter().map(|j| j.site).collect();
    pts.push(u.a());
    pts.push(u.b());
    pts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    0.5 * pts.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

pub fn mollify(u: &Primitive1D, h: f64) -> Result<MollifiedPrimitive> {
    let limit = scale_limit(u);
    if !(h > 0.0) || h > limit {
        return Err(Error::ScaleTooLarge { h, limit });
    }
    Ok(MollifiedPrimitive { base: u.clone(), h })
}

/// Mollified vector field. Layered fields reduce to the 1D construction;
/// general fields use a tensor-product kernel evaluated by composite Gauss
/// quadrature (the evaluator must be defined within `h` of the domain).
pub fn mollify_field(field: &VectorField, h: f64) -> Result<VectorField> {
    if !(h > 0.0) {
        return Err(Error::ScaleTooLarge { h, limit: 0.0 });
    }
    let dim = field.dim();
    let repr = match &field.repr {
        Repr::Layered { profile, axis } => Repr::MollifiedLayered { profile: mollify(profile, h)?, axis: *axis },
        Repr::MollifiedLayered { .. } | Repr::Closure(_) => {
            let inner = field.clone();
            // coarser than the 1D rule: the tensor product grows like q^n
            let gl = gauss_legendre_nodes(6);
            let splits: Vec<f64> = (0..=8).map(|k| -1.0 + 0.25 * k as f64).collect();
            let mut nodes: Vec<(f64, f64)> = Vec::new();
            for w in splits.windows(2) {
                let half = 0.5 * (w[1] - w[0]);
                for (x, wt) in gl.0.iter().zip(&gl.1) {
                    let s = w[0] + half * (x + 1.0);
                    nodes.push((s, half * wt * bump(s)));
                }
            }
            let nodes = Arc::new(nodes);
            Repr::Closure(Arc::new(move |x: &[f64]| {
                let q = nodes.len();
                let total = q.pow(dim as u32);
                let mut acc = [C64::zero(); 3];
                let mut y = [0.0f64; 3];
                for idx in 0..total {
                    let mut rem = idx;
                    let mut w = 1.0;
                    for d in 0..dim {
                        let (s, wt) = nodes[rem % q];
                        rem /= q;
                        y[d] = x[d] - h * s;
                        w *= wt;
                    }
                    let v = inner.eval(&y[..dim]);
                    for c in 0..3 {
                        acc[c] += v[c] * w;
                    }
                }
                acc
            }))
        }
    };
    Ok(VectorField::from_repr(dim, repr, Vec::new(), field.exponent()))
}

#[derive(Debug, Clone)]
enum FamilyBase {
    Primitive(Primitive1D),
    Field { field: VectorField, domain: Domain },
}

#[derive(Debug, Clone)]
pub enum FamilyMember {
    Primitive(MollifiedPrimitive),
    Field(VectorField),
}

/// Smooth approximants of one datum at decreasing scales.
#[derive(Debug, Clone)]
pub struct MollifiedFamily {
    base: FamilyBase,
    scales: Vec<f64>,
    members: Vec<FamilyMember>,
}

fn check_scales(scales: &[f64]) -> Result<()> {
    if scales.is_empty() || scales.windows(2).any(|w| !(w[1] < w[0])) || scales.iter().any(|&h| !(h > 0.0)) {
        return Err(Error::Potential("scales must be positive and strictly decreasing".into()));
    }
    Ok(())
}

impl MollifiedFamily {
    pub fn of_primitive(base: &Primitive1D, scales: &[f64]) -> Result<Self> {
        check_scales(scales)?;
        let members = scales
            .iter()
            .map(|&h| mollify(base, h).map(FamilyMember::Primitive))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { base: FamilyBase::Primitive(base.clone()), scales: scales.to_vec(), members })
    }

    pub fn of_field(base: &VectorField, domain: Domain, scales: &[f64]) -> Result<Self> {
        check_scales(scales)?;
        let members = scales
            .iter()
            .map(|&h| mollify_field(base, h).map(FamilyMember::Field))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            base: FamilyBase::Field { field: base.clone(), domain },
            scales: scales.to_vec(),
            members,
        })
    }

    /// Scales `2^{-k}` for `k` in `k0..=k1`.
    pub fn dyadic_scales(k0: u32, k1: u32) -> Vec<f64> {
        (k0..=k1).map(|k| 0.5f64.powi(k as i32)).collect()
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }

    pub fn primitive_base(&self) -> Option<&Primitive1D> {
        match &self.base {
            FamilyBase::Primitive(p) => Some(p),
            FamilyBase::Field { .. } => None,
        }
    }

    pub fn field_base(&self) -> Option<(&VectorField, &Domain)> {
        match &self.base {
            FamilyBase::Field { field, domain } => Some((field, domain)),
            FamilyBase::Primitive(_) => None,
        }
    }

    /// `‖u_k - u‖_{L2}` (primitives) or `‖V_k - V‖_{L_p}` at the declared
    /// exponent (fields), one per scale.
    pub fn approximation_norms(&self, spec: &QuadratureSpec) -> Result<Vec<f64>> {
        self.members
            .iter()
            .map(|m| match (m, &self.base) {
                (FamilyMember::Primitive(mp), _) => Ok(mp.l2_distance()),
                (FamilyMember::Field(v), FamilyBase::Field { field, domain }) => {
                    lp_distance_field(v, field, domain, field.exponent(), spec)
                }
                _ => unreachable!("member kind follows the base kind"),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::QuadratureRule;
    use crate::potentials::primitive_from_deltas;

    fn step(h_site: f64, s: f64) -> Primitive1D {
        let g = Grid1D::uniform(0.0, 1.0, 4).unwrap();
        primitive_from_deltas(|_| C64::zero(), &[(h_site, C64::new(s, 0.0))], &g).unwrap()
    }

    #[test]
    fn kernel_has_unit_mass() {
        let gl = gauss_legendre_nodes(KERNEL_POINTS);
        let mut b = Vec::new();
        let mut r = Vec::new();
        kernel_rule(&mut b, &gl, &mut r);
        let m: f64 = r.iter().map(|(_, w)| w).sum();
        assert!((m - 1.0).abs() < 1e-13, "{m}");
        // independent check with a dense Gauss rule
        let q = QuadratureRule::gauss_legendre(200);
        let m2 = q.integrate_interval(-1.0, 1.0, bump);
        assert!((m2 - 1.0).abs() < 1e-12, "{m2}");
    }

    #[test]
    fn zero_stays_zero() {
        let u = Primitive1D::zero(Grid1D::uniform(0.0, 1.0, 4).unwrap());
        let m = mollify(&u, 0.1).unwrap();
        assert_eq!(m.eval(0.3), C64::zero());
        assert_eq!(m.l2_distance(), 0.0);
    }

    #[test]
    fn scale_limit_enforced() {
        let u = step(0.5, 1.0);
        assert!(matches!(mollify(&u, 0.26), Err(Error::ScaleTooLarge { .. })));
        assert!(mollify(&u, 0.25).is_ok());
        assert!(mollify(&u, 0.0).is_err());
    }

    #[test]
    fn step_distance_matches_frozen_constant() {
        // c = ∫ (Φ(t) - H(t))² dt for the normalized bump CDF Φ, computed
        // once by high-precision quadrature
        const C: f64 = 0.105_718_017_806_438_98;
        let u = step(0.5, 1.0);
        for h in [0.1, 0.05, 0.01] {
            let d = mollify(&u, h).unwrap().l2_distance();
            assert!((d - (h * C).sqrt()).abs() < 1e-10, "h={h}: {d}");
        }
    }

    #[test]
    fn mean_is_preserved_with_reflection() {
        let g = Grid1D::uniform(0.0, 1.0, 4).unwrap();
        let u = primitive_from_deltas(|x| C64::new(x * x - 0.3 * x, 0.2), &[(0.5, C64::new(-3.0, 1.0))], &g).unwrap();
        let m = mollify(&u, 0.1).unwrap();
        assert!((m.integral() - u.integral()).norm() < 1e-10);
    }

    #[test]
    fn family_norms_decay_like_sqrt_h() {
        let u = step(0.5, 1.0);
        let scales = MollifiedFamily::dyadic_scales(2, 8);
        let fam = MollifiedFamily::of_primitive(&u, &scales).unwrap();
        let n = fam.approximation_norms(&QuadratureSpec::default()).unwrap();
        for w in n.windows(2) {
            assert!(w[1] <= 1.1 * w[0]);
        }
        let slope = (n[n.len() - 1] / n[0]).ln() / (scales[scales.len() - 1] / scales[0]).ln();
        assert!((slope - 0.5).abs() < 0.1, "slope {slope}");
    }
}
