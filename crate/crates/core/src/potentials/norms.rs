//! `L_p` norms of structural representatives.
//!
//! Point singularities are handled by dyadic refinement toward each site
//! (box corners for rectangles and cuboids, rays from the site for disks
//! and balls). Divergence is reported when dyadic shell contributions stop
//! decaying.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use super::field::Repr;
use super::{Domain, MollifiedPrimitive, Primitive1D, VectorField};
use crate::numerics::quadrature::{box_corner_graded, box_gauss, gauss_legendre_nodes, geometric_refinement};
use crate::numerics::QuadratureRule;
use crate::{Error, Result, C64};

/// Label attached to every reported `H⁻¹_p` value: the norm of the stored
/// representative bounds the infimum over representations from above.
pub const STRUCTURAL_LABEL: &str = "structural upper bound";

/// Resolution knobs for norm quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Gauss points per panel and axis.
    pub points: usize,
    /// Panels per axis on regular boxes and per angular coordinate.
    pub pieces: usize,
    /// Relative tolerance for adaptive and dyadic refinement.
    pub rel_tol: f64,
    pub max_levels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { points: 8, pieces: 16, rel_tol: 1e-10, max_levels: 200 }
    }
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Potential(alloc::format!("norm exponent {p} must be finite and >= 1")))
    }
}

fn diverged(p: f64) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::DivergedNorm { .. } => Error::DivergedNorm { p },
        other => other,
    }
}

/// Adaptive Gauss on `[a, b]`: bisect until one panel and its halves agree.
fn adaptive<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, gl: &(Vec<f64>, Vec<f64>), tol: f64, depth: u32) -> f64 {
    let panel = |f: &mut F, x0: f64, x1: f64| -> f64 {
        let half = 0.5 * (x1 - x0);
        gl.0.iter().zip(&gl.1).map(|(t, w)| half * w * f(x0 + half * (t + 1.0))).sum()
    };
    let whole = panel(f, a, b);
    let m = 0.5 * (a + b);
    let (l, r) = (panel(f, a, m), panel(f, m, b));
    if depth == 0 || (l + r - whole).abs() <= tol.max(f64::MIN_POSITIVE) {
        return l + r;
    }
    adaptive(f, a, m, gl, 0.5 * tol, depth - 1) + adaptive(f, m, b, gl, 0.5 * tol, depth - 1)
}

/// `∫ f` over consecutive pieces with a relative tolerance.
fn integrate_pieces<F: FnMut(f64) -> f64>(f: &mut F, pieces: &[(f64, f64)], spec: &QuadratureSpec) -> f64 {
    let gl = gauss_legendre_nodes(spec.points.max(2));
    // coarse pass fixes the absolute tolerance
    let coarse: f64 = pieces
        .iter()
        .map(|&(a, b)| {
            let half = 0.5 * (b - a);
            gl.0.iter().zip(&gl.1).map(|(t, w)| half * w * f(a + half * (t + 1.0))).sum::<f64>()
        })
        .sum();
    let tol = spec.rel_tol * coarse.abs() * 1e-2 / pieces.len().max(1) as f64;
    pieces.iter().map(|&(a, b)| adaptive(f, a, b, &gl, tol, 30)).sum()
}

/// `‖u‖_{L_p(a,b)}` of a primitive.
pub fn lp_norm_primitive(u: &Primitive1D, p: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_p(p)?;
    let g = u.grid();
    let pieces: Vec<(f64, f64)> = (0..g.cells()).map(|i| g.cell(i)).collect();
    let mut f = |x: f64| {
        let i = g.locate(x);
        u.eval_in_cell(i, x).norm().powf(p)
    };
    Ok(integrate_pieces(&mut f, &pieces, spec).powf(1.0 / p))
}

/// 1D profile shared by layered fields.
enum Profile<'a> {
    Raw(&'a Primitive1D),
    Smooth(&'a MollifiedPrimitive),
}

impl Profile<'_> {
    fn eval(&self, x: f64) -> C64 {
        match self {
            Profile::Raw(u) => u.eval_in_cell(u.grid().locate(x), x),
            Profile::Smooth(m) => m.eval(x),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Profile::Raw(u) => u.grid().nodes().to_vec(),
            Profile::Smooth(m) => {
                let mut v: Vec<f64> = m.pieces().iter().map(|p| p.0).collect();
                v.push(m.base().b());
                v
            }
        }
    }

    fn span(&self) -> (f64, f64) {
        match self {
            Profile::Raw(u) => (u.a(), u.b()),
            Profile::Smooth(m) => (m.base().a(), m.base().b()),
        }
    }
}

fn layered_parts(field: &VectorField) -> Option<(Profile<'_>, usize)> {
    match &field.repr {
        Repr::Layered { profile, axis } => Some((Profile::Raw(profile), *axis)),
        Repr::MollifiedLayered { profile, axis } => Some((Profile::Smooth(profile), *axis)),
        Repr::Closure(_) => None,
    }
}

/// `∫_Ω |g(x_axis)|^p dx` for a function of one coordinate.
fn layered_integral<G: Fn(f64) -> f64>(
    g: G,
    mut breaks: Vec<f64>,
    span: (f64, f64),
    axis: usize,
    domain: &Domain,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let (lo, hi, centre, radius) = match *domain {
        Domain::Interval { a, b } => (a, b, 0.0, 0.0),
        Domain::Rectangle { lo, hi } => (lo[axis], hi[axis], 0.0, 0.0),
        Domain::Cuboid { lo, hi } => (lo[axis], hi[axis], 0.0, 0.0),
        Domain::Disk { center, radius } => (center[axis] - radius, center[axis] + radius, center[axis], radius),
        Domain::Ball { center, radius } => (center[axis] - radius, center[axis] + radius, center[axis], radius),
    };
    let slack = 1e-12 * (span.1 - span.0);
    if lo < span.0 - slack || hi > span.1 + slack {
        return Err(Error::Potential("layer profile does not cover the domain".into()));
    }
    breaks.push(lo);
    breaks.push(hi);
    breaks.retain(|&x| x >= lo && x <= hi);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() <= slack);
    match *domain {
        Domain::Interval { .. } | Domain::Rectangle { .. } | Domain::Cuboid { .. } => {
            let cross = match *domain {
                Domain::Rectangle { lo, hi } => hi[1 - axis] - lo[1 - axis],
                Domain::Cuboid { lo, hi } => (0..3).filter(|&d| d != axis).map(|d| hi[d] - lo[d]).product(),
                _ => 1.0,
            };
            let pieces: Vec<(f64, f64)> = breaks.windows(2).map(|w| (w[0], w[1])).collect();
            Ok(cross * integrate_pieces(&mut |x| g(x), &pieces, spec))
        }
        Domain::Disk { .. } | Domain::Ball { .. } => {
            // x = c + R sin θ removes the square-root endpoint behaviour of the chord
            let ball = matches!(domain, Domain::Ball { .. });
            let thetas: Vec<f64> = breaks.iter().map(|&x| ((x - centre) / radius).clamp(-1.0, 1.0).asin()).collect();
            let pieces: Vec<(f64, f64)> = thetas.windows(2).map(|w| (w[0], w[1])).collect();
            let mut f = |t: f64| {
                let c = t.cos();
                let w = if ball { PI * radius.powi(3) * c * c * c } else { 2.0 * radius * radius * c * c };
                g(centre + radius * t.sin()) * w
            };
            Ok(integrate_pieces(&mut f, &pieces, spec))
        }
    }
}

fn vec_norm(v: &[C64; 3]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt()
}

/// Sites lying in the closed domain.
fn sites_in(domain: &Domain, sites: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let eps = 1e-12;
    sites
        .iter()
        .copied()
        .filter(|s| match *domain {
            Domain::Interval { a, b } => s[0] >= a - eps && s[0] <= b + eps,
            Domain::Rectangle { lo, hi } => (0..2).all(|d| s[d] >= lo[d] - eps && s[d] <= hi[d] + eps),
            Domain::Cuboid { lo, hi } => (0..3).all(|d| s[d] >= lo[d] - eps && s[d] <= hi[d] + eps),
            Domain::Disk { center, radius } => {
                (s[0] - center[0]).hypot(s[1] - center[1]) <= radius * (1.0 + eps)
            }
            Domain::Ball { center, radius } => {
                let d2: f64 = (0..3).map(|d| (s[d] - center[d]).powi(2)).sum();
                d2.sqrt() <= radius * (1.0 + eps)
            }
        })
        .collect()
}

/// `∫ f` over a box, refining toward every site.
fn box_integral<F: FnMut(&[f64]) -> f64>(
    lo: &[f64],
    hi: &[f64],
    sites: &[[f64; 3]],
    f: &mut F,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let dim = lo.len();
    let rule = QuadratureRule::gauss_legendre(spec.points.max(2));
    // split every axis at the site coordinates so that sites become corners
    let mut cuts: Vec<Vec<f64>> = (0..dim)
        .map(|d| {
            let mut c = alloc::vec![lo[d], hi[d]];
            c.extend(sites.iter().map(|s| s[d]).filter(|&x| x > lo[d] && x < hi[d]));
            c.sort_by(|a, b| a.partial_cmp(b).unwrap());
            c.dedup();
            c
        })
        .collect();
    let counts: Vec<usize> = cuts.iter().map(|c| c.len() - 1).collect();
    let total: usize = counts.iter().product();
    let mut acc = 0.0;
    for idx in 0..total {
        let mut rem = idx;
        let mut blo = [0.0; 3];
        let mut bhi = [0.0; 3];
        for d in 0..dim {
            let k = rem % counts[d];
            rem /= counts[d];
            blo[d] = cuts[d][k];
            bhi[d] = cuts[d][k + 1];
        }
        acc += sub_box(&blo[..dim], &bhi[..dim], sites, f, &rule, spec, 3)?;
    }
    cuts.clear();
    Ok(acc)
}

fn sub_box<F: FnMut(&[f64]) -> f64>(
    lo: &[f64],
    hi: &[f64],
    sites: &[[f64; 3]],
    f: &mut F,
    rule: &QuadratureRule,
    spec: &QuadratureSpec,
    depth: u32,
) -> Result<f64> {
    let dim = lo.len();
    let mut corners: Vec<[f64; 3]> = Vec::new();
    for s in sites {
        let on_corner = (0..dim).all(|d| s[d] == lo[d] || s[d] == hi[d]);
        if on_corner && !corners.contains(s) {
            corners.push(*s);
        }
    }
    match corners.len() {
        0 => Ok(box_gauss(lo, hi, rule, spec.pieces.max(1).min(4), f)),
        1 => box_corner_graded(lo, hi, &corners[0][..dim], rule, spec.rel_tol, f),
        _ if depth > 0 => {
            let mut acc = 0.0;
            for child in 0..(1usize << dim) {
                let mut clo = [0.0; 3];
                let mut chi = [0.0; 3];
                for d in 0..dim {
                    let mid = 0.5 * (lo[d] + hi[d]);
                    if (child >> d) & 1 == 1 {
                        clo[d] = mid;
                        chi[d] = hi[d];
                    } else {
                        clo[d] = lo[d];
                        chi[d] = mid;
                    }
                }
                acc += sub_box(&clo[..dim], &chi[..dim], sites, f, rule, spec, depth - 1)?;
            }
            Ok(acc)
        }
        _ => Err(Error::Potential("could not isolate singular sites".into())),
    }
}

/// Unit directions with weights covering the circle or sphere.
fn directions(dim: usize, spec: &QuadratureSpec) -> Vec<([f64; 3], f64)> {
    let gl = gauss_legendre_nodes(spec.points.max(2));
    let pieces = spec.pieces.max(1);
    let mut angles = Vec::new();
    let step = 2.0 * PI / pieces as f64;
    for k in 0..pieces {
        for (t, w) in gl.0.iter().zip(&gl.1) {
            angles.push((step * (k as f64 + 0.5 * (t + 1.0)), 0.5 * step * w));
        }
    }
    if dim == 2 {
        return angles.iter().map(|&(a, w)| ([a.cos(), a.sin(), 0.0], w)).collect();
    }
    let mut out = Vec::new();
    let zstep = 2.0 / pieces as f64;
    for k in 0..pieces {
        for (t, w) in gl.0.iter().zip(&gl.1) {
            let z = -1.0 + zstep * (k as f64 + 0.5 * (t + 1.0));
            let rho = (1.0 - z * z).max(0.0).sqrt();
            for &(a, wa) in &angles {
                out.push(([rho * a.cos(), rho * a.sin(), z], 0.5 * zstep * w * wa));
            }
        }
    }
    out
}

/// `∫ f` over a disk or ball in rays from `origin`, with dyadic shells in
/// the fraction `t = r / ρ(direction)` of the distance to the boundary.
fn star_integral<F: FnMut(&[f64]) -> f64>(
    dim: usize,
    centre: [f64; 3],
    radius: f64,
    origin: [f64; 3],
    f: &mut F,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let dirs = directions(dim, spec);
    let d: [f64; 3] = core::array::from_fn(|k| origin[k] - centre[k]);
    let dd: f64 = d.iter().map(|v| v * v).sum();
    let reach: Vec<f64> = dirs
        .iter()
        .map(|(e, _)| {
            let de: f64 = (0..3).map(|k| d[k] * e[k]).sum();
            (-de + (de * de - (dd - radius * radius)).max(0.0).sqrt()).max(0.0)
        })
        .collect();
    let gl = gauss_legendre_nodes(spec.points.max(2));
    let mut x = [0.0f64; 3];
    let mut shell = |t0: f64, t1: f64, f: &mut F| -> f64 {
        let half = 0.5 * (t1 - t0);
        let mut acc = 0.0;
        for ((e, we), &rho) in dirs.iter().zip(&reach) {
            if rho == 0.0 {
                continue;
            }
            for (s, ws) in gl.0.iter().zip(&gl.1) {
                let t = t0 + half * (s + 1.0);
                let r = t * rho;
                for k in 0..dim {
                    x[k] = origin[k] + r * e[k];
                }
                let jac = if dim == 2 { t * rho * rho } else { t * t * rho * rho * rho };
                acc += we * half * ws * jac * f(&x[..dim]);
            }
        }
        acc
    };
    geometric_refinement(
        |level| {
            let s = 0.5f64.powi(level as i32);
            (shell(0.5 * s, s, f), shell(0.0, 0.5 * s, f))
        },
        spec.rel_tol,
        spec.max_levels,
    )
}

/// `∫_Ω |V|^p`.
fn closure_integral(field: &VectorField, domain: &Domain, p: f64, spec: &QuadratureSpec) -> Result<f64> {
    let sites = sites_in(domain, field.singular_sites());
    let mut f = |x: &[f64]| vec_norm(&field.eval(x)).powf(p);
    match *domain {
        Domain::Interval { a, b } => box_integral(&[a], &[b], &sites, &mut f, spec),
        Domain::Rectangle { lo, hi } => box_integral(&lo, &hi, &sites, &mut f, spec),
        Domain::Cuboid { lo, hi } => box_integral(&lo, &hi, &sites, &mut f, spec),
        Domain::Disk { center, radius } => round_integral(2, [center[0], center[1], 0.0], radius, &sites, &mut f, spec),
        Domain::Ball { center, radius } => round_integral(3, center, radius, &sites, &mut f, spec),
    }
}

fn round_integral<F: FnMut(&[f64]) -> f64>(
    dim: usize,
    centre: [f64; 3],
    radius: f64,
    sites: &[[f64; 3]],
    f: &mut F,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if sites.len() <= 1 {
        let origin = sites.first().copied().unwrap_or(centre);
        return star_integral(dim, centre, radius, origin, f, spec);
    }
    // partition of unity w_i = d_i^{-4} / Σ d_j^{-4}, one ray family per site
    let mut acc = 0.0;
    for (i, s) in sites.iter().enumerate() {
        let mut g = |x: &[f64]| {
            let dist4 = |c: &[f64; 3]| {
                let d2: f64 = (0..dim).map(|k| (x[k] - c[k]).powi(2)).sum();
                d2 * d2
            };
            let own = dist4(s);
            if own == 0.0 {
                return 0.0;
            }
            let denom: f64 = sites.iter().map(|c| own / dist4(c)).sum();
            if !denom.is_finite() {
                return 0.0;
            }
            f(x) / denom
        };
        acc += star_integral(dim, centre, radius, *s, &mut g, spec)?;
        let _ = i;
    }
    Ok(acc)
}

/// `‖V‖_{L_p(Ω)}` with the Euclidean norm of the vector value.
pub fn lp_norm_field(field: &VectorField, domain: &Domain, p: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_p(p)?;
    if domain.dim() != field.dim() {
        return Err(Error::Potential("field and domain dimensions differ".into()));
    }
    let integral = if let Some((profile, axis)) = layered_parts(field) {
        layered_integral(|x| profile.eval(x).norm().powf(p), profile.breakpoints(), profile.span(), axis, domain, spec)?
    } else {
        closure_integral(field, domain, p, spec).map_err(diverged(p))?
    };
    Ok(integral.powf(1.0 / p))
}

/// `‖V - W‖_{L_p(Ω)}`.
pub fn lp_distance_field(
    v: &VectorField,
    w: &VectorField,
    domain: &Domain,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_p(p)?;
    if let (Some((pv, av)), Some((pw, aw))) = (layered_parts(v), layered_parts(w)) {
        if av == aw && v.dim() == w.dim() && domain.dim() == v.dim() {
            let mut breaks = pv.breakpoints();
            breaks.extend(pw.breakpoints());
            let span = (pv.span().0.max(pw.span().0), pv.span().1.min(pw.span().1));
            let g = |x: f64| (pv.eval(x) - pw.eval(x)).norm().powf(p);
            return Ok(layered_integral(g, breaks, span, av, domain, spec)?.powf(1.0 / p));
        }
    }
    let diff = v.sum(&w.scaled(C64::new(-1.0, 0.0)))?;
    lp_norm_field(&diff, domain, p, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{primitive_from_deltas, Grid1D};
    use alloc::sync::Arc;
    use alloc::vec;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn radial(alpha: f64) -> VectorField {
        // |V| = (2r)^{-alpha} pointing outward
        VectorField::new(
            2,
            Arc::new(move |x: &[f64]| {
                let r = x[0].hypot(x[1]);
                let m = (2.0 * r).powf(-alpha) / r;
                [C64::new(m * x[0], 0.0), C64::new(m * x[1], 0.0), C64::zero()]
            }),
            vec![[0.0; 3]],
            1.5,
        )
        .unwrap()
    }

    const DISK: Domain = Domain::Disk { center: [0.0, 0.0], radius: 1.0 };

    #[test]
    fn step_l2() {
        let g = Grid1D::uniform(0.0, 1.0, 4).unwrap();
        let u = primitive_from_deltas(|_| C64::zero(), &[(0.5, C64::new(1.0, 0.0))], &g).unwrap();
        let n = lp_norm_primitive(&u, 2.0, &QuadratureSpec::default()).unwrap();
        assert!((n - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn polynomial_l3_closed_form() {
        // ∫_0^1 x^3 dx = 1/4 for u = x
        let g = Grid1D::uniform(0.0, 1.0, 3).unwrap();
        let u = primitive_from_deltas(|x| C64::new(x, 0.0), &[], &g).unwrap();
        let n = lp_norm_primitive(&u, 3.0, &QuadratureSpec::default()).unwrap();
        assert!((n / 0.25f64.powf(1.0 / 3.0) - 1.0).abs() < 1e-10);
        // |x - 1/2|^{1.5} has a kink inside a cell: 2 ∫_0^{1/2} t^{1.5} = (1/2)^{2.5}/1.25
        let v = primitive_from_deltas(|x| C64::new(x - 0.5, 0.0), &[], &g).unwrap();
        let n = lp_norm_primitive(&v, 1.5, &QuadratureSpec::default()).unwrap();
        let exact = (0.5f64.powf(2.5) / 1.25).powf(1.0 / 1.5);
        assert!((n / exact - 1.0).abs() < 1e-10, "{n} vs {exact}");
    }

    #[test]
    fn radial_oracle_p_one_and_a_half() {
        // 2π ∫_0^1 (2r)^{-1.5} r dr = 2π 2^{-1.5} · 2 = √2 π
        let v = radial(1.0);
        let n = lp_norm_field(&v, &DISK, 1.5, &QuadratureSpec::default()).unwrap();
        let exact = (2f64.sqrt() * PI).powf(1.0 / 1.5);
        assert!((n / exact - 1.0).abs() < 1e-8, "{n} vs {exact}");
    }

    #[test]
    fn radial_diverges_at_two() {
        let v = radial(1.0);
        let e = lp_norm_field(&v, &DISK, 2.0, &QuadratureSpec::default()).unwrap_err();
        assert_eq!(e, Error::DivergedNorm { p: 2.0 });
        assert!(lp_norm_field(&v, &DISK, 2.5, &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn off_centre_site_on_rectangle() {
        // |V| = |x - s|^{-1/2} on [-1,1]^2 with s = (0.25, -0.5); p = 2 gives
        // ∫ 1/|x-s| which is finite; compare a corner-split value with a disk-like check
        let s = [0.25, -0.5];
        let v = VectorField::new(
            2,
            Arc::new(move |x: &[f64]| {
                let r = (x[0] - s[0]).hypot(x[1] - s[1]);
                [C64::new(r.powf(-0.5), 0.0), C64::zero(), C64::zero()]
            }),
            vec![[s[0], s[1], 0.0]],
            2.5,
        )
        .unwrap();
        let dom = Domain::Rectangle { lo: [-1.0, -1.0], hi: [1.0, 1.0] };
        let n = lp_norm_field(&v, &dom, 2.0, &QuadratureSpec::default()).unwrap();
        // ∫ over a box [0,a]x[0,b] of 1/r = a asinh(b/a) + b asinh(a/b)
        let box_int = |a: f64, b: f64| a * (b / a).asinh() + b * (a / b).asinh();
        let exact = box_int(1.25, 0.5) + box_int(1.25, 1.5) + box_int(0.75, 0.5) + box_int(0.75, 1.5);
        assert!((n * n / exact - 1.0).abs() < 1e-8, "{} vs {exact}", n * n);
    }

    #[test]
    fn two_sites_in_disk() {
        // |V|^2 = 1/|x-s1| + 1/|x-s2| summed contributions: compare with
        // each single-site integral computed separately
        let s1 = [0.3, 0.0];
        let s2 = [-0.4, 0.2];
        let single = |s: [f64; 2]| {
            VectorField::new(
                2,
                Arc::new(move |x: &[f64]| {
                    let r = (x[0] - s[0]).hypot(x[1] - s[1]);
                    [C64::new(r.powf(-0.5), 0.0), C64::zero(), C64::zero()]
                }),
                vec![[s[0], s[1], 0.0]],
                2.5,
            )
            .unwrap()
        };
        let spec = QuadratureSpec::default();
        let a = lp_norm_field(&single(s1), &DISK, 2.0, &spec).unwrap().powi(2);
        let b = lp_norm_field(&single(s2), &DISK, 2.0, &spec).unwrap().powi(2);
        let both = VectorField::new(
            2,
            Arc::new(move |x: &[f64]| {
                let r1 = (x[0] - s1[0]).hypot(x[1] - s1[1]);
                let r2 = (x[0] - s2[0]).hypot(x[1] - s2[1]);
                [C64::new(r1.powf(-0.5), 0.0), C64::new(r2.powf(-0.5), 0.0), C64::zero()]
            }),
            vec![[s1[0], s1[1], 0.0], [s2[0], s2[1], 0.0]],
            2.5,
        )
        .unwrap();
        let c = lp_norm_field(&both, &DISK, 2.0, &spec).unwrap().powi(2);
        assert!((c / (a + b) - 1.0).abs() < 1e-6, "{c} vs {}", a + b);
    }

    #[test]
    fn layered_matches_closure() {
        let g = Grid1D::uniform(-1.0, 1.0, 4).unwrap();
        let u = primitive_from_deltas(|x| C64::new(x, 0.5), &[(0.5, C64::new(2.0, 0.0))], &g).unwrap();
        let lay = VectorField::layered(2, u.clone(), 0, 2.5).unwrap();
        let spec = QuadratureSpec::default();
        // on a disk: ∫ |u(x)|^2 2√(1-x²) dx, compare against an adaptive 1D oracle
        let n = lp_norm_field(&lay, &DISK, 2.0, &spec).unwrap();
        let rule = QuadratureRule::gauss_legendre(40);
        let mut exact = 0.0;
        for (a, b) in [(-1.0, 0.5), (0.5, 1.0)] {
            let (ta, tb) = (f64::asin(a), f64::asin(b));
            exact += rule.integrate_interval(ta, tb, |t| {
                let x = t.sin();
                u.eval(x).norm_sqr() * 2.0 * t.cos() * t.cos()
            });
        }
        assert!((n * n / exact - 1.0).abs() < 1e-10);
        let rect = Domain::Rectangle { lo: [-1.0, 0.0], hi: [1.0, 3.0] };
        let n = lp_norm_field(&lay, &rect, 2.0, &spec).unwrap();
        assert!((n * n / (3.0 * u.l2_norm().powi(2)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ball_volume() {
        let one = VectorField::new(3, Arc::new(|_: &[f64]| [C64::new(1.0, 0.0), C64::zero(), C64::zero()]), vec![], 3.0)
            .unwrap();
        let ball = Domain::Ball { center: [0.1, 0.2, 0.3], radius: 0.7 };
        let n = lp_norm_field(&one, &ball, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((n / ball.volume() - 1.0).abs() < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn homogeneous(re in -3.0f64..3.0, im in -3.0f64..3.0, p in 1.0f64..3.5) {
            prop_assume!(re.abs() + im.abs() > 1e-3);
            let c = C64::new(re, im);
            let spec = QuadratureSpec::default();
            let g = Grid1D::uniform(0.0, 1.0, 5).unwrap();
            let u = primitive_from_deltas(|x| C64::new(x.sin(), x), &[(0.4, C64::new(1.0, -2.0))], &g).unwrap();
            let a = lp_norm_primitive(&u, p, &spec).unwrap();
            let b = lp_norm_primitive(&u.scaled(c), p, &spec).unwrap();
            prop_assert!((b - c.norm() * a).abs() <= 1e-12 * b.max(1e-300));
            let v = radial(0.5);
            let a = lp_norm_field(&v, &DISK, p, &spec).unwrap();
            let b = lp_norm_field(&v.scaled(c), &DISK, p, &spec).unwrap();
            prop_assert!((b - c.norm() * a).abs() <= 1e-12 * b);
        }
    }
}
