//! Quadrature rules on reference elements and graded integration toward
//! point singularities.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Element {
    /// Reference interval `[0, 1]`.
    Interval,
    /// Reference triangle with vertices `(0,0)`, `(1,0)`, `(0,1)`.
    Triangle,
}

/// Nodes and positive weights on a reference element.
///
/// Interval nodes use only the first coordinate. Weights sum to the
/// reference measure (1 on the interval, 1/2 on the triangle).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub element: Element,
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    /// Highest total polynomial degree integrated exactly.
    pub order: usize,
}

impl QuadratureRule {
    /// `n`-point Gauss–Legendre rule mapped to `[0, 1]`.
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let (x, w) = gauss_legendre_nodes(n);
        Self {
            element: Element::Interval,
            points: x.iter().map(|&t| [0.5 * (t + 1.0), 0.0]).collect(),
            weights: w.iter().map(|&v| 0.5 * v).collect(),
            order: 2 * n - 1,
        }
    }

    /// Symmetric 3-point rule, exact for quadratics.
    pub fn triangle_3() -> Self {
        let a = 1.0 / 6.0;
        let b = 2.0 / 3.0;
        Self {
            element: Element::Triangle,
            points: vec![[a, a], [b, a], [a, b]],
            weights: vec![1.0 / 6.0; 3],
            order: 2,
        }
    }

    /// 7-point Radon rule, exact for quintics.
    pub fn triangle_7() -> Self {
        let s15 = 15.0f64.sqrt();
        let a1 = (6.0 - s15) / 21.0;
        let b1 = (9.0 + 2.0 * s15) / 21.0;
        let a2 = (6.0 + s15) / 21.0;
        let b2 = (9.0 - 2.0 * s15) / 21.0;
        let w1 = (155.0 - s15) / 2400.0;
        let w2 = (155.0 + s15) / 2400.0;
        Self {
            element: Element::Triangle,
            points: vec![
                [1.0 / 3.0, 1.0 / 3.0],
                [a1, a1],
                [b1, a1],
                [a1, b1],
                [a2, a2],
                [b2, a2],
                [a2, b2],
            ],
            weights: vec![9.0 / 80.0, w1, w1, w1, w2, w2, w2],
            order: 5,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Integrate `f` over the interval `[a, b]` (interval rules only).
    pub fn integrate_interval<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        debug_assert_eq!(self.element, Element::Interval);
        let h = b - a;
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(a + h * p[0]))
            .sum::<f64>()
            * h
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Sum of a geometric refinement sequence with tail extrapolation.
///
/// `level(l)` returns `(shell_l, core_l)`: the integral over the part of the
/// level-`l` region that excludes the level-`l+1` region, and a plain
/// quadrature estimate on the level-`l+1` region. Level `L` estimates the
/// integral as `Σ_{l≤L} shell_l + core_L`. Refinement stops when the
/// geometric tail of successive differences falls below `rel_tol`.
/// Differences that stop shrinking signal a divergent integral.
pub fn geometric_refinement<F>(mut level: F, rel_tol: f64, max_levels: usize) -> Result<f64>
where
    F: FnMut(usize) -> (f64, f64),
{
    let mut shells = 0.0;
    let mut prev: Option<f64> = None;
    let mut diffs: Vec<f64> = Vec::new();
    for l in 0..max_levels {
        let (shell, core) = level(l);
        shells += shell;
        let est = shells + core;
        if !est.is_finite() {
            return Err(Error::DivergedNorm { p: f64::NAN });
        }
        if let Some(p) = prev {
            let d = (est - p).abs();
            diffs.push(d);
            let scale = est.abs().max(f64::MIN_POSITIVE);
            if d <= rel_tol * scale * 1e-3 {
                return Ok(est);
            }
            if diffs.len() >= 4 {
                let n = diffs.len();
                let r = ratio(diffs[n - 1], diffs[n - 2]);
                let r2 = ratio(diffs[n - 2], diffs[n - 3]);
                let r3 = ratio(diffs[n - 3], diffs[n - 4]);
                let rmax = r.max(r2).max(r3);
                if rmax < 0.999 {
                    let tail = d * rmax / (1.0 - rmax);
                    if tail <= rel_tol * scale {
                        return Ok(est);
                    }
                } else if n >= 12 && r >= 0.999 && r2 >= 0.999 && r3 >= 0.999 {
                    return Err(Error::DivergedNorm { p: f64::NAN });
                }
            }
        }
        prev = Some(est);
    }
    Err(Error::DivergedNorm { p: f64::NAN })
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        if a == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        a / b
    }
}

/// Tensor-product Gauss–Legendre integral over an axis-aligned box in
/// `lo.len()` dimensions, with `pieces` equal subdivisions per axis.
pub fn box_gauss<F>(lo: &[f64], hi: &[f64], rule: &QuadratureRule, pieces: usize, f: &mut F) -> f64
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = lo.len();
    let q = rule.len();
    let per_axis = q * pieces;
    let total = per_axis.pow(dim as u32);
    let mut x = [0.0f64; 3];
    let mut sum = 0.0;
    for idx in 0..total {
        let mut rem = idx;
        let mut w = 1.0;
        for d in 0..dim {
            let k = rem % per_axis;
            rem /= per_axis;
            let piece = k / q;
            let node = k % q;
            let h = (hi[d] - lo[d]) / pieces as f64;
            let a = lo[d] + piece as f64 * h;
            x[d] = a + h * rule.points[node][0];
            w *= h * rule.weights[node];
        }
        sum += w * f(&x[..dim]);
    }
    sum
}

/// Integral over a box whose vertex `corner` carries an integrable point
/// singularity; dyadic refinement toward the corner with ratio 1/2.
pub fn box_corner_graded<F>(
    lo: &[f64],
    hi: &[f64],
    corner: &[f64],
    rule: &QuadratureRule,
    rel_tol: f64,
    f: &mut F,
) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = lo.len();
    // far vertex: the one opposite to the singular corner
    let mut far = [0.0f64; 3];
    for d in 0..dim {
        far[d] = if corner[d] == lo[d] { hi[d] } else { lo[d] };
    }
    let mut c = [0.0f64; 3];
    c[..dim].copy_from_slice(&corner[..dim]);
    geometric_refinement(
        |level| {
            let s = 0.5f64.powi(level as i32);
            let mut outer_lo = [0.0; 3];
            let mut outer_hi = [0.0; 3];
            let mut mid = [0.0; 3];
            for d in 0..dim {
                let v = c[d] + s * (far[d] - c[d]);
                mid[d] = 0.5 * (c[d] + v);
                outer_lo[d] = c[d].min(v);
                outer_hi[d] = c[d].max(v);
            }
            // children of the level box; the one touching the corner is the core
            let mut shell = 0.0;
            let mut core = 0.0;
            for child in 0..(1usize << dim) {
                let mut clo = [0.0; 3];
                let mut chi = [0.0; 3];
                let mut touches = true;
                for d in 0..dim {
                    let upper = (child >> d) & 1 == 1;
                    let (a, b) = if upper {
                        (mid[d], outer_hi[d])
                    } else {
                        (outer_lo[d], mid[d])
                    };
                    clo[d] = a;
                    chi[d] = b;
                    if !(a == c[d] || b == c[d]) {
                        touches = false;
                    }
                }
                let v = box_gauss(&clo[..dim], &chi[..dim], rule, 1, f);
                if touches {
                    core = v;
                } else {
                    shell += v;
                }
            }
            (shell, core)
        },
        rel_tol,
        400,
    )
}
