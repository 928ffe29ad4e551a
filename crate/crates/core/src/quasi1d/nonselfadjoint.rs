//! Eigenvalues of complex problems: Galerkin seeds refined by Newton's
//! method on the characteristic determinant.

use alloc::vec::Vec;

use num_complex::ComplexFloat;
use num_traits::Float;

use super::boundary::{characteristic, root_residual, BoundaryCondition1D};
use super::galerkin::galerkin_eigenvalues;
use super::shooting::{eigenfunction, site_checks};
use super::spectrum::{Engine, Spectrum1D};
use crate::numerics::{cluster_groups, sort_key};
use crate::potentials::{Grid1D, Primitive1D};
use crate::{Result, C64};

/// Galerkin cells used for seeding.
pub const SEED_CELLS: usize = 400;
const NEWTON_STEPS: usize = 40;
const REFINED_RESIDUAL: f64 = 1e-8;

/// `χ(λ)` rescaled to the exponent `reference`.
fn chi(u: &Primitive1D, lambda: C64, bc: &BoundaryCondition1D, reference: Option<f64>) -> (C64, f64) {
    let c = characteristic(u, lambda, bc);
    let r = reference.unwrap_or(c.log_scale);
    (c.value * (c.log_scale - r).exp(), r)
}

/// Newton's method with a forward-difference derivative of step
/// `1e-6 (1 + |λ|)`. Stops when the step is negligible or has stalled at
/// the rounding floor; returns the iterate with the smallest `|χ|`.
pub fn newton_refine(u: &Primitive1D, bc: &BoundaryCondition1D, seed: C64) -> Option<C64> {
    let mut lambda = seed;
    let mut best: Option<(f64, C64)> = None;
    let mut prev_step = f64::INFINITY;
    for _ in 0..NEWTON_STEPS {
        let (f, r) = chi(u, lambda, bc, None);
        let rel = root_residual(u, lambda, bc);
        if best.is_none_or(|(b, _)| rel < b) {
            best = Some((rel, lambda));
        }
        if f.norm() == 0.0 {
            break;
        }
        let d = 1e-6 * (1.0 + lambda.norm());
        let (g, _) = chi(u, lambda + d, bc, Some(r));
        let slope = (g - f) / d;
        if !slope.is_finite() || slope.norm() == 0.0 {
            break;
        }
        let step = (f / slope).norm();
        lambda -= f / slope;
        if !lambda.is_finite() {
            break;
        }
        let scale = 1.0 + lambda.norm();
        if step <= 1e-14 * scale || (step <= 1e-8 * scale && step > 0.5 * prev_step) {
            let rel = root_residual(u, lambda, bc);
            if best.is_none_or(|(b, _)| rel < b) {
                best = Some((rel, lambda));
            }
            break;
        }
        prev_step = step;
    }
    best.map(|(_, l)| l)
}

/// The `count` eigenvalues of smallest real part for complex `u` or
/// boundary data. Seeds come from a Galerkin pencil on `cells` elements;
/// a seed is replaced by its Newton limit only if the limit has residual
/// below `1e-8` and stays within half the distance to neighbouring seeds.
pub fn eigenvalues_complex(u: &Primitive1D, bc: &BoundaryCondition1D, count: usize, cells: usize) -> Result<Spectrum1D> {
    let sites: Vec<f64> = u.grid().nodes().to_vec();
    let mesh = Grid1D::uniform_with(u.a(), u.b(), cells.max(2), &sites)?;
    let seeds = galerkin_eigenvalues(u, bc, &mesh, count + 1)?;
    let all = &seeds.eigenvalues;
    let mut out: Vec<(C64, bool, usize)> = Vec::with_capacity(count);
    for (i, &s) in all.iter().enumerate().take(count) {
        let sep = all
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &t)| (t - s).norm())
            .fold(f64::INFINITY, f64::min);
        let accepted = newton_refine(u, bc, s).filter(|&l| {
            (l - s).norm() <= 0.5 * sep && root_residual(u, l, bc) <= REFINED_RESIDUAL
        });
        match accepted {
            Some(l) => out.push((l, true, i)),
            None => out.push((s, false, i)),
        }
    }
    out.sort_by(|a, b| sort_key(&a.0, &b.0));
    let eigenvalues: Vec<C64> = out.iter().map(|o| o.0).collect();
    let refined: Vec<bool> = out.iter().map(|o| o.1).collect();
    let residuals = out
        .iter()
        .map(|&(l, r, i)| if r { root_residual(u, l, bc) } else { seeds.residuals[i] })
        .collect();
    let eigenfunctions = out
        .iter()
        .map(|&(l, r, i)| if r { eigenfunction(u, l, bc) } else { seeds.eigenfunctions[i].clone() })
        .collect();
    let checks = out
        .iter()
        .map(|&(l, r, _)| if r { site_checks(u, l, bc) } else { Vec::new() })
        .collect();
    Ok(Spectrum1D {
        clusters: cluster_groups(&eigenvalues),
        eigenvalues,
        eigenfunctions,
        residuals,
        engine: Engine::Shooting,
        refined,
        site_checks: checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::primitive_from_deltas;
    use crate::quasi1d::eigenvalues_selfadjoint;
    use core::f64::consts::PI;
    use num_traits::Zero;

    /// Symmetric Dirichlet modes for `s δ(x - 1/2)` on (0,1) solve
    /// `F(k) = 2k cos(k/2) + s sin(k/2) = 0`; continued from `s = 0` by
    /// complex Newton.
    fn symmetric_modes(s: C64, count: usize) -> Vec<C64> {
        (0..count)
            .map(|j| {
                let mut k = C64::new((2 * j + 1) as f64 * PI, 0.0);
                for step in 1..=100 {
                    let t = s * (step as f64 / 100.0);
                    for _ in 0..50 {
                        let f = k * 2.0 * (k / 2.0).cos() + t * (k / 2.0).sin();
                        let df = (k / 2.0).cos() * 2.0 - k * (k / 2.0).sin() + t * 0.5 * (k / 2.0).cos();
                        let dk = f / df;
                        k -= dk;
                        if dk.norm() < 1e-15 * k.norm() {
                            break;
                        }
                    }
                }
                k * k
            })
            .collect()
    }

    fn step(s: C64) -> Primitive1D {
        let g = Grid1D::uniform(0.0, 1.0, 2).unwrap();
        primitive_from_deltas(|_| C64::zero(), &[(0.5, s)], &g).unwrap()
    }

    #[test]
    fn imaginary_delta_matches_continued_secular_roots() {
        let s = C64::new(0.0, 10.0);
        let mut oracle = symmetric_modes(s, 4);
        oracle.extend((1..=3).map(|m| C64::new((2.0 * PI * m as f64).powi(2), 0.0)));
        oracle.sort_by(sort_key);
        oracle.truncate(5);
        let spec = eigenvalues_complex(&step(s), &BoundaryCondition1D::Dirichlet, 5, SEED_CELLS).unwrap();
        assert!(spec.refined.iter().all(|&r| r));
        assert!(spec.eigenvalues.iter().any(|l| l.im.abs() > 1.0));
        for (l, w) in spec.eigenvalues.iter().zip(&oracle) {
            assert!((l - w).norm() < 1e-8 * w.norm(), "{l} vs {w}");
        }
        for checks in &spec.site_checks {
            assert!(checks[0].y1_mismatch < 1e-8 && checks[0].jump_error() < 1e-8);
        }
    }

    #[test]
    fn real_subcase_matches_selfadjoint() {
        let u = step(C64::new(10.0, 0.0));
        for bc in [BoundaryCondition1D::Dirichlet, BoundaryCondition1D::GeneralizedNeumann] {
            let a = eigenvalues_complex(&u, &bc, 4, SEED_CELLS).unwrap();
            let b = eigenvalues_selfadjoint(&u, &bc, 4).unwrap();
            for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
                assert!((x - y).norm() < 1e-8 * y.norm().max(1.0), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn free_case_is_real() {
        let u = Primitive1D::zero(Grid1D::uniform(0.0, PI, 2).unwrap());
        let s = eigenvalues_complex(&u, &BoundaryCondition1D::Dirichlet, 4, SEED_CELLS).unwrap();
        for (k, l) in s.eigenvalues.iter().enumerate() {
            assert!(l.im.abs() <= 1e-10);
            assert!((l.re - ((k + 1) * (k + 1)) as f64).abs() < 1e-9);
        }
    }
}
