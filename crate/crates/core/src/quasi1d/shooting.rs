//! Self-adjoint eigenvalues by bracketing the real characteristic function.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::ComplexFloat;
use num_traits::{Float, Zero};

use super::boundary::{characteristic, characteristic_real, root_residual, BoundaryCondition1D};
use super::spectrum::{Eigenfunction1D, Engine, SiteCheck, Spectrum1D};
use super::transfer::{oscillation_width, propagate_backward, propagate_sampled, QuasiState};
use crate::numerics::{cluster_groups, roots_on_samples, RootKind};
use crate::potentials::Primitive1D;
use crate::{Error, Result, C64};

/// Scan points per free-spectrum gap `π / (b - a)` in `√(λ - λ_lo)`.
const SAMPLES_PER_GAP: usize = 8;
const WINDOW_GROWTHS: usize = 8;
const SCAN_REFINEMENTS: usize = 3;

/// Strict lower bound for the spectrum of the real problem:
/// `a[y] ≥ ¼‖y'‖² - (2‖u‖∞² + 4γ² + γ/L)‖y‖²` with `γ = |α| + |β|`.
pub fn spectral_lower_bound(u: &Primitive1D, bc: &BoundaryCondition1D) -> f64 {
    let len = u.b() - u.a();
    let gamma = match *bc {
        BoundaryCondition1D::ThirdKind { alpha, beta } => alpha.norm() + beta.norm(),
        _ => 0.0,
    };
    -(2.0 * u.sup_norm().powi(2) + 4.0 * gamma * gamma + gamma / len) - 1.0
}

/// Eigenfunction at an eigenvalue, sampled finely enough to resolve
/// oscillation, normalized to unit `L2` norm with `max |y|` real positive.
pub fn eigenfunction(u: &Primitive1D, lambda: C64, bc: &BoundaryCondition1D) -> Eigenfunction1D {
    let c = characteristic(u, lambda, bc);
    let init = c.null_state();
    let tr = propagate_sampled(u, lambda, init, oscillation_width(u, lambda));
    let states = tr.uniform_states();
    let mut y: Vec<C64> = states.iter().map(|s| s.y).collect();
    let mut y1: Vec<C64> = states.iter().map(|s| s.y1).collect();
    // trapezoidal L2 norm
    let mut n2 = 0.0;
    for i in 1..tr.x.len() {
        n2 += 0.5 * (tr.x[i] - tr.x[i - 1]) * (y[i].norm_sqr() + y[i - 1].norm_sqr());
    }
    let peak = y.iter().copied().fold(C64::zero(), |m, z| if z.norm() > m.norm() { z } else { m });
    if n2 > 0.0 && peak.norm() > 0.0 {
        let phase = peak.conj() / peak.norm();
        let s = phase / n2.sqrt();
        y.iter_mut().for_each(|z| *z *= s);
        y1.iter_mut().for_each(|z| *z *= s);
    }
    Eigenfunction1D { x: tr.x, y, y1 }
}

/// Matches solutions shot from both ends at every jump site.
pub fn site_checks(u: &Primitive1D, lambda: C64, bc: &BoundaryCondition1D) -> Vec<SiteCheck> {
    let (Some(left), Some(right)) = (bc.left_state(), bc.right_state()) else {
        return Vec::new();
    };
    if u.jumps().is_empty() {
        return Vec::new();
    }
    let w = oscillation_width(u, lambda);
    let fw = propagate_sampled(u, lambda, left, w);
    let bw = propagate_backward(u, lambda, right, Some(w));
    let fs = fw.uniform_states();
    let peak = fs.iter().map(|s| s.y.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    u.jumps()
        .iter()
        .map(|j| {
            let i = fw.x.iter().position(|&x| x == j.site).expect("jump sites are panel ends");
            let l = fs[i].scaled(1.0 / peak);
            // right branch: least-squares multiple of the backward state
            let r0 = bw.states[i];
            let k = (r0.y.conj() * l.y + r0.y1.conj() * l.y1) / (r0.y.norm_sqr() + r0.y1.norm_sqr());
            let r = QuasiState::new(r0.y * k, r0.y1 * k);
            let (um, up) = u.one_sided(j.site);
            let yc = 0.5 * (l.y + r.y);
            SiteCheck {
                site: j.site,
                strength: j.height,
                y_mismatch: (l.y - r.y).norm(),
                y1_mismatch: (l.y1 - r.y1).norm(),
                derivative_jump: (r.y1 + up * r.y) - (l.y1 + um * l.y),
                expected_jump: j.height * yc,
            }
        })
        .collect()
}

fn scan(u: &Primitive1D, bc: &BoundaryCondition1D, count: usize, per_gap: usize) -> Result<Vec<f64>> {
    let lo = spectral_lower_bound(u, bc);
    let gap = PI / (u.b() - u.a());
    let mut z_max = (count as f64 + 2.0) * gap + (2.0 * lo.abs()).sqrt();
    let mut found = 0;
    for _ in 0..WINDOW_GROWTHS {
        let n = ((z_max / gap) * per_gap as f64).ceil() as usize;
        let samples: Vec<f64> = (0..=n)
            .map(|i| {
                let z = z_max * i as f64 / n as f64;
                lo + z * z
            })
            .collect();
        let list = roots_on_samples(|l| characteristic_real(u, l, bc), &samples, count);
        let mut values = Vec::with_capacity(count);
        for r in &list.roots {
            values.push(r.x);
            if r.kind == RootKind::Tangency {
                values.push(r.x);
            }
        }
        if values.len() >= count {
            values.truncate(count);
            return Ok(values);
        }
        found = values.len();
        z_max *= 2.0;
    }
    Err(Error::BracketExhausted { found, wanted: count })
}

/// The `count` lowest eigenvalues of a problem with real `u` and real
/// boundary data.
///
/// Roots are scanned in `√(λ - λ_lo)` above a certified lower bound
/// `λ_lo`. With separated conditions the `s`-th eigenfunction must have
/// `s - 1` interior sign changes; a mismatch triggers a finer rescan.
pub fn eigenvalues_selfadjoint(u: &Primitive1D, bc: &BoundaryCondition1D, count: usize) -> Result<Spectrum1D> {
    if !u.is_real() || !bc.is_real() {
        return Err(Error::Quasi("self-adjoint solver needs real potential and boundary data".into()));
    }
    let mut per_gap = SAMPLES_PER_GAP;
    for attempt in 0..=SCAN_REFINEMENTS {
        let values = scan(u, bc, count, per_gap)?;
        let lambdas: Vec<C64> = values.iter().map(|&l| C64::new(l, 0.0)).collect();
        let eigenfunctions: Vec<Eigenfunction1D> = lambdas.iter().map(|&l| eigenfunction(u, l, bc)).collect();
        let ordered = !bc.is_separated()
            || eigenfunctions.iter().enumerate().all(|(s, f)| f.sign_changes() == s);
        if !ordered {
            if attempt < SCAN_REFINEMENTS {
                per_gap *= 4;
                continue;
            }
            return Err(Error::Quasi("oscillation count disagrees with eigenvalue index".into()));
        }
        let residuals = lambdas.iter().map(|&l| root_residual(u, l, bc)).collect();
        let site_checks = lambdas.iter().map(|&l| site_checks(u, l, bc)).collect();
        return Ok(Spectrum1D {
            clusters: cluster_groups(&lambdas),
            refined: alloc::vec![true; lambdas.len()],
            eigenvalues: lambdas,
            eigenfunctions,
            residuals,
            engine: Engine::Shooting,
            site_checks,
        });
    }
    unreachable!("loop returns on its last attempt")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::bracketed_roots;
    use crate::potentials::{primitive_from_deltas, Grid1D};

    fn step(len: f64, s: f64, cells: usize) -> Primitive1D {
        let g = Grid1D::uniform(0.0, len, cells).unwrap();
        primitive_from_deltas(|_| C64::zero(), &[(len / 2.0, C64::new(s, 0.0))], &g).unwrap()
    }

    #[test]
    fn free_dirichlet() {
        let u = Primitive1D::zero(Grid1D::uniform(0.0, PI, 4).unwrap());
        let s = eigenvalues_selfadjoint(&u, &BoundaryCondition1D::Dirichlet, 5).unwrap();
        for (k, l) in s.real_values().iter().enumerate() {
            let want = ((k + 1) * (k + 1)) as f64;
            assert!((l - want).abs() < 1e-10 * want, "{l}");
        }
        assert!(s.residuals.iter().all(|&r| r < 1e-10));
    }

    #[test]
    fn free_neumann_starts_at_zero() {
        let u = Primitive1D::zero(Grid1D::uniform(0.0, PI, 4).unwrap());
        let s = eigenvalues_selfadjoint(&u, &BoundaryCondition1D::GeneralizedNeumann, 4).unwrap();
        for (k, l) in s.real_values().iter().enumerate() {
            assert!((l - (k * k) as f64).abs() < 1e-10, "{k}: {l}");
        }
    }

    #[test]
    fn robin_secular_equation() {
        // y' = α y at 0, y' = β y at π: k(α-β) cos kπ = (k² + αβ) sin kπ
        let (alpha, beta) = (1.0, -1.0);
        let f = |k: f64| k * (alpha - beta) * (k * PI).cos() - (k * k + alpha * beta) * (k * PI).sin();
        let oracle = bracketed_roots(f, 1e-6, 5.0, 5000, 4);
        let u = Primitive1D::zero(Grid1D::uniform(0.0, PI, 4).unwrap());
        let bc = BoundaryCondition1D::ThirdKind { alpha: C64::new(alpha, 0.0), beta: C64::new(beta, 0.0) };
        let s = eigenvalues_selfadjoint(&u, &bc, 4).unwrap();
        for (r, l) in oracle.roots.iter().zip(s.real_values()) {
            let want = r.x * r.x;
            assert!((l - want).abs() < 1e-9 * want, "{l} vs {want}");
        }
    }

    /// Dirichlet on (0,1) with `s δ(x - 1/2)`: symmetric modes solve
    /// `2k cos(k/2) + s sin(k/2) = 0`, antisymmetric ones are `(2πm)²`.
    fn delta_dirichlet_oracle(s: f64, count: usize) -> Vec<f64> {
        let sym = bracketed_roots(|k| 2.0 * k * (k / 2.0).cos() + s * (k / 2.0).sin(), 1e-9, 60.0, 20000, count);
        let mut all: Vec<f64> = sym.roots.iter().map(|r| r.x * r.x).collect();
        all.extend((1..=count).map(|m| (2.0 * PI * m as f64).powi(2)));
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        all.truncate(count);
        all
    }

    #[test]
    fn delta_dirichlet_matches_secular_equation() {
        let u = step(1.0, 10.0, 2);
        let s = eigenvalues_selfadjoint(&u, &BoundaryCondition1D::Dirichlet, 6).unwrap();
        for (l, want) in s.real_values().iter().zip(delta_dirichlet_oracle(10.0, 6)) {
            assert!((l - want).abs() < 1e-9 * want, "{l} vs {want}");
        }
        for (k, checks) in s.site_checks.iter().enumerate() {
            let c = checks[0];
            assert!(c.y1_mismatch < 1e-8 && c.y_mismatch < 1e-8, "{k}: {c:?}");
            assert!(c.jump_error() < 1e-8, "{k}: {c:?}");
        }
    }

    fn sinc(t: f64) -> f64 {
        if t == 0.0 {
            1.0
        } else {
            t.sin() / t
        }
    }

    #[test]
    fn delta_neumann_matches_jump_matching() {
        // the form ‖y'‖² - 10(|y(1)|² - |y(1/2)|²) reaches about -100 on
        // boundary layers e^{10(x-1)}, so the oracle window starts at -200
        // y = cos kx on the left (y1(0) = y'(0) = 0), derivative jump 10 y(c),
        // condition y1(1) = y'(1) - 10 y(1) = 0; λ < 0 uses cosh.
        let secular = |l: f64| -> f64 {
            let c = 0.5;
            let (y, dy, yr, dyr);
            if l >= 0.0 {
                let k = l.sqrt();
                y = (k * c).cos();
                dy = -k * (k * c).sin() + 10.0 * y;
                yr = y * (k * c).cos() + dy * c * sinc(k * c);
                dyr = -y * k * (k * c).sin() + dy * (k * c).cos();
            } else {
                let k = (-l).sqrt();
                y = (k * c).cosh();
                dy = k * (k * c).sinh() + 10.0 * y;
                yr = y * (k * c).cosh() + dy / k * (k * c).sinh();
                dyr = y * k * (k * c).sinh() + dy * (k * c).cosh();
            }
            dyr - 10.0 * yr
        };
        let oracle = bracketed_roots(secular, -200.0, 200.0, 40001, 3);
        let u = step(1.0, 10.0, 2);
        let s = eigenvalues_selfadjoint(&u, &BoundaryCondition1D::GeneralizedNeumann, 3).unwrap();
        assert_eq!(oracle.roots.len(), 3);
        for (l, r) in s.real_values().iter().zip(&oracle.roots) {
            assert!((l - r.x).abs() < 1e-9 * r.x.abs().max(1.0), "{l} vs {}", r.x);
        }
        assert!(s.real_values()[0] < -90.0);
    }

    #[test]
    fn periodic_double_eigenvalues() {
        let u = Primitive1D::zero(Grid1D::uniform(0.0, 2.0 * PI, 4).unwrap());
        let s = eigenvalues_selfadjoint(&u, &BoundaryCondition1D::QuasiPeriodic { theta: 0.0 }, 5).unwrap();
        let want = [0.0, 1.0, 1.0, 4.0, 4.0];
        for (l, w) in s.real_values().iter().zip(want) {
            assert!((l - w).abs() < 1e-6, "{l} vs {w}");
        }
        assert_eq!(s.clusters.len(), 3);
    }

    #[test]
    fn constant_shift_leaves_dirichlet_spectrum() {
        let u = step(1.0, 4.0, 4);
        let a = eigenvalues_selfadjoint(&u, &BoundaryCondition1D::Dirichlet, 4).unwrap();
        let b = eigenvalues_selfadjoint(&u.shifted(C64::new(3.0, 0.0)), &BoundaryCondition1D::Dirichlet, 4).unwrap();
        for (x, y) in a.real_values().iter().zip(b.real_values()) {
            assert!((x - y).abs() < 1e-8 * x.abs().max(1.0));
        }
        let c = eigenvalues_selfadjoint(&u, &BoundaryCondition1D::GeneralizedNeumann, 2).unwrap();
        let d =
            eigenvalues_selfadjoint(&u.shifted(C64::new(3.0, 0.0)), &BoundaryCondition1D::GeneralizedNeumann, 2).unwrap();
        assert!((c.real_values()[0] - d.real_values()[0]).abs() > 1e-3);
    }

    #[test]
    fn oscillation_counts() {
        let g = Grid1D::uniform(0.0, 1.0, 8).unwrap();
        let u = primitive_from_deltas(|x| C64::new(3.0 * x * x, 0.0), &[(0.25, C64::new(-6.0, 0.0))], &g).unwrap();
        let s = eigenvalues_selfadjoint(&u, &BoundaryCondition1D::Dirichlet, 8).unwrap();
        for (k, f) in s.eigenfunctions.iter().enumerate() {
            assert_eq!(f.sign_changes(), k);
        }
    }

    #[test]
    fn complex_data_rejected() {
        let u = Primitive1D::zero(Grid1D::uniform(0.0, 1.0, 2).unwrap()).shifted(C64::new(0.0, 1.0));
        assert!(eigenvalues_selfadjoint(&u, &BoundaryCondition1D::Dirichlet, 1).is_err());
    }
}
