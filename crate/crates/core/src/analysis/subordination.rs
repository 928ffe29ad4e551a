use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::{Float, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numerics::CMat;
use crate::potentials::Primitive1D;
use crate::{Error, Result, C64};

/// Ascent steps per random start.
pub const ASCENT_STEPS: usize = 400;

/// `∫_{y0}^{y1} (α + β y) cos(k y) dy`.
fn linear_cos_moment(alpha: C64, beta: C64, k: f64, y0: f64, y1: f64) -> C64 {
    if k == 0.0 {
        return alpha * (y1 - y0) + beta * (0.5 * (y1 * y1 - y0 * y0));
    }
    let prim = |y: f64| {
        let (s, c) = (k * y).sin_cos();
        alpha * (s / k) + beta * (y * s / k + c / (k * k))
    };
    prim(y1) - prim(y0)
}

/// `q = u'` compressed to the span of the first `modes` Dirichlet
/// eigenfunctions of `-d²/dx²` and scaled by `T0^{-θ/2}` on both sides.
///
/// The supremum of `|(q f, f)| / (T0^θ f, f)` over the span is the
/// numerical radius of this matrix.
#[derive(Debug, Clone)]
pub struct SubordinationProblem {
    pub theta: f64,
    pub modes: usize,
    /// `(q φ_k, φ_j)`.
    pub q: CMat,
    /// `λ_k^θ`.
    pub weights: Vec<f64>,
}

impl SubordinationProblem {
    pub fn new(u: &Primitive1D, theta: f64, modes: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&theta) {
            return Err(Error::Analysis("subordination order θ must lie in [0, 1)".into()));
        }
        if modes == 0 {
            return Err(Error::Analysis("subordination needs at least one mode".into()));
        }
        let (a, len) = (u.a(), u.b() - u.a());
        let w = PI / len;
        // smooth part: C[m] = ∫ u_c' cos(m w y) dy, u_c' linear on each cell
        let mut cosine = alloc::vec![C64::zero(); 2 * modes + 1];
        let grid = u.grid();
        let smooth = u.cells().iter().any(|c| !c[1].is_zero() || !c[2].is_zero());
        if smooth {
            for (i, c) in u.cells().iter().enumerate() {
                let (x0, x1) = grid.cell(i);
                let (y0, y1) = (x0 - a, x1 - a);
                // u' = c1 + 2 c2 (y - y0)
                let beta = c[2] * 2.0;
                let alpha = c[1] - beta * y0;
                for (m, slot) in cosine.iter_mut().enumerate() {
                    *slot += linear_cos_moment(alpha, beta, m as f64 * w, y0, y1);
                }
            }
        }
        let mut q = CMat::from_fn(modes, modes, |j, k| {
            let (j, k) = (j as i64 + 1, k as i64 + 1);
            (cosine[(j - k).unsigned_abs() as usize] - cosine[(j + k) as usize]) / len
        });
        for jump in u.jumps() {
            let phi: Vec<f64> = (1..=modes).map(|k| (2.0 / len).sqrt() * (k as f64 * w * (jump.site - a)).sin()).collect();
            for j in 0..modes {
                for k in 0..modes {
                    q[(j, k)] += jump.height * (phi[j] * phi[k]);
                }
            }
        }
        let weights = (1..=modes).map(|k| (k as f64 * w).powi(2).powf(theta)).collect();
        Ok(Self { theta, modes, q, weights })
    }

    /// `|(q f, f)| / (T0^θ f, f)` for `f = Σ c_k φ_k`.
    pub fn ratio(&self, c: &[C64]) -> f64 {
        let qc = &self.q * nalgebra::DVector::from_column_slice(c);
        let num: C64 = c.iter().zip(qc.iter()).map(|(a, b)| a.conj() * b).sum();
        let den: f64 = c.iter().zip(&self.weights).map(|(a, w)| a.norm_sqr() * w).sum();
        if den > 0.0 {
            num.norm() / den
        } else {
            0.0
        }
    }

    /// Best ratio over `samples` random starts, each improved by ascent on
    /// the rotated Hermitian part in `T0^{θ/2}`-scaled coordinates.
    pub fn estimate(&self, samples: usize, seed: u64) -> SubordinationEstimate {
        let n = self.modes;
        let scale: Vec<f64> = self.weights.iter().map(|w| 1.0 / w.sqrt()).collect();
        let s = CMat::from_fn(n, n, |j, k| self.q[(j, k)] * (scale[j] * scale[k]));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = 0.0f64;
        for _ in 0..samples {
            let mut d = nalgebra::DVector::from_fn(n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let mut last = 0.0f64;
            for _ in 0..ASCENT_STEPS {
                let norm = d.norm();
                if !(norm > 0.0) {
                    break;
                }
                d /= C64::new(norm, 0.0);
                let sd = &s * &d;
                let z = d.dotc(&sd);
                let value = z.norm();
                best = best.max(value);
                if value == 0.0 || (value - last).abs() <= 1e-13 * value {
                    break;
                }
                last = value;
                // power step on H = (e^{-iφ}S + e^{iφ}S*)/2, φ = arg z
                let ph = if z.norm() > 0.0 { z.conj() / z.norm() } else { C64::new(1.0, 0.0) };
                let sad = s.ad_mul(&d);
                d = (sd * ph + sad * ph.conj()) * C64::new(0.5, 0.0);
            }
        }
        SubordinationEstimate { value: best, theta: self.theta, modes: n, samples, seed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubordinationEstimate {
    /// Estimate of `sup |(q f, f)| / (T0^θ f, f)`.
    pub value: f64,
    pub theta: f64,
    pub modes: usize,
    pub samples: usize,
    pub seed: u64,
}

/// Randomized estimate of the smallest `C` with `|(q f, f)| ≤ C (T0^θ f, f)`
/// on the first `modes` Dirichlet modes of the interval of `u`.
pub fn subordination_estimate(u: &Primitive1D, theta: f64, modes: usize, samples: usize, seed: u64) -> Result<SubordinationEstimate> {
    Ok(SubordinationProblem::new(u, theta, modes)?.estimate(samples, seed))
}
