use alloc::vec::Vec;

use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Shooting,
    Galerkin,
}

/// Sampled eigenfunction with its quasi-derivative.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Eigenfunction1D {
    pub x: Vec<f64>,
    pub y: Vec<C64>,
    pub y1: Vec<C64>,
}

impl Eigenfunction1D {
    pub fn max_abs(&self) -> f64 {
        self.y.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Sign changes of `Re y` strictly inside the interval, ignoring
    /// samples below `1e-10 · max|y|`.
    pub fn sign_changes(&self) -> usize {
        let floor = 1e-10 * self.max_abs();
        let n = self.y.len();
        let mut last = 0.0f64;
        let mut count = 0;
        for z in self.y.iter().take(n.saturating_sub(1)).skip(1) {
            if z.re.abs() <= floor {
                continue;
            }
            if last != 0.0 && last.signum() != z.re.signum() {
                count += 1;
            }
            last = z.re;
        }
        count
    }
}

/// Matching of left and right shooting solutions at a jump site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteCheck {
    pub site: f64,
    pub strength: C64,
    /// `|y(c-) - y(c+)| / max|y|`.
    pub y_mismatch: f64,
    /// `|y1(c-) - y1(c+)| / max|y|`.
    pub y1_mismatch: f64,
    /// `y'(c+) - y'(c-)`.
    pub derivative_jump: C64,
    /// `s · y(c)`.
    pub expected_jump: C64,
}

impl SiteCheck {
    /// `|y' jump - s y(c)| / max|y|` (eigenfunction scaled to `max|y| = 1`).
    pub fn jump_error(&self) -> f64 {
        (self.derivative_jump - self.expected_jump).norm()
    }
}

/// Eigenvalues of a 1D problem, sorted by real then imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum1D {
    pub eigenvalues: Vec<C64>,
    pub eigenfunctions: Vec<Eigenfunction1D>,
    /// Shooting: Hadamard-normalized characteristic; Galerkin: pencil
    /// residual relative to `‖A + B‖_F`.
    pub residuals: Vec<f64>,
    pub engine: Engine,
    /// Groups of indices within the cluster tolerance.
    pub clusters: Vec<Vec<usize>>,
    /// `false` where Newton refinement failed and the Galerkin value stands.
    pub refined: Vec<bool>,
    /// Per eigenvalue, one entry per jump site (separated conditions only).
    pub site_checks: Vec<Vec<SiteCheck>>,
}

impl Spectrum1D {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Real parts (exact spectrum of self-adjoint problems).
    pub fn real_values(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }
}
