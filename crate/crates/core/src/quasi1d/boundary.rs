use num_complex::ComplexFloat;
use num_traits::{Float, One, Zero};

use super::transfer::{total_transfer, QuasiState, ScaledTransfer};
use crate::potentials::Primitive1D;
use crate::C64;

/// Boundary forms `U (y(a), y1(a), y(b), y1(b))ᵀ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition1D {
    /// `y(a) = y(b) = 0`.
    Dirichlet,
    /// `y1(a) = y1(b) = 0`.
    GeneralizedNeumann,
    /// `y1(a) = α y(a)`, `y1(b) = β y(b)`.
    ThirdKind { alpha: C64, beta: C64 },
    /// `y(a) = e^{iθ} y(b)`, `y1(a) = e^{iθ} y1(b)`.
    QuasiPeriodic { theta: f64 },
}

impl BoundaryCondition1D {
    /// The 2×4 matrix `U`.
    pub fn matrix(&self) -> [[C64; 4]; 2] {
        let (o, z) = (C64::one(), C64::zero());
        match *self {
            Self::Dirichlet => [[o, z, z, z], [z, z, o, z]],
            Self::GeneralizedNeumann => [[z, o, z, z], [z, z, z, o]],
            Self::ThirdKind { alpha, beta } => [[-alpha, o, z, z], [z, z, -beta, o]],
            Self::QuasiPeriodic { theta } => {
                let e = -C64::from_polar(1.0, theta);
                [[o, z, e, z], [z, o, z, e]]
            }
        }
    }

    /// Whether each row involves only one endpoint.
    pub fn is_separated(&self) -> bool {
        !matches!(self, Self::QuasiPeriodic { .. })
    }

    /// Whether the boundary data are real (self-adjoint for real `u`).
    pub fn is_real(&self) -> bool {
        match *self {
            Self::ThirdKind { alpha, beta } => alpha.im == 0.0 && beta.im == 0.0,
            _ => true,
        }
    }

    /// Nonzero state at `a` satisfying the left condition (separated only).
    pub fn left_state(&self) -> Option<QuasiState> {
        match *self {
            Self::Dirichlet => Some(QuasiState::real(0.0, 1.0)),
            Self::GeneralizedNeumann => Some(QuasiState::real(1.0, 0.0)),
            Self::ThirdKind { alpha, .. } => Some(QuasiState::new(C64::one(), alpha)),
            Self::QuasiPeriodic { .. } => None,
        }
    }

    /// Nonzero state at `b` satisfying the right condition (separated only).
    pub fn right_state(&self) -> Option<QuasiState> {
        match *self {
            Self::Dirichlet => Some(QuasiState::real(0.0, 1.0)),
            Self::GeneralizedNeumann => Some(QuasiState::real(1.0, 0.0)),
            Self::ThirdKind { beta, .. } => Some(QuasiState::new(C64::one(), beta)),
            Self::QuasiPeriodic { .. } => None,
        }
    }

    /// Rank of `U` (2 for every variant; kept as a checkable invariant).
    pub fn rank(&self) -> usize {
        let u = self.matrix();
        let mut best = 0.0f64;
        for i in 0..4 {
            for j in i + 1..4 {
                best = best.max((u[0][i] * u[1][j] - u[0][j] * u[1][i]).norm());
            }
        }
        if best > 0.0 {
            2
        } else if u.iter().flatten().any(|z| !z.is_zero()) {
            1
        } else {
            0
        }
    }
}

/// Characteristic determinant `det(U_a + U_b T)` in scaled form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Characteristic {
    /// `det(e^{-L} U_a + U_b T̃)` where `T = e^L T̃`.
    pub value: C64,
    /// `2L`: the full determinant is `value · exp(log_scale)`.
    pub log_scale: f64,
    /// The 2×2 matrix whose determinant is `value`.
    pub matrix: [[C64; 2]; 2],
}

impl Characteristic {
    /// `|det| / (‖row₁‖ ‖row₂‖)`, in `[0, 1]` by Hadamard's inequality.
    pub fn relative(&self) -> f64 {
        let r = |i: usize| (self.matrix[i][0].norm_sqr() + self.matrix[i][1].norm_sqr()).sqrt();
        let d = r(0) * r(1);
        if d > 0.0 {
            self.value.norm() / d
        } else {
            0.0
        }
    }

    /// Null vector `(y(a), y1(a))` of the matrix, from its dominant row.
    pub fn null_state(&self) -> QuasiState {
        let m = &self.matrix;
        let r0 = m[0][0].norm_sqr() + m[0][1].norm_sqr();
        let r1 = m[1][0].norm_sqr() + m[1][1].norm_sqr();
        let row = if r0 >= r1 { m[0] } else { m[1] };
        if row[0].is_zero() && row[1].is_zero() {
            return QuasiState::real(1.0, 0.0);
        }
        QuasiState::new(row[1], -row[0])
    }
}

pub(crate) fn characteristic_from(t: &ScaledTransfer, bc: &BoundaryCondition1D) -> Characteristic {
    let u = bc.matrix();
    let s = (-t.log_scale).exp();
    let tm = &t.matrix.m;
    let mut m = [[C64::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = u[i][j] * s + u[i][2] * tm[0][j] + u[i][3] * tm[1][j];
        }
    }
    Characteristic {
        value: m[0][0] * m[1][1] - m[0][1] * m[1][0],
        log_scale: 2.0 * t.log_scale,
        matrix: m,
    }
}

/// `λ ↦ det(U_a + U_b T(λ))`; vanishes exactly on the spectrum.
pub fn characteristic(u: &Primitive1D, lambda: C64, bc: &BoundaryCondition1D) -> Characteristic {
    characteristic_from(&total_transfer(u, lambda), bc)
}

/// Newton-correction size `|χ / χ'| / (1 + |λ|)`: the relative distance
/// from `λ` to the nearest root, insensitive to how `χ` is scaled.
pub fn root_residual(u: &Primitive1D, lambda: C64, bc: &BoundaryCondition1D) -> f64 {
    let d = 1e-6 * (1.0 + lambda.norm());
    let c = characteristic(u, lambda, bc);
    if c.value.norm() == 0.0 {
        return 0.0;
    }
    let at = |l: C64| {
        let e = characteristic(u, l, bc);
        e.value * (e.log_scale - c.log_scale).exp()
    };
    let slope = (at(lambda + d) - at(lambda - d)) / (2.0 * d);
    (c.value / slope).norm() / (1.0 + lambda.norm())
}

/// Real-valued restriction for self-adjoint data: the quasi-periodic
/// determinant carries the phase `e^{iθ}`, removed here.
pub fn characteristic_real(u: &Primitive1D, lambda: f64, bc: &BoundaryCondition1D) -> f64 {
    let c = characteristic(u, C64::new(lambda, 0.0), bc);
    match *bc {
        BoundaryCondition1D::QuasiPeriodic { theta } => (c.value * C64::from_polar(1.0, -theta)).re,
        _ => c.value.re,
    }
}
