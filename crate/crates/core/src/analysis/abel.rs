use alloc::vec::Vec;

use nalgebra::DVector;
use num_traits::{Float, Zero};

use crate::femnd::{AssembledForms, SpectrumND};
use crate::numerics::{CMat, Cluster, GeneralEigen};
use crate::{Error, Result, C64};

/// Allowed deviation of `Z* M Y` from the identity.
pub const BIORTHOGONALITY_TOL: f64 = 1e-10;

/// Truncated eigensystem of a pencil `K y = λ M y`: right vectors `y_k`,
/// left vectors `z_k` with `z_j* M y_k = δ_jk`.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<C64>,
    pub right: CMat,
    pub left: CMat,
    pub mass: CMat,
    pub clusters: Vec<Cluster>,
}

impl Eigensystem {
    pub fn from_spectrum(forms: &AssembledForms, s: &SpectrumND) -> Self {
        Self {
            values: s.eigenvalues.clone(),
            right: s.vectors.clone(),
            left: s.left.clone().unwrap_or_else(|| s.vectors.clone()),
            mass: forms.mass.to_dense(),
            clusters: s.clusters.clone(),
        }
    }

    pub fn from_general(e: GeneralEigen, mass: CMat) -> Self {
        Self { values: e.values, right: e.right, left: e.left, mass, clusters: e.clusters }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `max |(Z* M Y - I)_jk|`.
    pub fn biorthogonality_defect(&self) -> f64 {
        let g = self.left.adjoint() * &self.mass * &self.right;
        let mut d = 0.0f64;
        for j in 0..g.nrows() {
            for k in 0..g.ncols() {
                let target = if j == k { C64::new(1.0, 0.0) } else { C64::zero() };
                d = d.max((g[(j, k)] - target).norm());
            }
        }
        d
    }

    fn m_norm(&self, v: &DVector<C64>) -> f64 {
        v.dotc(&(&self.mass * v)).re.max(0.0).sqrt()
    }
}

/// Principal branch of `λ^α`, cut along the negative axis.
pub fn principal_power(lambda: C64, alpha: f64) -> C64 {
    if lambda.is_zero() {
        C64::zero()
    } else {
        C64::from_polar(lambda.norm().powf(alpha), alpha * lambda.arg())
    }
}

/// Errors of the Abel means `f(t) = Σ (f, z_k) e^{-λ_k^α t} y_k`.
#[derive(Debug, Clone)]
pub struct AbelExperiment {
    pub alpha: f64,
    pub times: Vec<f64>,
    /// `‖f(t_j) - f‖_M`.
    pub errors: Vec<f64>,
    pub f_norm: f64,
    /// `‖Σ (f, z_k) y_k - f‖_M`, the limit of the errors as `t → 0`.
    pub truncation: f64,
    pub modes: usize,
}

impl AbelExperiment {
    pub fn relative_errors(&self) -> Vec<f64> {
        self.errors.iter().map(|e| e / self.f_norm).collect()
    }

    /// Whether errors do not increase along the grid order, within `slack`.
    pub fn nonincreasing(&self, slack: f64) -> bool {
        self.errors.windows(2).all(|w| w[1] <= w[0] + slack)
    }
}

/// Abel reconstruction of the coefficient vector `f` over `times`.
///
/// Members of a cluster share the mean exponent, so near-defective pairs
/// whose coefficients nearly cancel are summed as one bracket. Fails with
/// [`Error::BranchViolation`] when some mode in the upper half of the
/// spectrum has `Re λ^α ≤ 0`.
pub fn abel_reconstruct(sys: &Eigensystem, f: &[C64], alpha: f64, times: &[f64]) -> Result<AbelExperiment> {
    if !(alpha > 0.0) {
        return Err(Error::Analysis("Abel order must be positive".into()));
    }
    if sys.is_empty() || f.len() != sys.right.nrows() {
        return Err(Error::Analysis("coefficient vector does not match the eigensystem".into()));
    }
    let defect = sys.biorthogonality_defect();
    if !(defect <= BIORTHOGONALITY_TOL) {
        return Err(Error::Analysis(alloc::format!("eigensystem not biorthonormal (defect {defect:.3e})")));
    }
    let k = sys.len();
    let mut exps: Vec<C64> = sys.values.iter().map(|&l| principal_power(l, alpha)).collect();
    for (i, e) in exps.iter().enumerate().skip(k / 2) {
        if !(e.re > 0.0) {
            return Err(Error::BranchViolation { index: i });
        }
    }
    for c in &sys.clusters {
        let mean = c.indices.iter().map(|&i| exps[i]).sum::<C64>() / c.indices.len() as f64;
        for &i in &c.indices {
            exps[i] = mean;
        }
    }
    let fv = DVector::from_column_slice(f);
    let coeffs = sys.left.adjoint() * (&sys.mass * &fv);
    let mean_at = |t: f64| {
        let w = DVector::from_fn(k, |i, _| coeffs[i] * (-exps[i] * t).exp());
        &sys.right * w
    };
    let f_norm = sys.m_norm(&fv);
    let truncation = sys.m_norm(&(mean_at(0.0) - &fv));
    let errors = times.iter().map(|&t| sys.m_norm(&(mean_at(t) - &fv))).collect();
    Ok(AbelExperiment { alpha, times: times.to_vec(), errors, f_norm, truncation, modes: k })
}

/// `count` times from `t0` down to `t1` on a geometric grid.
pub fn geometric_times(t0: f64, t1: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => alloc::vec![t1],
        _ => (0..count).map(|i| t0 * (t1 / t0).powf(i as f64 / (count - 1) as f64)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use core::f64::consts::PI;

    use super::*;
    use crate::femnd::lowest_eigenpairs;
    use crate::numerics::{general_pencil_solve, PencilProblem};
    use crate::potentials::{primitive_from_deltas, Grid1D, Primitive1D};
    use crate::quasi1d::{galerkin_1d, BoundaryCondition1D};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn principal_branch() {
        assert!((principal_power(c(4.0), 0.5) - c(2.0)).norm() < 1e-15);
        let z = principal_power(c(-1.0), 0.5);
        assert!((z - C64::new(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(principal_power(C64::zero(), 0.7), C64::zero());
    }

    #[test]
    fn two_by_two_closed_form() {
        let a = CMat::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(2.0)]);
        let m = CMat::identity(2, 2);
        let e = general_pencil_solve(&PencilProblem::new(a, m.clone(), 2)).unwrap();
        let sys = Eigensystem::from_general(e, m);
        let times = [1.0, 0.5, 0.1, 0.01];
        let ex = abel_reconstruct(&sys, &[c(0.0), c(1.0)], 1.0, &times).unwrap();
        for (t, err) in times.iter().zip(&ex.errors) {
            // f = (0,1) = √2 y_2 - y_1 with y_1 = (1,0), y_2 = (1,1)/√2
            let (e1, e2) = ((-t).exp(), (-2.0 * t).exp());
            let expect = ((e2 - e1).powi(2) + (e2 - 1.0).powi(2)).sqrt();
            assert!((err - expect).abs() < 1e-12, "t = {t}: {err} vs {expect}");
        }
        assert!(ex.truncation < 1e-12);
    }

    #[test]
    fn self_adjoint_errors_decrease() {
        let mesh = Grid1D::uniform(0.0, 1.0, 80).unwrap();
        let u = Primitive1D::zero(Grid1D::uniform(0.0, 1.0, 2).unwrap());
        let forms = galerkin_1d(&u, &BoundaryCondition1D::Dirichlet, &mesh).unwrap();
        let s = lowest_eigenpairs(&forms, 40).unwrap();
        let sys = Eigensystem::from_spectrum(&forms, &s);
        assert!(sys.biorthogonality_defect() < 1e-10);
        let f: Vec<C64> = (1..80).map(|i| c((i as f64 / 80.0) * (1.0 - i as f64 / 80.0))).collect();
        let times = geometric_times(1.0, 1e-12, 25);
        for alpha in [0.5, 1.0, 2.0] {
            let ex = abel_reconstruct(&sys, &f, alpha, &times).unwrap();
            assert!(ex.nonincreasing(1e-12), "{:?}", ex.errors);
            assert!((ex.errors[24] - ex.truncation).abs() < 1e-3 * ex.f_norm);
        }
    }

    #[test]
    fn branch_violation_detected() {
        let values = alloc::vec![c(1.0), c(2.0), C64::new(1.0, 10.0), C64::new(1.0, 20.0)];
        let sys = Eigensystem {
            values,
            right: CMat::identity(4, 4),
            left: CMat::identity(4, 4),
            mass: CMat::identity(4, 4),
            clusters: Vec::new(),
        };
        let f = [c(1.0), c(0.0), c(0.0), c(0.0)];
        assert!(abel_reconstruct(&sys, &f, 1.0, &[0.1]).is_ok());
        assert_eq!(abel_reconstruct(&sys, &f, 3.0, &[0.1]).unwrap_err(), Error::BranchViolation { index: 2 });
    }

    #[test]
    fn complex_delta_smooth_datum() {
        let mesh = Grid1D::uniform(0.0, 1.0, 200).unwrap();
        let g = Grid1D::uniform(0.0, 1.0, 2).unwrap();
        let u = primitive_from_deltas(|_| C64::zero(), &[(0.5, C64::new(0.0, 10.0))], &g).unwrap();
        let forms = galerkin_1d(&u, &BoundaryCondition1D::Dirichlet, &mesh).unwrap();
        let s = lowest_eigenpairs(&forms, 100).unwrap();
        assert!(!s.hermitian);
        let sys = Eigensystem::from_spectrum(&forms, &s);
        let f: Vec<C64> = (1..200).map(|i| c((PI * i as f64 / 200.0).sin())).collect();
        let ex = abel_reconstruct(&sys, &f, 1.0, &geometric_times(1e-1, 1e-5, 9)).unwrap();
        assert!(ex.nonincreasing(1e-10), "{:?}", ex.errors);
        assert!(ex.errors[8] <= 0.05 * ex.f_norm, "{:?}", ex.relative_errors());
    }
}
