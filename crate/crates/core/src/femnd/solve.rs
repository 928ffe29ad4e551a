use alloc::vec::Vec;

use num_traits::Zero;

use super::AssembledForms;
use crate::numerics::{
    cluster_groups, general_pencil_solve, hermitian_pencil_solve, shift_invert_hermitian, CMat, Cluster,
    HermitianEigen, PencilProblem,
};
use crate::{Error, Result, C64};

/// Largest pencil solved by the dense nonsymmetric path.
pub const DENSE_CAP: usize = 1200;
/// Hermitian pencils above this size use sparse shift-invert.
pub const HERMITIAN_DENSE_LIMIT: usize = 500;
/// Residual tolerance relative to `‖A + B‖_F`.
pub const EIGEN_TOL: f64 = 1e-10;

/// Lowest eigenpairs of an assembled pencil.
#[derive(Debug, Clone)]
pub struct SpectrumND {
    /// Ascending real part, ties by imaginary part.
    pub eigenvalues: Vec<C64>,
    /// Right eigenvectors as columns (unknown coefficients), `M`-normalized
    /// on the Hermitian path.
    pub vectors: CMat,
    /// Left eigenvectors with `z_j* M y_k = δ_jk` (nonsymmetric path only).
    pub left: Option<CMat>,
    /// `‖(A+B)v - λMv‖ / (‖A+B‖_F ‖v‖)`.
    pub residuals: Vec<f64>,
    pub clusters: Vec<Cluster>,
    pub hermitian: bool,
    /// `∫_∂Ω |(∇f - V f)·n|` per eigenpair when computed (Neumann only).
    pub flux: Vec<f64>,
}

impl SpectrumND {
    pub fn real_values(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }

    pub fn is_defective(&self) -> bool {
        self.clusters.iter().any(|c| c.defective)
    }

    fn from_hermitian(e: HermitianEigen) -> Self {
        let values: Vec<C64> = e.values.iter().map(|&v| C64::new(v, 0.0)).collect();
        let clusters = cluster_groups(&values)
            .into_iter()
            .filter(|g| g.len() > 1)
            .map(|indices| Cluster { indices, defective: false })
            .collect();
        Self {
            eigenvalues: values,
            vectors: e.vectors,
            left: None,
            residuals: e.residuals,
            clusters,
            hermitian: true,
            flux: Vec::new(),
        }
    }
}

/// Whether `A + B` is Hermitian to roundoff.
pub fn is_hermitian(forms: &AssembledForms) -> bool {
    let k = forms.total();
    k.hermitian_defect() <= 1e-13 * k.frobenius_norm().max(1.0)
}

/// The `count` eigenpairs of `(A + B) v = λ M v` with smallest real part.
///
/// Hermitian pencils go to a dense symmetric solver up to
/// [`HERMITIAN_DENSE_LIMIT`] and to sparse shift-invert above it (dense
/// fallback on breakdown, within [`DENSE_CAP`]). Other pencils use the dense
/// nonsymmetric solver, which refuses sizes above [`DENSE_CAP`].
pub fn lowest_eigenpairs(forms: &AssembledForms, count: usize) -> Result<SpectrumND> {
    let n = forms.dim();
    if count >= n {
        return Err(Error::TooManyEigenpairs { k: count, n });
    }
    let k = forms.total();
    if is_hermitian(forms) {
        if n > HERMITIAN_DENSE_LIMIT {
            match shift_invert_hermitian(&k, &forms.mass, count, EIGEN_TOL) {
                Ok(e) => return Ok(SpectrumND::from_hermitian(e)),
                Err(Error::NoConvergence | Error::SingularPencil) if n <= DENSE_CAP => {}
                Err(e) => return Err(e),
            }
        }
        let p = PencilProblem::new(k.to_dense(), forms.mass.to_dense(), count).with_tol(EIGEN_TOL);
        return hermitian_pencil_solve(&p).map(SpectrumND::from_hermitian);
    }
    if n > DENSE_CAP {
        return Err(Error::DimensionCap { n, cap: DENSE_CAP });
    }
    let p = PencilProblem::new(k.to_dense(), forms.mass.to_dense(), count).with_tol(EIGEN_TOL);
    let e = general_pencil_solve(&p)?;
    Ok(SpectrumND {
        eigenvalues: e.values,
        vectors: e.right,
        left: Some(e.left),
        residuals: e.residuals,
        clusters: e.clusters,
        hermitian: false,
        flux: Vec::new(),
    })
}

/// Nodal values of eigenvector `j`.
pub fn nodal_values(forms: &AssembledForms, spectrum: &SpectrumND, j: usize) -> Vec<C64> {
    let col: Vec<C64> = spectrum.vectors.column(j).iter().copied().collect();
    let mut v = forms.expand(&col);
    // fix the phase: largest entry real positive
    let peak = v.iter().copied().fold(C64::zero(), |m, z| if z.norm() > m.norm() { z } else { m });
    if peak.norm() > 0.0 {
        let ph = peak.conj() / peak.norm();
        v.iter_mut().for_each(|z| *z *= ph);
    }
    v
}
