//! Dense generalized eigensolvers for `K v = λ M v` with `M` Hermitian
//! positive definite.
//!
//! Both solvers reduce to a standard problem through the Cholesky factor
//! `M = L L*`, `C = L⁻¹ K L⁻*`. The Hermitian path diagonalizes `C`
//! directly; the general path goes through a complex Schur form and
//! recovers left eigenvectors from the inverse of the right eigenvector
//! matrix, which makes the pair biorthonormal by construction.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use nalgebra::{linalg::Schur, Cholesky, ComplexField, DMatrix, SymmetricEigen};
use num_traits::Zero;

use super::CMat;
use crate::{Error, Result, C64};

/// Eigenvalues closer than `CLUSTER_TOL * (1 + |λ|)` form a cluster.
pub const CLUSTER_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct PencilProblem {
    pub stiffness: CMat,
    pub mass: CMat,
    pub count: usize,
    /// Residual bound relative to `‖K‖_F`.
    pub tol: f64,
}

impl PencilProblem {
    pub fn new(stiffness: CMat, mass: CMat, count: usize) -> Self {
        Self { stiffness, mass, count, tol: 1e-10 }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn check(&self) -> Result<usize> {
        let n = self.stiffness.nrows();
        if self.stiffness.ncols() != n || self.mass.nrows() != n || self.mass.ncols() != n {
            return Err(Error::Numerics("pencil matrices must be square and of equal size".into()));
        }
        if self.count > n {
            return Err(Error::TooManyEigenpairs { k: self.count, n });
        }
        Ok(n)
    }
}

/// Eigenpairs of a Hermitian pencil, ascending; vectors are `M`-orthonormal
/// columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub indices: Vec<usize>,
    /// Eigenvectors inside the cluster are numerically dependent.
    pub defective: bool,
}

/// Eigenpairs of a general pencil sorted by [`sort_key`].
///
/// `right` columns are `M`-normalized; `left` columns satisfy
/// `left[:,k]* M right[:,j] = δ_jk`.
#[derive(Debug, Clone)]
pub struct GeneralEigen {
    pub values: Vec<C64>,
    pub right: CMat,
    pub left: CMat,
    pub residuals: Vec<f64>,
    pub clusters: Vec<Cluster>,
}

impl GeneralEigen {
    pub fn is_defective(&self) -> bool {
        self.clusters.iter().any(|c| c.defective)
    }
}

/// Ascending real part, ties broken by ascending imaginary part.
pub fn sort_key(a: &C64, b: &C64) -> Ordering {
    a.re.partial_cmp(&b.re)
        .unwrap_or(Ordering::Equal)
        .then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
}

/// Groups of consecutive (sorted) eigenvalues within the cluster tolerance.
pub fn cluster_groups(values: &[C64]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        if let Some(g) = groups.last_mut() {
            let last = values[*g.last().unwrap()];
            if (v - last).norm() <= CLUSTER_TOL * (1.0 + v.norm().max(last.norm())) {
                g.push(i);
                continue;
            }
        }
        groups.push(vec![i]);
    }
    groups
}

fn frobenius(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn is_real(a: &CMat) -> bool {
    a.iter().all(|z| z.im == 0.0)
}

fn to_real(a: &CMat) -> DMatrix<f64> {
    a.map(|z| z.re)
}

/// `C = L⁻¹ A L⁻*` together with `L`.
fn reduce<T: ComplexField<RealField = f64> + Copy>(
    a: &DMatrix<T>,
    m: DMatrix<T>,
) -> Result<(DMatrix<T>, DMatrix<T>)> {
    let chol = Cholesky::new(m).ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let z = l
        .solve_lower_triangular(a)
        .ok_or(Error::NotPositiveDefinite)?;
    let c = l
        .solve_lower_triangular(&z.adjoint())
        .ok_or(Error::NotPositiveDefinite)?
        .adjoint();
    Ok((c, l))
}

fn hermitian_generic<T: ComplexField<RealField = f64> + Copy>(
    a: &DMatrix<T>,
    m: DMatrix<T>,
) -> Result<(Vec<f64>, DMatrix<T>)> {
    let (c, l) = reduce(a, m)?;
    let c = (&c + c.adjoint()) * T::from_real(0.5);
    let eig = SymmetricEigen::new(c);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .unwrap_or(Ordering::Equal)
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let w = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    let v = l
        .adjoint()
        .solve_upper_triangular(&w)
        .ok_or(Error::NotPositiveDefinite)?;
    Ok((values, v))
}

/// `k` smallest eigenpairs of a Hermitian pencil.
pub fn hermitian_pencil_solve(p: &PencilProblem) -> Result<HermitianEigen> {
    let n = p.check()?;
    let knorm = frobenius(&p.stiffness);
    let skew = frobenius(&(&p.stiffness - p.stiffness.adjoint()));
    if skew > 1e-12 * knorm.max(1.0) {
        return Err(Error::Numerics("stiffness matrix is not Hermitian".into()));
    }
    let (values, vectors) = if is_real(&p.stiffness) && is_real(&p.mass) {
        let (vals, v) = hermitian_generic(&to_real(&p.stiffness), to_real(&p.mass))?;
        (vals, v.map(|x| C64::new(x, 0.0)))
    } else {
        hermitian_generic(&p.stiffness, p.mass.clone())?
    };
    let k = p.count.min(n);
    let values: Vec<f64> = values.into_iter().take(k).collect();
    let vectors = vectors.columns(0, k).into_owned();
    let residuals = (0..k)
        .map(|j| {
            let v = vectors.column(j);
            let r = &p.stiffness * v - (&p.mass * v) * C64::new(values[j], 0.0);
            r.norm() / knorm.max(f64::MIN_POSITIVE)
        })
        .collect::<Vec<_>>();
    if residuals.iter().any(|&r| !(r <= p.tol)) {
        return Err(Error::NoConvergence);
    }
    Ok(HermitianEigen { values, vectors, residuals })
}

/// Right eigenvectors of an upper-triangular matrix by back substitution.
fn triangular_eigenvectors(t: &CMat) -> CMat {
    let n = t.nrows();
    let tnorm = frobenius(t).max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * tnorm;
    let mut e = CMat::zeros(n, n);
    for i in 0..n {
        let lam = t[(i, i)];
        e[(i, i)] = C64::new(1.0, 0.0);
        for j in (0..i).rev() {
            let mut s = C64::zero();
            for l in (j + 1)..=i {
                s += t[(j, l)] * e[(l, i)];
            }
            let mut d = t[(j, j)] - lam;
            if d.norm() < small {
                d = C64::new(small, 0.0);
            }
            e[(j, i)] = -s / d;
        }
        let nrm = e.column(i).norm();
        if nrm > 0.0 {
            let inv = 1.0 / nrm;
            for r in 0..=i {
                e[(r, i)] *= inv;
            }
        }
    }
    e
}

fn smallest_singular_value(a: &CMat) -> f64 {
    let svd = a.clone().svd(false, false);
    svd.singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// All eigenpairs of a general pencil (the first `count` are returned),
/// with left eigenvectors and cluster diagnostics.
pub fn general_pencil_solve(p: &PencilProblem) -> Result<GeneralEigen> {
    let n = p.check()?;
    let knorm = frobenius(&p.stiffness);
    let (c, l) = reduce(&p.stiffness, p.mass.clone())?;
    let schur = Schur::try_new(c, f64::EPSILON, 100 * n.max(10)).ok_or(Error::NoConvergence)?;
    let (q, t) = schur.unpack();
    let e = triangular_eigenvectors(&t);
    let w_all = &q * e;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sort_key(&t[(i, i)], &t[(j, j)]));
    let values_all: Vec<C64> = order.iter().map(|&i| t[(i, i)]).collect();
    let mut w = CMat::from_fn(n, n, |r, c| w_all[(r, order[c])]);
    for j in 0..n {
        let nrm = w.column(j).norm();
        if nrm > 0.0 {
            w.column_mut(j).scale_mut(1.0 / nrm);
        }
    }

    let groups = cluster_groups(&values_all);
    let mut clusters = Vec::new();
    let mut any_defective = false;
    for g in groups.iter().filter(|g| g.len() > 1) {
        let block = CMat::from_fn(n, g.len(), |r, c| w[(r, g[c])]);
        let defective = smallest_singular_value(&block) < 1e-6;
        any_defective |= defective;
        clusters.push(Cluster { indices: g.clone(), defective });
    }

    // left eigenvectors: rows of W⁻¹
    let x = match w.clone().try_inverse() {
        Some(winv) if !any_defective => winv.adjoint(),
        _ => {
            for c in clusters.iter_mut() {
                c.defective = true;
            }
            if clusters.is_empty() {
                clusters.push(Cluster { indices: (0..n).collect(), defective: true });
            }
            CMat::zeros(n, n)
        }
    };
    let lh = l.adjoint();
    let right_all = lh.solve_upper_triangular(&w).ok_or(Error::NotPositiveDefinite)?;
    let left_all = lh.solve_upper_triangular(&x).ok_or(Error::NotPositiveDefinite)?;

    let k = p.count.min(n);
    let right = right_all.columns(0, k).into_owned();
    let left = left_all.columns(0, k).into_owned();
    let values: Vec<C64> = values_all[..k].to_vec();
    let residuals: Vec<f64> = (0..k)
        .map(|j| {
            let v = right.column(j);
            let r = &p.stiffness * v - (&p.mass * v) * values[j];
            r.norm() / knorm.max(f64::MIN_POSITIVE)
        })
        .collect();
    if residuals.iter().any(|&r| !(r <= p.tol)) {
        return Err(Error::NoConvergence);
    }
    let clusters = clusters
        .into_iter()
        .filter_map(|mut c| {
            c.indices.retain(|&i| i < k);
            (c.indices.len() > 1).then_some(c)
        })
        .collect();
    Ok(GeneralEigen { values, right, left, residuals, clusters })
}
