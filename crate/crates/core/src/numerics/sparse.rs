//! Compressed sparse rows, envelope Cholesky and a shift-invert subspace
//! eigensolver for large Hermitian pencils.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use nalgebra::DMatrix;
use num_traits::{Float, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::{hermitian_pencil_solve, HermitianEigen, PencilProblem};
use super::CMat;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl CsrMatrix {
    /// Builds an `n × n` matrix from triplets. Duplicates are summed in the
    /// order they were supplied, so the result does not depend on how the
    /// caller's rows interleave.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            assert!(i < n && j < n, "triplet index out of range");
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(j);
                vals.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => C64::zero(),
        }
    }

    pub fn pattern(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.cols[self.row_ptr[i]..self.row_ptr[i + 1]].iter().map(move |&j| (i, j)))
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    pub fn to_dense(&self) -> CMat {
        let mut d = CMat::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                d[(i, j)] = v;
            }
        }
        d
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.vals.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_real(&self) -> bool {
        self.vals.iter().all(|v| v.im == 0.0)
    }

    /// `max |A_ij - conj(A_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `a·self + b·other`, pattern union.
    pub fn combine(&self, a: C64, other: &CsrMatrix, b: C64) -> CsrMatrix {
        assert_eq!(self.n, other.n);
        let mut t = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.n {
            t.extend(self.row(i).map(|(j, v)| (i, j, a * v)));
        }
        for i in 0..other.n {
            t.extend(other.row(i).map(|(j, v)| (i, j, b * v)));
        }
        CsrMatrix::from_triplets(self.n, t)
    }

    pub fn scaled(&self, c: C64) -> CsrMatrix {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// Restriction to the rows/columns listed in `keep` (in that order).
    pub fn submatrix(&self, keep: &[usize]) -> CsrMatrix {
        let mut map = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut t = Vec::new();
        for (new_i, &old_i) in keep.iter().enumerate() {
            for (j, v) in self.row(old_i) {
                if map[j] != usize::MAX {
                    t.push((new_i, map[j], v));
                }
            }
        }
        CsrMatrix::from_triplets(keep.len(), t)
    }
}

/// Reverse Cuthill–McKee ordering; `perm[new] = old`.
pub fn rcm_ordering(a: &CsrMatrix) -> Vec<usize> {
    let n = a.dim();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).filter(|&(j, _)| j != i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let start = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| degree[i])
            .unwrap();
        // one sweep toward a pseudo-peripheral node
        let far = bfs_last(a, start, &visited, &degree);
        let begin = order.len();
        let mut queue = VecDeque::new();
        visited[far] = true;
        queue.push_back(far);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nb: Vec<usize> = a.row(v).map(|(j, _)| j).filter(|&j| !visited[j]).collect();
            nb.sort_by_key(|&j| (degree[j], j));
            for j in nb {
                visited[j] = true;
                queue.push_back(j);
            }
        }
        order[begin..].reverse();
    }
    order
}

fn bfs_last(a: &CsrMatrix, start: usize, blocked: &[bool], degree: &[usize]) -> usize {
    let mut seen = blocked.to_vec();
    let mut queue = VecDeque::new();
    seen[start] = true;
    queue.push_back(start);
    let mut last = start;
    while let Some(v) = queue.pop_front() {
        last = v;
        let mut nb: Vec<usize> = a.row(v).map(|(j, _)| j).filter(|&j| !seen[j]).collect();
        nb.sort_by_key(|&j| (degree[j], j));
        for j in nb {
            seen[j] = true;
            queue.push_back(j);
        }
    }
    last
}

/// Envelope (variable-band) Cholesky factor `P A Pᵀ = L L*` of a Hermitian
/// positive definite matrix.
#[derive(Debug, Clone)]
pub struct SkylineCholesky {
    perm: Vec<usize>,
    first: Vec<usize>,
    offset: Vec<usize>,
    data: Vec<C64>,
}

impl SkylineCholesky {
    /// Factors `a` after reverse Cuthill–McKee reordering.
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let perm = rcm_ordering(a);
        Self::factor_with(a, perm)
    }

    pub fn factor_with(a: &CsrMatrix, perm: Vec<usize>) -> Result<Self> {
        let n = a.dim();
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first = vec![0usize; n];
        for i in 0..n {
            first[i] = a
                .row(perm[i])
                .map(|(j, _)| inv[j])
                .filter(|&j| j <= i)
                .min()
                .unwrap_or(i);
        }
        let mut offset = vec![0usize; n + 1];
        for i in 0..n {
            offset[i + 1] = offset[i] + (i - first[i] + 1);
        }
        let mut data = vec![C64::zero(); offset[n]];
        for i in 0..n {
            for (j, v) in a.row(perm[i]) {
                let jj = inv[j];
                if jj <= i {
                    data[offset[i] + jj - first[i]] = v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let mut s = data[offset[i] + j - fi];
                for k in lo..j {
                    s -= data[offset[i] + k - fi] * data[offset[j] + k - fj].conj();
                }
                let djj = data[offset[j] + j - fj];
                data[offset[i] + j - fi] = s / djj;
            }
            let mut d = data[offset[i] + i - fi].re;
            for k in fi..i {
                d -= data[offset[i] + k - fi].norm_sqr();
            }
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite);
            }
            data[offset[i] + i - fi] = C64::new(d.sqrt(), 0.0);
        }
        Ok(Self { perm, first, offset, data })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Stored entries of the factor.
    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.dim();
        let mut y: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let mut s = y[i];
            for k in fi..i {
                s -= self.data[self.offset[i] + k - fi] * y[k];
            }
            y[i] = s / self.data[self.offset[i] + i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let xi = y[i] / self.data[self.offset[i] + i - fi];
            y[i] = xi;
            for k in fi..i {
                y[k] -= self.data[self.offset[i] + k - fi].conj() * xi;
            }
        }
        let mut x = vec![C64::zero(); n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `k` smallest eigenpairs of a large Hermitian pencil by shift-invert
/// subspace iteration with Rayleigh–Ritz projection.
///
/// The shift starts at `-1` and moves down until `K - σM` factors, which
/// certifies `σ` below the spectrum. A block of `2k + 8` vectors handles
/// multiple eigenvalues. Residuals are relative to `‖K‖_F`.
pub fn shift_invert_hermitian(
    stiffness: &CsrMatrix,
    mass: &CsrMatrix,
    count: usize,
    tol: f64,
) -> Result<HermitianEigen> {
    let n = stiffness.dim();
    if count > n {
        return Err(Error::TooManyEigenpairs { k: count, n });
    }
    if stiffness.hermitian_defect() > 1e-12 * stiffness.frobenius_norm().max(1.0) {
        return Err(Error::Numerics("stiffness matrix is not Hermitian".into()));
    }
    let block = (2 * count + 8).min(n);
    if 2 * block >= n {
        let p = PencilProblem::new(stiffness.to_dense(), mass.to_dense(), count).with_tol(tol);
        return hermitian_pencil_solve(&p);
    }
    let mut sigma = -1.0;
    let factor = loop {
        let shifted = stiffness.combine(C64::new(1.0, 0.0), mass, C64::new(-sigma, 0.0));
        match SkylineCholesky::factor(&shifted) {
            Ok(f) => break f,
            Err(_) if sigma > -1e12 => sigma = 4.0 * sigma - 1.0,
            Err(e) => return Err(e),
        }
    };
    let knorm = stiffness.frobenius_norm().max(f64::MIN_POSITIVE);

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_5eed);
    let mut x: Vec<Vec<C64>> = (0..block)
        .map(|_| (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), 0.0)).collect())
        .collect();

    for _iter in 0..2000 {
        // Y = (K - σM)⁻¹ M X, then M-orthonormalize
        let mut y: Vec<Vec<C64>> = x.iter().map(|col| factor.solve(&mass.mul_vec(col))).collect();
        let mut my: Vec<Vec<C64>> = Vec::with_capacity(block);
        let mut kept: Vec<Vec<C64>> = Vec::with_capacity(block);
        for col in y.iter_mut() {
            for _ in 0..2 {
                for (q, mq) in kept.iter().zip(&my) {
                    let c = dot(mq, col);
                    col.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
                }
            }
            let mcol = mass.mul_vec(col);
            let nrm = dot(col, &mcol).re.sqrt();
            if nrm > 1e-300 {
                let inv = 1.0 / nrm;
                kept.push(col.iter().map(|v| v * inv).collect());
                my.push(mcol.iter().map(|v| v * inv).collect());
            }
        }
        let b = kept.len();
        let ky: Vec<Vec<C64>> = kept.iter().map(|q| stiffness.mul_vec(q)).collect();
        let h = DMatrix::from_fn(b, b, |i, j| dot(&kept[i], &ky[j]));
        let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
        let eig = nalgebra::SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..b).collect();
        order.sort_by(|&i, &j| {
            eig.eigenvalues[i]
                .partial_cmp(&eig.eigenvalues[j])
                .unwrap_or(Ordering::Equal)
        });
        let ritz: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        x = order
            .iter()
            .map(|&c| {
                let mut v = vec![C64::zero(); n];
                for (r, q) in kept.iter().enumerate() {
                    let s = eig.eigenvectors[(r, c)];
                    v.iter_mut().zip(q).for_each(|(a, b)| *a += s * b);
                }
                v
            })
            .collect();
        if b < count {
            return Err(Error::NoConvergence);
        }
        let residuals: Vec<f64> = (0..count)
            .map(|j| {
                let kx = stiffness.mul_vec(&x[j]);
                let mx = mass.mul_vec(&x[j]);
                kx.iter()
                    .zip(&mx)
                    .map(|(a, b)| (a - b * ritz[j]).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
                    / knorm
            })
            .collect();
        if residuals.iter().all(|&r| r <= tol) {
            let vectors = CMat::from_fn(n, count, |r, c| x[c][r]);
            return Ok(HermitianEigen { values: ritz[..count].to_vec(), vectors, residuals });
        }
        while x.len() < block {
            x.push((0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), 0.0)).collect());
        }
    }
    Err(Error::NoConvergence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn lap1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, C64::new(2.0, 0.0)));
            if i + 1 < n {
                t.push((i, i + 1, C64::new(-1.0, 0.0)));
                t.push((i + 1, i, C64::new(-1.0, 0.0)));
            }
        }
        CsrMatrix::from_triplets(n, t)
    }

    fn identity(n: usize) -> CsrMatrix {
        CsrMatrix::from_triplets(n, (0..n).map(|i| (i, i, C64::new(1.0, 0.0))).collect())
    }

    #[test]
    fn triplets_sum_duplicates() {
        let a = CsrMatrix::from_triplets(
            2,
            vec![(1, 0, C64::new(1.0, 0.0)), (0, 0, C64::new(2.0, 0.0)), (1, 0, C64::new(3.0, 0.0))],
        );
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.get(1, 0), C64::new(4.0, 0.0));
        assert_eq!(a.get(0, 1), C64::zero());
    }

    #[test]
    fn skyline_solve_matches_dense() {
        let n = 30;
        let a = lap1d(n).combine(C64::new(1.0, 0.0), &identity(n), C64::new(0.5, 0.0));
        let f = SkylineCholesky::factor(&a).unwrap();
        let b: Vec<C64> = (0..n).map(|i| C64::new(i as f64, -(i as f64) * 0.5)).collect();
        let x = f.solve(&b);
        let r = a.mul_vec(&x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).norm() < 1e-12);
        }
    }

    #[test]
    fn indefinite_matrix_fails_to_factor() {
        let a = lap1d(5).combine(C64::new(1.0, 0.0), &identity(5), C64::new(-10.0, 0.0));
        assert!(SkylineCholesky::factor(&a).is_err());
    }

    #[test]
    fn shift_invert_finds_lowest_laplacian_modes() {
        let n = 400;
        let e = shift_invert_hermitian(&lap1d(n), &identity(n), 4, 1e-10).unwrap();
        for (j, v) in e.values.iter().enumerate() {
            let want = 2.0 - 2.0 * ((j + 1) as f64 * PI / (n as f64 + 1.0)).cos();
            assert!((v - want).abs() < 1e-12, "{v} vs {want}");
        }
    }

    #[test]
    fn rcm_is_a_permutation() {
        let p = rcm_ordering(&lap1d(17));
        let mut s = p.clone();
        s.sort();
        assert_eq!(s, (0..17).collect::<Vec<_>>());
    }
}
