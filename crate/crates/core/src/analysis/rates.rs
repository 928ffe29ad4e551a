use alloc::vec::Vec;

use nalgebra::Cholesky;
use num_traits::Float;

use crate::femnd::AssembledForms;
use crate::numerics::CMat;
use crate::potentials::{FamilyMember, Grid1D, MollifiedFamily, Primitive1D, QuadratureSpec};
use crate::quasi1d::{eigenvalues_complex, eigenvalues_selfadjoint, galerkin_1d, BoundaryCondition1D, SEED_CELLS};
use crate::{Error, Result, C64};

/// Gaps at or below `GAP_FLOOR · max(1, |λ|)` are treated as solver noise.
pub const GAP_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub scale: f64,
    /// `‖u_k - u‖_{L2}` or `‖V_k - V‖_{L_p}`.
    pub norm: f64,
    /// `|λ_{s,k} - λ_s|` per tracked index.
    pub gaps: Vec<f64>,
    pub resolvent_gap: Option<f64>,
}

/// Per-scale results of a mollifier sweep.
#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    /// Tracked eigenvalue indices (0-based).
    pub indices: Vec<usize>,
    pub reference: Vec<C64>,
    pub rows: Vec<ConvergenceRow>,
    /// Set when a scale failed; `rows` holds the scales before it.
    pub failure: Option<Error>,
}

/// Result of solving one family member.
#[derive(Debug, Clone)]
pub struct ScaleSolution {
    /// Eigenvalues in sorted order, at least up to the largest tracked index.
    pub eigenvalues: Vec<C64>,
    pub resolvent_gap: Option<f64>,
}

/// Least-squares slope of `log y` against `log x` over positive pairs.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && a.is_finite() && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(sx, sy), (a, b)| (sx + a / n, sy + b / n));
    let sxx: f64 = pts.iter().map(|(a, _)| (a - mx) * (a - mx)).sum();
    let sxy: f64 = pts.iter().map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

impl ConvergenceTable {
    pub fn norms(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.norm).collect()
    }

    /// Gap column for the `i`-th tracked index.
    pub fn gaps(&self, i: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.gaps[i]).collect()
    }

    pub fn floor(&self, i: usize) -> f64 {
        GAP_FLOOR * self.reference[self.indices[i]].norm().max(1.0)
    }

    /// Log-log slope of gap against norm for the `i`-th tracked index,
    /// over rows above the solver floor. `None` when fewer than two rows
    /// carry signal: a constant family never reports a rate.
    pub fn slope(&self, i: usize) -> Option<f64> {
        let floor = self.floor(i);
        let (x, y): (Vec<f64>, Vec<f64>) =
            self.rows.iter().filter(|r| r.gaps[i] > floor).map(|r| (r.norm, r.gaps[i])).unzip();
        loglog_slope(&x, &y)
    }

    pub fn resolvent_gaps(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.resolvent_gap).collect()
    }

    pub fn resolvent_slope(&self) -> Option<f64> {
        let (x, y): (Vec<f64>, Vec<f64>) =
            self.rows.iter().filter_map(|r| r.resolvent_gap.map(|g| (r.norm, g))).unzip();
        loglog_slope(&x, &y)
    }

    /// Last resolvent gap over the first.
    pub fn resolvent_reduction(&self) -> Option<f64> {
        let g = self.resolvent_gaps();
        (g.len() >= 2 && g[0] > 0.0).then(|| g[g.len() - 1] / g[0])
    }
}

/// Runs `solve` on every member of `family` and tabulates eigenvalue gaps
/// against `reference`. `norms` holds one approximation norm per scale.
pub fn convergence_rates<F>(
    family: &MollifiedFamily,
    norms: &[f64],
    reference: &[C64],
    indices: &[usize],
    mut solve: F,
) -> Result<ConvergenceTable>
where
    F: FnMut(&FamilyMember) -> Result<ScaleSolution>,
{
    if norms.len() != family.members().len() {
        return Err(Error::Analysis("one norm per family member required".into()));
    }
    if indices.iter().any(|&i| i >= reference.len()) {
        return Err(Error::Analysis("tracked index beyond the reference spectrum".into()));
    }
    let mut table = ConvergenceTable { indices: indices.to_vec(), reference: reference.to_vec(), rows: Vec::new(), failure: None };
    for ((member, &scale), &norm) in family.members().iter().zip(family.scales()).zip(norms) {
        let sol = match solve(member) {
            Ok(s) if indices.iter().all(|&i| i < s.eigenvalues.len()) => s,
            Ok(_) => {
                table.failure = Some(Error::Analysis("solver returned too few eigenvalues".into()));
                break;
            }
            Err(e) => {
                table.failure = Some(e);
                break;
            }
        };
        let gaps = indices.iter().map(|&i| (sol.eigenvalues[i] - reference[i]).norm()).collect();
        table.rows.push(ConvergenceRow { scale, norm, gaps, resolvent_gap: sol.resolvent_gap });
    }
    Ok(table)
}

/// Largest singular value of `M^{1/2}[(K_k + ρM)^{-1} - (K + ρM)^{-1}]M^{1/2}`
/// with `K = A + B`, on the shared discrete space of both forms.
pub fn resolvent_gap(forms_k: &AssembledForms, forms: &AssembledForms, rho: f64) -> Result<f64> {
    let n = forms.dim();
    if forms_k.dim() != n {
        return Err(Error::Analysis("resolvent gap needs forms on the same space".into()));
    }
    let m = forms.mass.to_dense();
    let shift = C64::new(rho, 0.0);
    let k = forms.total().to_dense() + &m * shift;
    let kk = forms_k.total().to_dense() + &m * shift;
    let l = Cholesky::new(m).ok_or(Error::NotPositiveDefinite)?.unpack();
    let solve = |a: CMat| a.lu().solve(&l).ok_or(Error::SingularPencil);
    let diff = solve(kk)? - solve(k)?;
    let y = l.adjoint() * diff;
    Ok(y.singular_values().iter().fold(0.0f64, |s, &v| s.max(v)))
}

/// Eigenvalues of a 1D problem: the shooting engine when self-adjoint,
/// otherwise Newton-refined Galerkin seeds.
pub fn eigenvalues_1d(u: &Primitive1D, bc: &BoundaryCondition1D, count: usize) -> Result<Vec<C64>> {
    let s = if u.is_real() && bc.is_real() {
        eigenvalues_selfadjoint(u, bc, count)?
    } else {
        eigenvalues_complex(u, bc, count, SEED_CELLS)?
    };
    Ok(s.eigenvalues)
}

/// Sweep over mollified primitives of `base` at `scales`.
///
/// Eigenvalues come from [`eigenvalues_1d`]; with `resolvent = Some((mesh,
/// ρ))` every scale also reports [`resolvent_gap`] on P1 elements over
/// `mesh`.
pub fn mollifier_sweep_1d(
    base: &Primitive1D,
    bc: &BoundaryCondition1D,
    scales: &[f64],
    indices: &[usize],
    resolvent: Option<(&Grid1D, f64)>,
) -> Result<ConvergenceTable> {
    let family = MollifiedFamily::of_primitive(base, scales)?;
    let norms = family.approximation_norms(&QuadratureSpec::default())?;
    let count = indices.iter().max().map_or(1, |m| m + 1);
    let reference = eigenvalues_1d(base, bc, count)?;
    let limit_forms = match resolvent {
        Some((mesh, _)) => Some(galerkin_1d(base, bc, mesh)?),
        None => None,
    };
    convergence_rates(&family, &norms, &reference, indices, |member| {
        let FamilyMember::Primitive(mp) = member else {
            return Err(Error::Analysis("1D sweep needs a primitive family".into()));
        };
        let u = mp.to_primitive(&mp.default_grid()?)?;
        let eigenvalues = eigenvalues_1d(&u, bc, count)?;
        let resolvent_gap = match (resolvent, &limit_forms) {
            (Some((mesh, rho)), Some(lf)) => Some(resolvent_gap(&galerkin_1d(&u, bc, mesh)?, lf, rho)?),
            _ => None,
        };
        Ok(ScaleSolution { eigenvalues, resolvent_gap })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::primitive_from_deltas;

    fn delta(strength: f64) -> Primitive1D {
        let g = Grid1D::uniform(0.0, 1.0, 2).unwrap();
        primitive_from_deltas(|_| C64::new(0.0, 0.0), &[(0.5, C64::new(strength, 0.0))], &g).unwrap()
    }

    #[test]
    fn slope_of_power_law() {
        let x = [1.0, 0.5, 0.25, 0.125];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(1.7)).collect();
        assert!((loglog_slope(&x, &y).unwrap() - 1.7).abs() < 1e-12);
        assert_eq!(loglog_slope(&[1.0], &[1.0]), None);
    }

    #[test]
    fn identical_forms_have_zero_gap() {
        let mesh = Grid1D::uniform(0.0, 1.0, 40).unwrap();
        let f = galerkin_1d(&delta(10.0), &BoundaryCondition1D::Dirichlet, &mesh).unwrap();
        assert_eq!(resolvent_gap(&f, &f, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn resolvent_gap_of_a_constant_shift() {
        // q = c shifts the resolvent: ‖(T+c+ρ)^{-1} - (T+ρ)^{-1}‖ = c/((μ+c+ρ)(μ+ρ)) at the bottom μ
        let mesh = Grid1D::uniform(0.0, 1.0, 40).unwrap();
        let g = Grid1D::uniform(0.0, 1.0, 2).unwrap();
        let c = 2.0;
        let lin = Primitive1D::interpolate(g.clone(), |x| C64::new(c * x, 0.0)).unwrap();
        let bc = BoundaryCondition1D::Dirichlet;
        let f0 = galerkin_1d(&Primitive1D::zero(g), &bc, &mesh).unwrap();
        let f1 = galerkin_1d(&lin, &bc, &mesh).unwrap();
        let mu = crate::femnd::lowest_eigenpairs(&f0, 1).unwrap().eigenvalues[0].re;
        let rho = 1.0;
        let expect = c / ((mu + c + rho) * (mu + rho));
        let got = resolvent_gap(&f1, &f0, rho).unwrap();
        assert!((got - expect).abs() < 1e-10 * expect, "{got} {expect}");
    }

    #[test]
    fn constant_family_reports_no_rate() {
        let g = Grid1D::uniform(0.0, 1.0, 4).unwrap();
        let u = Primitive1D::interpolate(g, |_| C64::new(3.0, 0.0)).unwrap();
        let t = mollifier_sweep_1d(&u, &BoundaryCondition1D::Dirichlet, &[0.25, 0.125, 0.0625], &[0, 1], None).unwrap();
        assert!(t.failure.is_none());
        for i in 0..2 {
            assert!(t.gaps(i).iter().all(|&g| g <= t.floor(i)), "{:?}", t.gaps(i));
            assert_eq!(t.slope(i), None);
        }
    }

    #[test]
    fn delta_sweep_rates() {
        let mesh = Grid1D::uniform(0.0, 1.0, 200).unwrap();
        let scales = MollifiedFamily::dyadic_scales(2, 6);
        let t = mollifier_sweep_1d(&delta(10.0), &BoundaryCondition1D::Dirichlet, &scales, &[0], Some((&mesh, 1.0))).unwrap();
        assert!(t.failure.is_none());
        let slope = t.slope(0).unwrap();
        assert!(slope >= 0.9, "slope {slope} {:?}", t.rows);
        let g = t.resolvent_gaps();
        assert!(g.windows(2).all(|w| w[1] < w[0]), "{g:?}");
    }
}
