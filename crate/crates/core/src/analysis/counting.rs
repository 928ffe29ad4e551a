use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::{Error, Result};

/// Radii are trusted up to this fraction of the largest computed eigenvalue.
pub const RESOLVED_FRACTION: f64 = 0.5;

/// `N(r) = #{λ_s ≤ r}` over a finite real spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingFunction {
    values: Vec<f64>,
}

impl CountingFunction {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Analysis("counting function needs a nonempty finite spectrum".into()));
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest eigenvalue; `N` is exact up to here.
    pub fn top(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn count(&self, r: f64) -> usize {
        self.values.partition_point(|&v| v <= r)
    }

    /// `#{λ_s < r}`.
    pub fn count_below(&self, r: f64) -> usize {
        self.values.partition_point(|&v| v < r)
    }

    /// `N(λ + 0) - N(λ - 0)`.
    pub fn jump(&self, lambda: f64) -> usize {
        self.count(lambda) - self.count_below(lambda)
    }

    /// Distance from `r` to the nearest eigenvalue.
    pub fn distance(&self, r: f64) -> f64 {
        let i = self.count_below(r);
        let mut d = f64::INFINITY;
        if i < self.values.len() {
            d = d.min(self.values[i] - r);
        }
        if i > 0 {
            d = d.min(r - self.values[i - 1]);
        }
        d
    }
}

/// `(kπ/L)²` for `k = 1..=count`.
pub fn free_dirichlet_interval(len: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|k| (k as f64 * PI / len).powi(2)).collect()
}

/// All `(mπ/lx)² + (kπ/ly)² ≤ limit`, `m, k ≥ 1`, ascending.
pub fn free_dirichlet_box(lx: f64, ly: f64, limit: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut m = 1;
    loop {
        let a = (m as f64 * PI / lx).powi(2);
        if a + (PI / ly).powi(2) > limit {
            break;
        }
        let mut k = 1;
        loop {
            let v = a + (k as f64 * PI / ly).powi(2);
            if v > limit {
                break;
            }
            out.push(v);
            k += 1;
        }
        m += 1;
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => {
            // v_n = 2π/n · v_{n-2}
            2.0 * PI / n as f64 * unit_ball_volume(n - 2)
        }
    }
}

/// Leading Weyl term `(2π)^{-n} v_n |Ω| r^{n/2}`.
pub fn weyl_leading(n: usize, volume: f64, r: f64) -> f64 {
    (2.0 * PI).powi(-(n as i32)) * unit_ball_volume(n) * volume * r.powf(n as f64 / 2.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeylProfile {
    pub dim: usize,
    pub volume: f64,
    pub radii: Vec<f64>,
    pub counts: Vec<usize>,
    pub leading: Vec<f64>,
    /// `(N(r) - leading(r)) / r^{(n-1)/2}`.
    pub remainders: Vec<f64>,
}

impl WeylProfile {
    pub fn max_abs_remainder(&self) -> f64 {
        self.remainders.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

fn check_resolved(n: &CountingFunction, r: f64) -> Result<()> {
    let limit = RESOLVED_FRACTION * n.top();
    if r > limit {
        return Err(Error::UnresolvedRange { r, limit });
    }
    Ok(())
}

pub fn weyl_profile(spectrum: &CountingFunction, dim: usize, volume: f64, radii: &[f64]) -> Result<WeylProfile> {
    if dim == 0 || !(volume > 0.0) {
        return Err(Error::Analysis("Weyl profile needs dim >= 1 and positive volume".into()));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) || radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::Analysis("radii must be positive and increasing".into()));
    }
    if let Some(&r) = radii.last() {
        check_resolved(spectrum, r)?;
    }
    let counts: Vec<usize> = radii.iter().map(|&r| spectrum.count(r)).collect();
    let leading: Vec<f64> = radii.iter().map(|&r| weyl_leading(dim, volume, r)).collect();
    let remainders = radii
        .iter()
        .zip(&counts)
        .zip(&leading)
        .map(|((&r, &c), &l)| (c as f64 - l) / r.powf((dim as f64 - 1.0) / 2.0))
        .collect();
    Ok(WeylProfile { dim, volume, radii: radii.to_vec(), counts, leading, remainders })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichRow {
    pub r: f64,
    /// `|N(r, T0) - N(r, L)|`.
    pub lhs: usize,
    /// `N(r + c r^θ, T0) - N(r - c r^θ, T0)`.
    pub bracket: usize,
}

/// Outcome of `|N(r,T0) - N(r,L)| ≤ C (N(r + c r^θ, T0) - N(r - c r^θ, T0))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    pub theta: f64,
    /// Window constant `c`.
    pub width: f64,
    /// Multiplier `C`.
    pub multiplier: f64,
    pub rows: Vec<SandwichRow>,
    pub verdict: bool,
}

/// The inequality at a given window constant `c`; `C` is the smallest
/// multiplier that works.
pub fn sandwich_with(
    perturbed: &CountingFunction,
    free: &CountingFunction,
    theta: f64,
    c: f64,
    radii: &[f64],
) -> Result<SandwichReport> {
    let rmax = radii.iter().fold(0.0f64, |m, &r| m.max(r));
    if rmax > perturbed.top() {
        return Err(Error::UnresolvedRange { r: rmax, limit: perturbed.top() });
    }
    let reach = rmax + c * rmax.powf(theta);
    if reach > free.top() {
        return Err(Error::UnresolvedRange { r: reach, limit: free.top() });
    }
    let mut verdict = true;
    let mut multiplier = 0.0f64;
    let rows = radii
        .iter()
        .map(|&r| {
            let w = c * r.powf(theta);
            let lhs = free.count(r).abs_diff(perturbed.count(r));
            let bracket = free.count(r + w) - free.count(r - w);
            if lhs > 0 {
                if bracket == 0 {
                    verdict = false;
                } else {
                    multiplier = multiplier.max(lhs as f64 / bracket as f64);
                }
            }
            SandwichRow { r, lhs, bracket }
        })
        .collect();
    Ok(SandwichReport { theta, width: c, multiplier, rows, verdict })
}

/// Fits the smallest window constant `c` for which some `C` works, then
/// the smallest such `C`.
///
/// A bracket is nonzero exactly when a free eigenvalue lies within
/// `c r^θ` of `r`, so the optimal `c` is the largest
/// `dist(r, σ(T0)) / r^θ` over radii where the counts differ.
pub fn sandwich_check(perturbed: &CountingFunction, free: &CountingFunction, theta: f64, radii: &[f64]) -> Result<SandwichReport> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::Analysis("θ must lie in [0, 1)".into()));
    }
    let mut c = 0.0f64;
    for &r in radii {
        if free.count(r) != perturbed.count(r) {
            c = c.max(free.distance(r) / r.powf(theta));
        }
    }
    // the window is half-open on the left
    c *= 1.0 + 1e-9;
    sandwich_with(perturbed, free, theta, c, radii)
}

/// `count` equally spaced radii in `[r0, r1]`.
pub fn linear_radii(r0: f64, r1: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => alloc::vec![r1],
        _ => (0..count).map(|i| r0 + (r1 - r0) * i as f64 / (count - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{primitive_from_deltas, Grid1D};
    use crate::quasi1d::{eigenvalues_selfadjoint, BoundaryCondition1D};
    use crate::C64;

    /// Independent lattice count `#{m, k ≥ 1 : m² + k² ≤ r}`.
    fn lattice(r: f64) -> usize {
        let mut n = 0;
        let mut m = 1usize;
        while (m * m) as f64 <= r {
            let rest = r - (m * m) as f64;
            n += (rest.sqrt().floor() as usize).max(0);
            m += 1;
        }
        n
    }

    #[test]
    fn counting_steps() {
        let n = CountingFunction::new(alloc::vec![5.0, 2.0, 5.0, 8.0]).unwrap();
        assert_eq!(n.count(1.9), 0);
        assert_eq!(n.count(2.0), 1);
        assert_eq!(n.count(5.0), 3);
        assert_eq!(n.jump(5.0), 2);
        assert_eq!(n.jump(4.0), 0);
        assert_eq!(n.distance(6.0), 1.0);
        assert!(CountingFunction::new(Vec::new()).is_err());
    }

    #[test]
    fn interval_weyl_is_floor_sqrt() {
        let n = CountingFunction::new(free_dirichlet_interval(PI, 60)).unwrap();
        let radii = linear_radii(0.5, 1700.0, 400);
        let p = weyl_profile(&n, 1, PI, &radii).unwrap();
        for (i, &r) in radii.iter().enumerate() {
            assert!((p.leading[i] - r.sqrt()).abs() < 1e-12 * r.sqrt());
            // floor with a guard against r landing on a perfect square
            let expect = (r.sqrt() * (1.0 + 1e-14)).floor() as usize;
            assert_eq!(p.counts[i], expect, "r = {r}");
        }
        assert!(p.max_abs_remainder() <= 1.0);
    }

    #[test]
    fn leading_term_homogeneous_in_volume() {
        assert!((weyl_leading(1, 4.0 * PI, 7.0) - 4.0 * weyl_leading(1, PI, 7.0)).abs() < 1e-12);
        assert!((weyl_leading(1, 3.0, 2.0) - 3.0 * 2f64.sqrt() / PI).abs() < 1e-15);
        assert!((weyl_leading(2, PI * PI, 10.0) - PI * 10.0 / 4.0).abs() < 1e-12);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn square_remainder_bounded() {
        let n = CountingFunction::new(free_dirichlet_box(PI, PI, 900.0)).unwrap();
        let radii = linear_radii(1.0, 400.0, 4000);
        let p = weyl_profile(&n, 2, PI * PI, &radii).unwrap();
        for (i, &r) in radii.iter().enumerate() {
            assert_eq!(p.counts[i], lattice(r));
        }
        assert!(p.max_abs_remainder() <= 1.5, "{}", p.max_abs_remainder());
    }

    #[test]
    fn unresolved_radius_is_refused() {
        let n = CountingFunction::new(free_dirichlet_interval(1.0, 10)).unwrap();
        let top = n.top();
        assert!(matches!(weyl_profile(&n, 1, 1.0, &[0.6 * top]), Err(Error::UnresolvedRange { .. })));
    }

    #[test]
    fn identical_spectra_need_no_window() {
        let n = CountingFunction::new(free_dirichlet_interval(1.0, 30)).unwrap();
        let s = sandwich_check(&n, &n, 0.5, &linear_radii(1.0, 2500.0, 500)).unwrap();
        assert!(s.verdict);
        assert_eq!(s.width, 0.0);
        assert!(s.rows.iter().all(|r| r.lhs == 0));
    }

    #[test]
    fn bounded_shift_fits_with_sup_norm_window() {
        // a constant potential q shifts every eigenvalue by q: θ = 0, c = q
        let q = 3.0;
        let free = free_dirichlet_box(PI, PI, 600.0);
        let shifted: Vec<f64> = free.iter().map(|v| v + q).collect();
        let (f, p) = (CountingFunction::new(free).unwrap(), CountingFunction::new(shifted).unwrap());
        let radii = linear_radii(1.0, 500.0, 2000);
        let s = sandwich_with(&p, &f, 0.0, q, &radii).unwrap();
        assert!(s.verdict && s.multiplier <= 1.0);
        let fit = sandwich_check(&p, &f, 0.0, &radii).unwrap();
        assert!(fit.verdict && fit.width <= q * (1.0 + 1e-8));
    }

    #[test]
    fn delta_sandwich_holds() {
        let g = Grid1D::uniform(0.0, 1.0, 2).unwrap();
        let u = primitive_from_deltas(|_| C64::new(0.0, 0.0), &[(0.5, C64::new(10.0, 0.0))], &g).unwrap();
        let s = eigenvalues_selfadjoint(&u, &BoundaryCondition1D::Dirichlet, 20).unwrap();
        let p = CountingFunction::new(s.real_values()).unwrap();
        let f = CountingFunction::new(free_dirichlet_interval(1.0, 20)).unwrap();
        let rep = sandwich_check(&p, &f, 0.5, &linear_radii(1.0, 2500.0, 5000)).unwrap();
        assert!(rep.verdict);
        assert!(rep.width > 0.0 && rep.width < 20.0, "{}", rep.width);
        assert!(rep.rows.iter().any(|r| r.lhs > 0));
    }
}
