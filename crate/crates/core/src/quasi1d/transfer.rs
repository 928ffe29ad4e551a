//! Propagation of the quasi-derivative system
//!
//! ```text
//! y'     =  u y + y1
//! y1'    = -u y1 - (u² + λ) y
//! ```
//!
//! with `y1 = y' - u y`. The coefficient matrix is trace-free, so every
//! propagator has unit determinant.

use alloc::vec::Vec;

use num_complex::ComplexFloat;
use num_traits::{Float, One, Zero};

use crate::potentials::Primitive1D;
use crate::C64;

/// Maximum coefficient variation on one propagation panel.
pub const PANEL_VARIATION: f64 = 1e-3;

/// States are renormalized once their norm exceeds this.
pub const RESCALE_THRESHOLD: f64 = 1e100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiState {
    pub y: C64,
    /// Quasi-derivative `y' - u y`.
    pub y1: C64,
}

impl QuasiState {
    pub fn new(y: C64, y1: C64) -> Self {
        Self { y, y1 }
    }

    pub fn real(y: f64, y1: f64) -> Self {
        Self { y: C64::new(y, 0.0), y1: C64::new(y1, 0.0) }
    }

    pub fn norm(&self) -> f64 {
        (self.y.norm_sqr() + self.y1.norm_sqr()).sqrt()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { y: self.y * c, y1: self.y1 * c }
    }
}

/// 2×2 propagator from `(y, y1)` at one point to another.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m: [[C64; 2]; 2],
    pub lambda: C64,
    /// Signed width; negative for backward propagation.
    pub h: f64,
}

impl TransferMatrix {
    pub fn identity(lambda: C64) -> Self {
        let (o, z) = (C64::one(), C64::zero());
        Self { m: [[o, z], [z, o]], lambda, h: 0.0 }
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn apply(&self, s: QuasiState) -> QuasiState {
        QuasiState {
            y: self.m[0][0] * s.y + self.m[0][1] * s.y1,
            y1: self.m[1][0] * s.y + self.m[1][1] * s.y1,
        }
    }

    /// `self · first`: apply `first`, then `self`.
    pub fn after(&self, first: &TransferMatrix) -> TransferMatrix {
        let (a, b) = (&self.m, &first.m);
        let mut m = [[C64::zero(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        TransferMatrix { m, lambda: self.lambda, h: self.h + first.h }
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn scale(&mut self, c: f64) {
        self.m.iter_mut().flatten().for_each(|z| *z *= c);
    }
}

/// `sin(z)/z`, accurate near zero.
fn sinc(z: C64) -> C64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        C64::one() - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// `exp(Ω)` for a trace-free 2×2 `Ω`: with `Ω² = μ² I`,
/// `exp(Ω) = cosh μ I + (sinh μ / μ) Ω`.
fn expm_tracefree(o: [[C64; 2]; 2]) -> [[C64; 2]; 2] {
    // μ² = -det Ω; write μ = iw so that cosh μ = cos w, sinh μ/μ = sin w / w
    let w2 = o[0][0] * o[1][1] - o[0][1] * o[1][0];
    let w = w2.sqrt();
    let c = w.cos();
    let s = sinc(w);
    [[c + s * o[0][0], s * o[0][1]], [s * o[1][0], c + s * o[1][1]]]
}

fn system(u: C64, lambda: C64) -> [[C64; 2]; 2] {
    [[u, C64::one()], [-(u * u + lambda), -u]]
}

/// Exact propagator over width `h` for a constant coefficient `u`.
pub fn cell_transfer(u: C64, lambda: C64, h: f64) -> TransferMatrix {
    let a = system(u, lambda);
    let o = [[a[0][0] * h, a[0][1] * h], [a[1][0] * h, a[1][1] * h]];
    TransferMatrix { m: expm_tracefree(o), lambda, h }
}

/// Fourth-order Magnus propagator from coefficient values at the two Gauss
/// points of the panel; exact when they agree.
fn magnus_transfer(u1: C64, u2: C64, lambda: C64, h: f64) -> TransferMatrix {
    if u1 == u2 {
        return cell_transfer(u1, lambda, h);
    }
    let (a1, a2) = (system(u1, lambda), system(u2, lambda));
    let k = 3f64.sqrt() / 12.0 * h * h;
    let mut o = [[C64::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let c21 = a2[i][0] * a1[0][j] + a2[i][1] * a1[1][j];
            let c12 = a1[i][0] * a2[0][j] + a1[i][1] * a2[1][j];
            o[i][j] = (a1[i][j] + a2[i][j]) * (0.5 * h) + (c21 - c12) * k;
        }
    }
    TransferMatrix { m: expm_tracefree(o), lambda, h }
}

/// Propagation panel `[x0, x1]` inside grid cell `cell`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Panel {
    pub x0: f64,
    pub x1: f64,
    pub cell: usize,
}

/// Panels covering `[a, b]`: coefficient variation at most
/// [`PANEL_VARIATION`] and, when `max_width` is given, width at most that.
pub(crate) fn panels(u: &Primitive1D, max_width: Option<f64>) -> Vec<Panel> {
    let g = u.grid();
    let mut out = Vec::new();
    for i in 0..g.cells() {
        let (x0, x1) = g.cell(i);
        let mut n = (u.cell_variation(i) / PANEL_VARIATION).ceil().max(1.0) as usize;
        if let Some(w) = max_width {
            n = n.max(((x1 - x0) / w).ceil() as usize);
        }
        for k in 0..n {
            let a = x0 + (x1 - x0) * k as f64 / n as f64;
            let b = if k + 1 == n { x1 } else { x0 + (x1 - x0) * (k + 1) as f64 / n as f64 };
            out.push(Panel { x0: a, x1: b, cell: i });
        }
    }
    out
}

pub(crate) fn panel_transfer(u: &Primitive1D, p: &Panel, lambda: C64, forward: bool) -> TransferMatrix {
    let h = p.x1 - p.x0;
    let m = 0.5 * (p.x0 + p.x1);
    let d = h / (2.0 * 3f64.sqrt());
    let (u1, u2) = (u.eval_in_cell(p.cell, m - d), u.eval_in_cell(p.cell, m + d));
    if forward {
        magnus_transfer(u1, u2, lambda, h)
    } else {
        // reversed direction: Gauss points swap roles
        magnus_transfer(u2, u1, lambda, -h)
    }
}

/// Transfer matrix over `[a, b]` as `exp(log_scale) · m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledTransfer {
    pub matrix: TransferMatrix,
    pub log_scale: f64,
}

impl ScaledTransfer {
    /// `det` of the full (unscaled) matrix, which is 1 in exact arithmetic.
    pub fn det_log(&self) -> C64 {
        self.matrix.det() * (2.0 * self.log_scale).exp()
    }
}

/// Full transfer matrix over `[a, b]`.
pub fn total_transfer(u: &Primitive1D, lambda: C64) -> ScaledTransfer {
    let mut t = TransferMatrix::identity(lambda);
    let mut log_scale = 0.0;
    for p in panels(u, None) {
        t = panel_transfer(u, &p, lambda, true).after(&t);
        let n = t.max_abs();
        if n > RESCALE_THRESHOLD {
            t.scale(1.0 / n);
            log_scale += n.ln();
        }
    }
    ScaledTransfer { matrix: t, log_scale }
}

/// Sampled solution: states at increasing abscissae. The true state at
/// `x[i]` is `exp(log_scale[i]) · states[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub x: Vec<f64>,
    pub states: Vec<QuasiState>,
    pub log_scale: Vec<f64>,
}

impl Trajectory {
    /// Whether any renormalization happened.
    pub fn rescaled(&self) -> bool {
        self.log_scale.last().is_some_and(|&l| l != 0.0)
    }

    /// States brought to the common scale of the last sample (entries far
    /// below it underflow to zero).
    pub fn uniform_states(&self) -> Vec<QuasiState> {
        let top = self.log_scale.last().copied().unwrap_or(0.0);
        self.states
            .iter()
            .zip(&self.log_scale)
            .map(|(s, &l)| s.scaled((l - top).exp()))
            .collect()
    }
}

fn run(u: &Primitive1D, lambda: C64, init: QuasiState, max_width: Option<f64>, forward: bool) -> Trajectory {
    let mut ps = panels(u, max_width);
    if !forward {
        ps.reverse();
    }
    let start = if forward { u.a() } else { u.b() };
    let mut x = Vec::with_capacity(ps.len() + 1);
    let mut states = Vec::with_capacity(ps.len() + 1);
    let mut log_scale = Vec::with_capacity(ps.len() + 1);
    x.push(start);
    states.push(init);
    log_scale.push(0.0);
    let mut s = init;
    let mut l = 0.0;
    for p in &ps {
        s = panel_transfer(u, p, lambda, forward).apply(s);
        let n = s.norm();
        if n > RESCALE_THRESHOLD {
            s = s.scaled(1.0 / n);
            l += n.ln();
        }
        x.push(if forward { p.x1 } else { p.x0 });
        states.push(s);
        log_scale.push(l);
    }
    if !forward {
        x.reverse();
        states.reverse();
        log_scale.reverse();
    }
    Trajectory { x, states, log_scale }
}

/// Solution from `init` at `a`, sampled at panel ends (grid nodes included).
pub fn propagate(u: &Primitive1D, lambda: C64, init: QuasiState) -> Trajectory {
    run(u, lambda, init, None, true)
}

/// As [`propagate`] with panels no wider than `max_width`.
pub fn propagate_sampled(u: &Primitive1D, lambda: C64, init: QuasiState, max_width: f64) -> Trajectory {
    run(u, lambda, init, Some(max_width), true)
}

/// Solution from `init` at `b` integrated backward toward `a`.
pub fn propagate_backward(u: &Primitive1D, lambda: C64, init: QuasiState, max_width: Option<f64>) -> Trajectory {
    run(u, lambda, init, max_width, false)
}

/// Panel width keeping the local phase `|√λ| h` below one.
pub(crate) fn oscillation_width(u: &Primitive1D, lambda: C64) -> f64 {
    let w = (lambda.norm() + u.sup_norm().powi(2)).sqrt();
    let len = u.b() - u.a();
    if w > 0.0 {
        (1.0 / w).min(len / 16.0)
    } else {
        len / 16.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{primitive_from_deltas, Grid1D};
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    /// Classical RK4 on the first-order system: an independent oracle.
    fn rk4(u: impl Fn(f64) -> C64, lambda: C64, h: f64, steps: usize) -> [[C64; 2]; 2] {
        let f = |x: f64, s: [C64; 2]| {
            let uv = u(x);
            [uv * s[0] + s[1], -uv * s[1] - (uv * uv + lambda) * s[0]]
        };
        let mut out = [[C64::zero(); 2]; 2];
        for col in 0..2 {
            let mut s = [C64::zero(); 2];
            s[col] = C64::one();
            let dx = h / steps as f64;
            for k in 0..steps {
                let x = k as f64 * dx;
                let k1 = f(x, s);
                let k2 = f(x + dx / 2.0, [s[0] + k1[0] * (dx / 2.0), s[1] + k1[1] * (dx / 2.0)]);
                let k3 = f(x + dx / 2.0, [s[0] + k2[0] * (dx / 2.0), s[1] + k2[1] * (dx / 2.0)]);
                let k4 = f(x + dx, [s[0] + k3[0] * dx, s[1] + k3[1] * dx]);
                for c in 0..2 {
                    s[c] += (k1[c] + k2[c] * 2.0 + k3[c] * 2.0 + k4[c]) * (dx / 6.0);
                }
            }
            out[0][col] = s[0];
            out[1][col] = s[1];
        }
        out
    }

    #[test]
    fn free_zero_energy() {
        let t = cell_transfer(C64::zero(), C64::zero(), 0.7);
        assert_eq!(t.m[0][0], C64::one());
        assert!(close(t.m[0][1], C64::new(0.7, 0.0), 1e-15));
        assert_eq!(t.m[1][0], C64::zero());
    }

    #[test]
    fn half_turn() {
        let t = cell_transfer(C64::zero(), C64::one(), PI);
        assert!(close(t.m[0][0], -C64::one(), 1e-14));
        assert!(close(t.m[1][1], -C64::one(), 1e-14));
        assert!(t.m[0][1].norm() < 1e-14 && t.m[1][0].norm() < 1e-14);
    }

    #[test]
    fn constant_cell_matches_ode_oracle() {
        let t = cell_transfer(C64::new(3.0, 0.0), C64::new(2.0, 0.0), 0.1);
        let o = rk4(|_| C64::new(3.0, 0.0), C64::new(2.0, 0.0), 0.1, 2000);
        for i in 0..2 {
            for j in 0..2 {
                assert!(close(t.m[i][j], o[i][j], 1e-10));
            }
        }
    }

    #[test]
    fn magnus_matches_ode_oracle_on_quadratic_cell() {
        let g = Grid1D::uniform(0.0, 1.0, 2).unwrap();
        let f = |x: f64| C64::new(2.0 * x * x - x, 0.5 * x);
        let u = Primitive1D::interpolate(g, f).unwrap();
        let lambda = C64::new(5.0, -1.0);
        let t = total_transfer(&u, lambda).matrix;
        let o = rk4(f, lambda, 1.0, 20000);
        for i in 0..2 {
            for j in 0..2 {
                assert!(close(t.m[i][j], o[i][j], 1e-10), "{:?} vs {:?}", t.m[i][j], o[i][j]);
            }
        }
    }

    #[test]
    fn sine_solution() {
        let g = Grid1D::uniform(0.0, PI, 20).unwrap();
        let u = Primitive1D::zero(g);
        let tr = propagate(&u, C64::one(), QuasiState::real(0.0, 1.0));
        for (x, s) in tr.x.iter().zip(&tr.states) {
            assert!(close(s.y, C64::new(x.sin(), 0.0), 1e-10));
            assert!(close(s.y1, C64::new(x.cos(), 0.0), 1e-10));
        }
    }

    #[test]
    fn constant_solution_at_zero_energy() {
        let u = Primitive1D::zero(Grid1D::uniform(0.0, 1.0, 5).unwrap());
        let tr = propagate(&u, C64::zero(), QuasiState::real(1.0, 0.0));
        assert!(tr.states.iter().all(|s| s.y == C64::one() && s.y1 == C64::zero()));
    }

    #[test]
    fn derivative_jumps_at_delta_site() {
        let g = Grid1D::uniform(0.0, 1.0, 2).unwrap();
        let u = primitive_from_deltas(|_| C64::zero(), &[(0.5, C64::new(10.0, 0.0))], &g).unwrap();
        let lambda = C64::new(7.0, 0.0);
        let tr = propagate(&u, lambda, QuasiState::real(0.0, 1.0));
        let i = tr.x.iter().position(|&x| x == 0.5).unwrap();
        let s = tr.states[i];
        let (ul, ur) = u.one_sided(0.5);
        // y' = y1 + u y on each side; y1 is continuous by construction
        let jump = (s.y1 + ur * s.y) - (s.y1 + ul * s.y);
        assert!(close(jump, s.y * 10.0, 1e-12));
        // oracle: y = sin(kx)/k on the left, matching across the site
        let k = 7f64.sqrt();
        let c = 0.5;
        let (yc, dyc) = ((k * c).sin() / k, (k * c).cos());
        let dyr = dyc + 10.0 * yc;
        let right = |x: f64| yc * (k * (x - c)).cos() + dyr / k * (k * (x - c)).sin();
        let last = tr.states.last().unwrap();
        assert!((last.y.re - right(1.0)).abs() < 1e-10);
    }

    #[test]
    fn rescaling_keeps_direction() {
        let u = Primitive1D::zero(Grid1D::uniform(0.0, 1.0, 200).unwrap());
        let lambda = C64::new(-1e6, 0.0);
        let tr = propagate(&u, lambda, QuasiState::real(1.0, 0.0));
        assert!(tr.rescaled());
        // y1/y → -√|λ|·tanh... → √|λ| for the growing mode
        let s = tr.states.last().unwrap();
        assert!(((s.y1 / s.y).re - 1000.0).abs() < 1e-6);
        let t = total_transfer(&u, lambda);
        assert!(t.log_scale > 0.0);
        // log|T11| = ln cosh(1000)
        let l = t.log_scale + t.matrix.m[0][0].norm().ln();
        assert!((l - (1000.0 - 2f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn backward_inverts_forward() {
        let g = Grid1D::uniform(0.0, 1.0, 4).unwrap();
        let u = primitive_from_deltas(|x| C64::new(x.sin(), 0.0), &[(0.5, C64::new(3.0, 1.0))], &g).unwrap();
        let lambda = C64::new(4.0, 0.5);
        let fw = propagate(&u, lambda, QuasiState::real(0.3, 1.0));
        let end = *fw.states.last().unwrap();
        let bw = propagate_backward(&u, lambda, end, None);
        assert!(close(bw.states[0].y, C64::new(0.3, 0.0), 1e-11));
        assert!(close(bw.states[0].y1, C64::one(), 1e-11));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn unit_determinant(ur in -5.0f64..5.0, ui in -5.0f64..5.0, lr in -50.0f64..200.0, li in -20.0f64..20.0, h in 0.001f64..0.5) {
            let t = cell_transfer(C64::new(ur, ui), C64::new(lr, li), h);
            prop_assert!((t.det() - C64::one()).norm() < 1e-12 * t.max_abs().powi(2).max(1.0));
            let m = magnus_transfer(C64::new(ur, ui), C64::new(ui, ur), C64::new(lr, li), h);
            prop_assert!((m.det() - C64::one()).norm() < 1e-12 * m.max_abs().powi(2).max(1.0));
        }
    }
}
