//! Root bracketing for real scalar functions.

use alloc::vec::Vec;

use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    /// Sign change, refined by bisection.
    Simple,
    /// Touching zero without a sign change (even multiplicity).
    Tangency,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub kind: RootKind,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RootList {
    pub roots: Vec<Root>,
    /// Abscissa where scanning stopped because `max_count` was reached.
    pub continuation: Option<f64>,
}

/// Relative width at which bisection stops.
pub const BISECTION_RTOL: f64 = 1e-12;

/// Minimum of `|f|` relative to the neighbouring samples below which a
/// sign-preserving local minimum is reported as a tangency root.
pub const TANGENCY_TOL: f64 = 1e-9;

/// Roots of `f` on `[lo, hi]` scanned with `steps` equal steps.
pub fn bracketed_roots<F: FnMut(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    steps: usize,
    max_count: usize,
) -> RootList {
    let steps = steps.max(1);
    let samples: Vec<f64> = (0..=steps)
        .map(|i| lo + (hi - lo) * i as f64 / steps as f64)
        .collect();
    roots_on_samples(f, &samples, max_count)
}

/// Roots of `f` between consecutive entries of the increasing `samples`.
///
/// Sign changes are bisected to relative width [`BISECTION_RTOL`]. A local
/// minimum of `|f|` without a sign change is minimized by golden section;
/// if the minimum crosses zero both roots are bisected, and if it reaches
/// zero within [`TANGENCY_TOL`] it is reported as a [`RootKind::Tangency`].
pub fn roots_on_samples<F: FnMut(f64) -> f64>(
    f: F,
    samples: &[f64],
    max_count: usize,
) -> RootList {
    let mut out = scan(f, samples, max_count);
    out.roots
        .sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap_or(core::cmp::Ordering::Equal));
    out
}

fn scan<F: FnMut(f64) -> f64>(mut f: F, samples: &[f64], max_count: usize) -> RootList {
    let mut out = RootList::default();
    if samples.len() < 2 || max_count == 0 {
        return out;
    }
    let vals: Vec<f64> = samples.iter().map(|&x| f(x)).collect();
    let push = |out: &mut RootList, r: Root| -> bool {
        out.roots.push(r);
        out.roots.len() >= max_count
    };
    if vals[0] == 0.0 && push(&mut out, Root { x: samples[0], kind: RootKind::Simple }) {
        out.continuation = Some(samples[0]);
        return out;
    }
    for i in 1..samples.len() {
        let (x0, f0) = (samples[i - 1], vals[i - 1]);
        let (x1, f1) = (samples[i], vals[i]);
        // tangency / hidden pair around the previous sample
        if i >= 2 && f0 != 0.0 {
            let fm = vals[i - 2];
            if fm * f0 > 0.0 && f0 * f1 > 0.0 && f0.abs() <= fm.abs() && f0.abs() <= f1.abs() {
                let xm = samples[i - 2];
                let sgn = f0.signum();
                let (xmin, gmin) = golden_min(|x| sgn * f(x), xm, x1);
                if gmin < 0.0 {
                    let r1 = bisect(&mut f, xm, xmin, fm, sgn * gmin);
                    let r2 = bisect(&mut f, xmin, x1, sgn * gmin, f1);
                    if push(&mut out, Root { x: r1, kind: RootKind::Simple })
                        || push(&mut out, Root { x: r2, kind: RootKind::Simple })
                    {
                        out.continuation = Some(x1);
                        return out;
                    }
                } else if gmin <= TANGENCY_TOL * fm.abs().max(f1.abs()) {
                    if push(&mut out, Root { x: xmin, kind: RootKind::Tangency }) {
                        out.continuation = Some(x1);
                        return out;
                    }
                }
            }
        }
        if f1 == 0.0 {
            if push(&mut out, Root { x: x1, kind: RootKind::Simple }) {
                out.continuation = Some(x1);
                return out;
            }
            continue;
        }
        if f0 != 0.0 && f0 * f1 < 0.0 {
            let r = bisect(&mut f, x0, x1, f0, f1);
            if push(&mut out, Root { x: r, kind: RootKind::Simple }) {
                out.continuation = Some(x1);
                return out;
            }
        }
    }
    out
}

/// Bisection on a sign-changing bracket `[a, b]`.
pub fn bisect<F: FnMut(f64) -> f64>(f: &mut F, mut a: f64, mut b: f64, mut fa: f64, fb: f64) -> f64 {
    debug_assert!(fa * fb <= 0.0);
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b || (b - a) <= BISECTION_RTOL * a.abs().max(b.abs()) {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

fn golden_min<F: FnMut(f64) -> f64>(mut g: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    for _ in 0..120 {
        if gc.min(gd) < 0.0 {
            break;
        }
        if (b - a) <= 1e-15 * a.abs().max(b.abs()).max(1e-300) {
            break;
        }
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    if gc < gd {
        (c, gc)
    } else {
        (d, gd)
    }
}
