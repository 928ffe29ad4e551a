use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::f64::consts::PI;

use num_traits::{Float, Zero};

use super::{MollifiedPrimitive, Primitive1D};
use crate::{Error, Result, C64};

/// Pointwise evaluator of a vector field; unused components are zero.
pub type FieldFn = Arc<dyn Fn(&[f64]) -> [C64; 3] + Send + Sync>;

#[derive(Clone)]
pub(crate) enum Repr {
    Closure(FieldFn),
    /// `V = v(x_axis) e_axis` for a 1D profile `v`.
    Layered { profile: Primitive1D, axis: usize },
    MollifiedLayered { profile: MollifiedPrimitive, axis: usize },
}

/// Vector field `V` with `q = div V` on a domain in `R^n`, `n ∈ {1, 2, 3}`.
#[derive(Clone)]
pub struct VectorField {
    dim: usize,
    pub(crate) repr: Repr,
    singular_sites: Vec<[f64; 3]>,
    exponent: f64,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.repr {
            Repr::Closure(_) => "closure",
            Repr::Layered { .. } => "layered",
            Repr::MollifiedLayered { .. } => "mollified-layered",
        };
        f.debug_struct("VectorField")
            .field("dim", &self.dim)
            .field("kind", &kind)
            .field("singular_sites", &self.singular_sites)
            .field("exponent", &self.exponent)
            .finish()
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if (1..=3).contains(&dim) {
        Ok(())
    } else {
        Err(Error::Potential(alloc::format!("field dimension {dim} not in 1..=3")))
    }
}

impl VectorField {
    pub fn new(dim: usize, eval: FieldFn, singular_sites: Vec<[f64; 3]>, exponent: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(exponent > 1.0) {
            return Err(Error::Potential("declared exponent must exceed 1".into()));
        }
        Ok(Self { dim, repr: Repr::Closure(eval), singular_sites, exponent })
    }

    /// `V(x) = profile(x_axis)·e_axis`.
    pub fn layered(dim: usize, profile: Primitive1D, axis: usize, exponent: f64) -> Result<Self> {
        check_dim(dim)?;
        if axis >= dim {
            return Err(Error::Potential("layer axis out of range".into()));
        }
        Ok(Self { dim, repr: Repr::Layered { profile, axis }, singular_sites: Vec::new(), exponent })
    }

    pub(crate) fn from_repr(dim: usize, repr: Repr, singular_sites: Vec<[f64; 3]>, exponent: f64) -> Self {
        Self { dim, repr, singular_sites, exponent }
    }

    /// The zero field.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            repr: Repr::Closure(Arc::new(|_| [C64::zero(); 3])),
            singular_sites: Vec::new(),
            exponent: 2.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn singular_sites(&self) -> &[[f64; 3]] {
        &self.singular_sites
    }

    pub fn eval(&self, x: &[f64]) -> [C64; 3] {
        match &self.repr {
            Repr::Closure(f) => f(x),
            Repr::Layered { profile, axis } => {
                let mut v = [C64::zero(); 3];
                v[*axis] = profile.eval(x[*axis]);
                v
            }
            Repr::MollifiedLayered { profile, axis } => {
                let mut v = [C64::zero(); 3];
                v[*axis] = profile.eval(x[*axis]);
                v
            }
        }
    }

    pub fn scaled(&self, c: C64) -> Self {
        let repr = match &self.repr {
            Repr::Layered { profile, axis } => Repr::Layered { profile: profile.scaled(c), axis: *axis },
            _ => {
                let inner = self.clone();
                Repr::Closure(Arc::new(move |x| {
                    let v = inner.eval(x);
                    [v[0] * c, v[1] * c, v[2] * c]
                }))
            }
        };
        Self { repr, ..self.clone() }
    }

    /// `self + other`; singular sites are merged.
    pub fn sum(&self, other: &VectorField) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Potential("field dimensions differ".into()));
        }
        let (a, b) = (self.clone(), other.clone());
        let mut sites = self.singular_sites.clone();
        sites.extend(other.singular_sites.iter().copied());
        Ok(Self {
            dim: self.dim,
            repr: Repr::Closure(Arc::new(move |x| {
                let (u, v) = (a.eval(x), b.eval(x));
                [u[0] + v[0], u[1] + v[1], u[2] + v[2]]
            })),
            singular_sites: sites,
            exponent: self.exponent.min(other.exponent),
        })
    }
}

/// Bounded domain in `R^n` used for norm quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Interval { a: f64, b: f64 },
    Rectangle { lo: [f64; 2], hi: [f64; 2] },
    Disk { center: [f64; 2], radius: f64 },
    Cuboid { lo: [f64; 3], hi: [f64; 3] },
    Ball { center: [f64; 3], radius: f64 },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Rectangle { .. } | Domain::Disk { .. } => 2,
            Domain::Cuboid { .. } | Domain::Ball { .. } => 3,
        }
    }

    /// Lebesgue measure `|Ω|`.
    pub fn volume(&self) -> f64 {
        match *self {
            Domain::Interval { a, b } => b - a,
            Domain::Rectangle { lo, hi } => (hi[0] - lo[0]) * (hi[1] - lo[1]),
            Domain::Disk { radius, .. } => PI * radius * radius,
            Domain::Cuboid { lo, hi } => (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]),
            Domain::Ball { radius, .. } => 4.0 / 3.0 * PI * radius.powi(3),
        }
    }
}
