//! Dimension-dependent admissibility of a potential.
//!
//! `n = 1` needs the primitive in `L_2`, `n = 2` needs `V ∈ L_{2+ε}` for
//! some `ε > 0` (checked at a configured `ε`), `n ≥ 3` needs `V ∈ L_n`.

use alloc::format;
use alloc::string::String;

use super::{lp_norm_field, lp_norm_primitive, Domain, Primitive1D, QuadratureSpec, VectorField};
use crate::{Error, Result};

/// Which problem the condition is attached to. Both share exponents; the
/// Dirichlet statement is phrased for `q ∈ H⁻¹_p`, the Neumann one for
/// the representative `V ∈ L_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremTag {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Line,
    Plane,
    Space,
}

impl Branch {
    pub fn of_dim(n: usize) -> Self {
        match n {
            1 => Branch::Line,
            2 => Branch::Plane,
            _ => Branch::Space,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub dim: usize,
    pub branch: Branch,
    pub tag: TheoremTag,
    /// Exponent the branch requires.
    pub exponent: f64,
    /// `ε` used for the planar branch (zero otherwise).
    pub epsilon: f64,
    /// Representative norm; `None` when quadrature diverged.
    pub norm: Option<f64>,
    pub admissible: bool,
    /// Human-readable condition, e.g. `H^{-1}_{2+ε}` with `ε = 0.5`.
    pub condition: String,
}

fn condition(branch: Branch, tag: TheoremTag, p: f64, eps: f64) -> String {
    let sub = match branch {
        Branch::Line => String::from("2"),
        Branch::Plane => format!("2+ε (ε = {eps})"),
        Branch::Space => format!("{p}"),
    };
    match tag {
        TheoremTag::Dirichlet => format!("q ∈ H^{{-1}}_{{{sub}}}"),
        TheoremTag::Neumann => format!("V ∈ L_{{{sub}}}"),
    }
}

fn report(dim: usize, tag: TheoremTag, p: f64, eps: f64, norm: Result<f64>) -> Result<AdmissibilityReport> {
    let branch = Branch::of_dim(dim);
    let norm = match norm {
        Ok(v) if v.is_finite() => Some(v),
        Ok(_) | Err(Error::DivergedNorm { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(AdmissibilityReport {
        dim,
        branch,
        tag,
        exponent: p,
        epsilon: if branch == Branch::Plane { eps } else { 0.0 },
        admissible: norm.is_some(),
        norm,
        condition: condition(branch, tag, p, eps),
    })
}

/// One-dimensional check on a primitive.
pub fn admissibility_primitive(u: &Primitive1D, tag: TheoremTag, spec: &QuadratureSpec) -> Result<AdmissibilityReport> {
    report(1, tag, 2.0, 0.0, lp_norm_primitive(u, 2.0, spec))
}

/// Check of a vector field on `domain`; `epsilon` is used only for `n = 2`.
/// Only invalid input is an error: divergence yields a negative verdict.
pub fn admissibility_field(
    field: &VectorField,
    domain: &Domain,
    epsilon: f64,
    tag: TheoremTag,
    spec: &QuadratureSpec,
) -> Result<AdmissibilityReport> {
    let n = field.dim();
    if n != domain.dim() {
        return Err(Error::Potential("field and domain dimensions differ".into()));
    }
    let p = match n {
        1 => 2.0,
        2 => {
            if !(epsilon > 0.0) {
                return Err(Error::Potential("planar admissibility needs ε > 0".into()));
            }
            2.0 + epsilon
        }
        _ => n as f64,
    };
    report(n, tag, p, epsilon, lp_norm_field(field, domain, p, spec))
}
