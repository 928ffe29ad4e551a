//! Distributional potentials through their structural representatives.
//!
//! A 1D potential `q` is carried by a primitive `u` with `q = u'` (jumps of
//! `u` are delta masses of `q`); an nD potential by a vector field `V` with
//! `q = div V`. Norms reported here are norms of the stored representative,
//! which bound the infimum-type `H⁻¹_p` norm from above.

mod admissibility;
mod field;
mod grid;
mod mollify;
mod norms;
mod primitive;

pub use admissibility::{admissibility_field, admissibility_primitive, AdmissibilityReport, Branch, TheoremTag};
pub use field::{Domain, FieldFn, VectorField};
pub use grid::Grid1D;
pub use mollify::{bump, mollify, mollify_field, FamilyMember, MollifiedFamily, MollifiedPrimitive, BUMP_MASS};
pub use norms::{lp_distance_field, lp_norm_field, lp_norm_primitive, QuadratureSpec, STRUCTURAL_LABEL};
pub use primitive::{primitive_from_deltas, Jump, Polynomial, Primitive1D};

/// Default exponent margin for the planar admissibility condition `L_{2+ε}`.
pub const DEFAULT_EPSILON: f64 = 0.5;
