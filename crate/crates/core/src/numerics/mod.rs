//! Numerical kernels shared by the 1D and 2D engines: generalized
//! eigensolvers, quadrature rules, sparse storage and root bracketing.

mod dense;
pub mod quadrature;
pub mod roots;
pub mod sparse;

pub use dense::{
    cluster_groups, general_pencil_solve, hermitian_pencil_solve, sort_key, Cluster, GeneralEigen,
    HermitianEigen, PencilProblem, CLUSTER_TOL,
};
pub use quadrature::{Element, QuadratureRule};
pub use roots::{bracketed_roots, roots_on_samples, Root, RootKind, RootList};
pub use sparse::{shift_invert_hermitian, CsrMatrix, SkylineCholesky};

use nalgebra::DMatrix;

use crate::C64;

/// Dense complex matrix.
pub type CMat = DMatrix<C64>;
