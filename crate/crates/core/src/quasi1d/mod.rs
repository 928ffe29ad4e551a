//! One-dimensional problems `-y'' + u' y = λ y` through the
//! quasi-derivative `y1 = y' - u y`.
//!
//! Two independent engines are provided: transfer-matrix shooting on the
//! first-order system and a P1 Galerkin discretization of the form. They
//! serve as oracles for each other.

mod boundary;
mod galerkin;
mod nonselfadjoint;
mod shooting;
mod spectrum;
mod transfer;

pub use boundary::{characteristic, characteristic_real, root_residual, BoundaryCondition1D, Characteristic};
pub use galerkin::{galerkin_1d, galerkin_eigenvalues};
pub use nonselfadjoint::{eigenvalues_complex, newton_refine, SEED_CELLS};
pub use shooting::{eigenfunction, eigenvalues_selfadjoint, site_checks, spectral_lower_bound};
pub use spectrum::{Eigenfunction1D, Engine, SiteCheck, Spectrum1D};
pub use transfer::{
    cell_transfer, propagate, propagate_backward, propagate_sampled, total_transfer, QuasiState, ScaledTransfer,
    TransferMatrix, Trajectory, PANEL_VARIATION, RESCALE_THRESHOLD,
};
