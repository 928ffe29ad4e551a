//! Piecewise-linear Galerkin discretization of `-Δ + div V` on planar
//! domains, through the form `(∇f, ∇φ) - (V·∇f, φ) - (f V, ∇φ)`.

mod assemble;
mod forms;
mod mesh;
mod solve;

pub use assemble::{assemble_forms, attach_flux, boundary_flux, MAX_SINGULAR_LEVELS, SINGULAR_TOL};
pub use forms::{AssembledForms, Space};
pub use mesh::{mesh_disk, mesh_rectangle, Mesh2D, MeshDomain};
pub use solve::{is_hermitian, lowest_eigenpairs, nodal_values, SpectrumND, DENSE_CAP, EIGEN_TOL, HERMITIAN_DENSE_LIMIT};
