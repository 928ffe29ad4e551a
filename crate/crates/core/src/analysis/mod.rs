//! Experiment drivers turning spectra into checkable verdicts.

mod abel;
mod counting;
mod rates;
mod subordination;

pub use counting::{
    free_dirichlet_box, free_dirichlet_interval, linear_radii, sandwich_check, sandwich_with, unit_ball_volume,
    weyl_leading, weyl_profile, CountingFunction, SandwichReport, SandwichRow, WeylProfile, RESOLVED_FRACTION,
};
pub use rates::{
    convergence_rates, eigenvalues_1d, loglog_slope, mollifier_sweep_1d, resolvent_gap, ConvergenceRow,
    ConvergenceTable, ScaleSolution, GAP_FLOOR,
};
pub use subordination::{subordination_estimate, SubordinationEstimate, SubordinationProblem, ASCENT_STEPS};
pub use abel::{
    abel_reconstruct, geometric_times, principal_power, AbelExperiment, Eigensystem, BIORTHOGONALITY_TOL,
};
