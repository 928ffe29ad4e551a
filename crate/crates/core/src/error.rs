use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure signals raised by the numerical modules.
///
/// Each variant names the module that raised it so the CLI can surface
/// module-qualified messages.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("potentials: invalid grid: {0}")]
    InvalidGrid(String),
    #[error("potentials: delta site {site} outside the open interval ({a}, {b})")]
    SiteOutsideInterval { site: f64, a: f64, b: f64 },
    #[error("potentials: delta site {0} is not a grid node")]
    SiteNotOnGrid(f64),
    #[error("potentials: mollification scale {h} too large (limit {limit})")]
    ScaleTooLarge { h: f64, limit: f64 },
    #[error("potentials: L_p norm diverged (p = {p})")]
    DivergedNorm { p: f64 },
    #[error("potentials: {0}")]
    Potential(String),

    #[error("quasi1d: eigenvalue bracket search exhausted after {found} of {wanted} eigenvalues")]
    BracketExhausted { found: usize, wanted: usize },
    #[error("quasi1d: mesh does not contain jump site {0} as a node")]
    MeshMissingSite(f64),
    #[error("quasi1d: {0}")]
    Quasi(String),

    #[error("femnd: quadrature refinement exceeded near singular site")]
    RefinementExceeded,
    #[error("femnd: boundary flux requires the Neumann space")]
    WrongSpace,
    #[error("femnd: {0}")]
    Fem(String),

    #[error("numerics: mass matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("numerics: requested {k} eigenpairs of a dimension-{n} pencil")]
    TooManyEigenpairs { k: usize, n: usize },
    #[error("numerics: dimension {n} exceeds the dense cap {cap}")]
    DimensionCap { n: usize, cap: usize },
    #[error("numerics: eigensolver did not converge")]
    NoConvergence,
    #[error("numerics: shifted pencil is singular")]
    SingularPencil,
    #[error("numerics: {0}")]
    Numerics(String),

    #[error("analysis: radius {r} beyond resolved range {limit}")]
    UnresolvedRange { r: f64, limit: f64 },
    #[error("analysis: exponent Re(λ^α) is not eventually positive (index {index})")]
    BranchViolation { index: usize },
    #[error("analysis: {0}")]
    Analysis(String),
}
