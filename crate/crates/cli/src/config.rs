//! Experiment configuration.
//!
//! A config file is one JSON object. `kind` selects the experiment and the
//! remaining keys are that experiment's parameters; see
//! `schema/config.schema.json` for the full schema.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use singspec_core::femnd::Space;
use singspec_core::quasi1d::BoundaryCondition1D;
use singspec_core::C64;

use crate::error::{AppError, AppResult};
use crate::potential::PotentialSource;

// unknown keys are rejected by the experiment structs behind the flatten
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
    #[serde(flatten)]
    pub experiment: Experiment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Directory for result files, relative to the working directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    /// File stem; defaults to the config name, then the kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stem: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    Solve1d(Solve1d),
    GalerkinOrder(GalerkinOrder),
    Solve2d(Solve2d),
    Cauchy2d(Cauchy2d),
    Weyl(Weyl),
    Sandwich(Sandwich),
    Converge(Converge),
    Abel(Abel),
    Subord(Subord),
    Admissible(Admissible),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Solve1d(_) => "solve1d",
            Self::GalerkinOrder(_) => "galerkin-order",
            Self::Solve2d(_) => "solve2d",
            Self::Cauchy2d(_) => "cauchy2d",
            Self::Weyl(_) => "weyl",
            Self::Sandwich(_) => "sandwich",
            Self::Converge(_) => "converge",
            Self::Abel(_) => "abel",
            Self::Subord(_) => "subord",
            Self::Admissible(_) => "admissible",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineChoice {
    /// Shooting for self-adjoint problems, refined Galerkin otherwise.
    #[default]
    Auto,
    Shooting,
    Galerkin,
}

/// Expected eigenvalues (real parts) and a relative tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub expected: Vec<f64>,
    pub rel_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Solve1d {
    pub potential: PotentialSource,
    pub bc: String,
    #[serde(default)]
    pub engine: EngineChoice,
    pub count: usize,
    /// Galerkin mesh cells.
    #[serde(default = "default_cells")]
    pub cells: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalerkinOrder {
    pub potential: PotentialSource,
    pub bc: String,
    pub count: usize,
    /// Uniform mesh cell counts, coarse to fine.
    pub meshes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Solve2d {
    /// Field potential; the free operator when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialSource>,
    pub domain: String,
    pub bc: String,
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cauchy2d {
    pub potential: PotentialSource,
    pub radius: f64,
    /// Disk refinement levels, coarse to fine.
    pub levels: Vec<usize>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum Geometry {
    /// Free Dirichlet interval `(a, b)`; counts come from the shooting engine.
    Interval([f64; 2]),
    /// Free Dirichlet rectangle `(0, lx) × (0, ly)`; exact lattice counts.
    Rectangle([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weyl {
    pub geometry: Geometry,
    pub r_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sandwich {
    pub potential: PotentialSource,
    pub bc: String,
    pub theta: f64,
    pub r_max: f64,
    pub points: usize,
    /// Galerkin meshes; the free and perturbed spectra share each mesh.
    pub meshes: Vec<usize>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolventSpec {
    pub cells: usize,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Converge {
    pub potential: PotentialSource,
    pub bc: String,
    /// Scales `2^{-k}` for `k` in `[k0, k1]`.
    pub k0: u32,
    pub k1: u32,
    /// Zero-based eigenvalue indices to track.
    pub indices: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolvent: Option<ResolventSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Datum {
    /// The first right eigenvector.
    #[default]
    FirstMode,
    /// Nodal values of `x(1 - x)` rescaled to the interval.
    Bubble,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Abel {
    pub potential: PotentialSource,
    pub bc: String,
    pub alpha: f64,
    pub modes: usize,
    pub cells: usize,
    pub t_max: f64,
    pub t_min: f64,
    pub times: usize,
    #[serde(default)]
    pub datum: Datum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Subord {
    pub potential: PotentialSource,
    pub theta: f64,
    /// Sine modes per run; several values give a discretization study.
    pub modes: Vec<usize>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Admissible {
    pub potential: PotentialSource,
    /// Planar domain descriptor, required for field potentials.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// `dirichlet` or `neumann`.
    #[serde(default = "default_tag")]
    pub tag: String,
}

fn default_cells() -> usize {
    400
}

fn default_epsilon() -> f64 {
    singspec_core::potentials::DEFAULT_EPSILON
}

fn default_tag() -> String {
    "dirichlet".into()
}

/// Parses `dirichlet`, `gneumann`, `third:α,β` or `qper:θ`. Complex
/// coefficients are written `re+imi` or `re-imi`.
pub fn parse_bc1d(s: &str) -> AppResult<BoundaryCondition1D> {
    let bad = || AppError::config(format!("bc: expected dirichlet, gneumann, third:α,β or qper:θ, got `{s}`"));
    let s = s.trim();
    match s {
        "dirichlet" => return Ok(BoundaryCondition1D::Dirichlet),
        "gneumann" | "neumann" => return Ok(BoundaryCondition1D::GeneralizedNeumann),
        _ => {}
    }
    let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
    match kind {
        "third" => {
            let (a, b) = rest.split_once(',').ok_or_else(bad)?;
            let alpha = parse_complex(a).ok_or_else(bad)?;
            let beta = parse_complex(b).ok_or_else(bad)?;
            Ok(BoundaryCondition1D::ThirdKind { alpha, beta })
        }
        "qper" => Ok(BoundaryCondition1D::QuasiPeriodic { theta: rest.trim().parse().map_err(|_| bad())? }),
        _ => Err(bad()),
    }
}

fn parse_complex(s: &str) -> Option<C64> {
    let s = s.trim();
    if let Ok(x) = s.parse::<f64>() {
        return Some(C64::new(x, 0.0));
    }
    let body = s.strip_suffix('i')?;
    // split at the last sign that is not an exponent sign
    let bytes = body.as_bytes();
    let cut = (1..bytes.len()).rev().find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))?;
    let re = body[..cut].parse().ok()?;
    let im = match &body[cut..] {
        "+" => 1.0,
        "-" => -1.0,
        t => t.parse().ok()?,
    };
    Some(C64::new(re, im))
}

pub fn parse_space(s: &str) -> AppResult<Space> {
    match s.trim() {
        "dirichlet" => Ok(Space::Dirichlet),
        "neumann" => Ok(Space::Neumann),
        other => Err(AppError::config(format!("bc: planar problems take dirichlet or neumann, got `{other}`"))),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> AppResult<Self> {
        serde_json::from_str(text).map_err(|e| AppError::config(e.to_string()))
    }

    pub fn load(path: &Path) -> AppResult<(Self, String)> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::config(format!("config {}: {e}", path.display())))?;
        let cfg = Self::from_json(&text).map_err(|e| AppError::config(format!("{}: {e}", path.display())))?;
        Ok((cfg, text))
    }

    /// Canonical JSON used for the config hash.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn stem(&self) -> String {
        self.output
            .as_ref()
            .and_then(|o| o.stem.clone())
            .or_else(|| self.name.clone())
            .unwrap_or_else(|| self.experiment.kind().to_string())
    }

    pub fn out_dir(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(dir) = flag {
            return dir.to_path_buf();
        }
        match self.output.as_ref().and_then(|o| o.dir.as_deref()) {
            Some(d) => PathBuf::from(d),
            None => PathBuf::from("."),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_conditions() {
        assert_eq!(parse_bc1d("dirichlet").unwrap(), BoundaryCondition1D::Dirichlet);
        assert_eq!(parse_bc1d("gneumann").unwrap(), BoundaryCondition1D::GeneralizedNeumann);
        assert_eq!(
            parse_bc1d("third:1.5,-2+0.5i").unwrap(),
            BoundaryCondition1D::ThirdKind { alpha: C64::new(1.5, 0.0), beta: C64::new(-2.0, 0.5) }
        );
        assert_eq!(parse_bc1d("qper:0.25").unwrap(), BoundaryCondition1D::QuasiPeriodic { theta: 0.25 });
        assert!(parse_bc1d("robin").is_err());
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1e-3-2e+1i"), Some(C64::new(1e-3, -20.0)));
        assert_eq!(parse_complex("3+i"), Some(C64::new(3.0, 1.0)));
        assert_eq!(parse_complex("x"), None);
    }

    #[test]
    fn config_round_trip() {
        let text = r#"{
            "name": "demo", "kind": "solve1d", "bc": "dirichlet", "count": 3,
            "potential": {"type": "primitive-1d", "interval": [0, 1]}
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.experiment.kind(), "solve1d");
        assert_eq!(ExperimentConfig::from_json(&cfg.canonical()).unwrap(), cfg);
        assert_eq!(cfg.stem(), "demo");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{"kind": "weyl", "geometry": {"interval": [0, 1]}, "r_max": 10, "points": 5, "rmax": 3}"#;
        let err = ExperimentConfig::from_json(text).unwrap_err().to_string();
        assert!(err.contains("rmax"), "{err}");
    }
}
