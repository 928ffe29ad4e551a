//! Named configs bundled into the binary. The JSON sources live in
//! `presets/` and double as examples of the config format.

use crate::config::ExperimentConfig;
use crate::error::{AppError, AppResult};

pub const PRESETS: &[(&str, &str)] = &[
    ("abel-idelta10", include_str!("../presets/abel-idelta10.json")),
    ("delta10-converge", include_str!("../presets/delta10-converge.json")),
    ("delta10-dirichlet", include_str!("../presets/delta10-dirichlet.json")),
    ("delta10-galerkin-order", include_str!("../presets/delta10-galerkin-order.json")),
    ("delta10-sandwich", include_str!("../presets/delta10-sandwich.json")),
    ("disk-dirichlet-2d", include_str!("../presets/disk-dirichlet-2d.json")),
    ("free-dirichlet-1d-k10", include_str!("../presets/free-dirichlet-1d-k10.json")),
    ("free-dirichlet-1d", include_str!("../presets/free-dirichlet-1d.json")),
    ("free-neumann-1d", include_str!("../presets/free-neumann-1d.json")),
    ("singular-disk-2d", include_str!("../presets/singular-disk-2d.json")),
    ("singular-disk-admissible", include_str!("../presets/singular-disk-admissible.json")),
    ("square-dirichlet-2d", include_str!("../presets/square-dirichlet-2d.json")),
    ("square-neumann-2d", include_str!("../presets/square-neumann-2d.json")),
    ("subord-delta10", include_str!("../presets/subord-delta10.json")),
    ("subord-unit", include_str!("../presets/subord-unit.json")),
    ("subord-zero", include_str!("../presets/subord-zero.json")),
    ("weyl-interval", include_str!("../presets/weyl-interval.json")),
    ("weyl-square", include_str!("../presets/weyl-square.json")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn preset(name: &str) -> AppResult<ExperimentConfig> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| AppError::config(format!("preset: unknown preset `{name}` (try `singspec presets`)")))?;
    ExperimentConfig::from_json(text)
}
