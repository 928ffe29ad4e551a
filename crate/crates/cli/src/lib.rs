//! Configuration-driven runner for the singspec experiments.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod potential;
pub mod presets;
