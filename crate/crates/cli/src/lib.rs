//! Experiment runner for `bergspec`: JSON configs in, CSV/JSON/SVG artifacts
//! and a manifest out.

pub mod acceptance;
pub mod config;
pub mod output;
pub mod plot;
pub mod runners;

pub use config::{Experiment, ExperimentConfig, SCHEMA};
pub use output::Manifest;
