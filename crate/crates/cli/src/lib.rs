//! Seeded experiment harness around `stability_core`.
//!
//! Each pipeline (`dims`, `estimate`, `boost`, `adversary`, `oracle`) reads an
//! [`ExperimentConfig`], runs deterministically from its seed and renders a
//! version-stamped CSV table plus a JSON document.

pub mod error;
pub mod pipelines;
pub mod random;
pub mod report;
pub mod spec;

pub use error::{exit, CliError, CliResult};
pub use pipelines::{run_experiment, ExperimentConfig, Pipeline};
pub use random::random_realizable_distributions;
pub use report::Report;
