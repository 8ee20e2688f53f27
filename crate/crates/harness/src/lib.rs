//! Experiment orchestration, result files and statistical comparison for
//! the `nsbidico` optimizer.
//!
//! An experiment runs every built-in problem it lists under one or more
//! configuration cells, 30 seeded runs each by default. Each run leaves a
//! TOML record; each (cell, problem) pair gets an aggregate with per-run
//! metric columns. Two cells can then be compared problem by problem with
//! the Wilcoxon rank-sum test.

pub mod compare;
pub mod config;
mod error;
pub mod experiment;
pub mod export;
pub mod record;

pub use compare::{compare_cells, ComparisonTable, Tally};
pub use config::{parse_config, parse_config_str, ExperimentConfig, Metric};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, run_experiment_with, ExperimentReport};
pub use export::export_front;
