//! Constrained multi-objective optimization by bidirectional differential
//! coevolution.
//!
//! A main population evolves under constraint-dominance selection while a
//! bounded archive of infeasible non-dominated solutions approaches the
//! constrained Pareto front from the infeasible side. Offspring come from
//! DE/current/1/bin followed by polynomial mutation.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, experiment
//! orchestration and the command line live in `nsbidico-harness`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod algorithm;
pub mod coevolution;
mod error;
mod math;
pub mod metrics;
pub mod model;
pub mod problems;
pub mod ranking;
pub mod variation;

pub use algorithm::{
    initialize, random_search, run, step, AlgorithmState, ArchiveSource, RunConfig, RunOutcome,
};
pub use coevolution::ArchiveNormalization;
pub use error::Error;
pub use model::{evaluate, Evaluation, Individual, Population, ProblemDefinition};

pub type Result<T, E = Error> = core::result::Result<T, E>;
