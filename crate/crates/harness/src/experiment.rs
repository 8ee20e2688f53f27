use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use nsbidico::metrics::{assess, final_front};
use nsbidico::{problems, ProblemDefinition};
use rayon::prelude::*;

use crate::compare::compare_cells;
use crate::config::{CellConfig, ExperimentConfig, RESOLVED_FILE};
use crate::error::{HarnessError, Result};
use crate::record::{
    load_or_build_reference, write_atomic, write_toml, Aggregate, Failure, RunRecord,
    AGGREGATE_FILE,
};

/// One run to execute.
#[derive(Debug, Clone)]
pub struct RunTask<'a> {
    pub cell: &'a CellConfig,
    pub problem: &'a ProblemDefinition,
    pub reference: &'a [Vec<f64>],
    pub config_digest: &'a str,
    pub run_index: usize,
    pub seed: u64,
}

#[derive(Debug)]
pub struct CellSummary {
    pub directory: PathBuf,
    pub aggregate: Aggregate,
}

#[derive(Debug)]
pub struct ExperimentReport {
    pub cells: Vec<CellSummary>,
    /// Comparison reports that were written.
    pub comparisons: Vec<PathBuf>,
}

impl ExperimentReport {
    pub fn failed_runs(&self) -> usize {
        self.cells.iter().map(|c| c.aggregate.failures.len()).sum()
    }
}

pub fn cell_directory(output_dir: &Path, cell: &str, problem: &str) -> PathBuf {
    output_dir.join(cell).join(problem)
}

/// Executes one run and measures it.
pub fn execute_run(config: &ExperimentConfig, task: &RunTask<'_>) -> Result<RunRecord> {
    let run_config = config.resolve(task.cell, task.problem.name(), task.seed)?;
    let start = Instant::now();
    let outcome = nsbidico::run(&run_config, task.problem)?;
    let assessment = assess(&outcome.population, task.reference)?;
    let wall_time_seconds = start.elapsed().as_secs_f64();
    let front = final_front(&outcome.population);
    Ok(RunRecord {
        problem: task.problem.name().into(),
        cell: task.cell.name.clone(),
        config_digest: task.config_digest.into(),
        seed: task.seed,
        fe_used: outcome.fe_used,
        generations: outcome.generations,
        objectives: task.problem.m(),
        igd: assessment.igd.value,
        hv: assessment.hv.map(|h| h.value),
        feasible_ratio: assessment.feasible_ratio,
        n_feasible: assessment.igd.n_feasible,
        n_nondominated: assessment.igd.n_nondominated,
        wall_time_seconds,
        front: front.iter().map(|i| i.objectives.clone()).collect(),
        front_decisions: front.iter().map(|i| i.x.clone()).collect(),
    })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment_with(config, execute_run)
}

/// [`run_experiment`] with a replaceable single-run function.
///
/// Every (cell, problem, run) executes as an independent task on a pool of
/// `config.workers` threads. A run that errors or panics is listed in its
/// aggregate and leaves the cell incomplete; the others still complete.
pub fn run_experiment_with<F>(config: &ExperimentConfig, runner: F) -> Result<ExperimentReport>
where
    F: Fn(&ExperimentConfig, &RunTask<'_>) -> Result<RunRecord> + Sync,
{
    let out = &config.output_dir;
    write_atomic(&out.join(RESOLVED_FILE), config.resolved_toml()?.as_bytes())?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| HarnessError::Usage(format!("cannot start {} workers: {e}", config.workers)))?;

    let definitions: Vec<ProblemDefinition> = config
        .problems
        .iter()
        .map(|p| problems::lookup(p))
        .collect::<std::result::Result<_, _>>()?;
    let references: Vec<Vec<Vec<f64>>> = pool.install(|| {
        definitions
            .par_iter()
            .map(|d| load_or_build_reference(out, d, config.reference_points))
            .collect::<Result<_>>()
    })?;
    let mut digests = Vec::new();
    for cell in &config.cells {
        for problem in &config.problems {
            digests.push(config.digest(cell, problem)?);
        }
    }

    let mut tasks = Vec::new();
    for (c, cell) in config.cells.iter().enumerate() {
        for (p, problem) in definitions.iter().enumerate() {
            for run_index in 0..config.runs {
                tasks.push(RunTask {
                    cell,
                    problem,
                    reference: &references[p],
                    config_digest: &digests[c * definitions.len() + p],
                    run_index,
                    seed: config.base_seed.wrapping_add(run_index as u64),
                });
            }
        }
    }

    let results: Vec<std::result::Result<RunRecord, String>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|task| {
                let record = match panic::catch_unwind(AssertUnwindSafe(|| runner(config, task))) {
                    Ok(outcome) => outcome.map_err(|e| e.to_string())?,
                    Err(payload) => return Err(panic_message(&*payload)),
                };
                let dir = cell_directory(out, &task.cell.name, task.problem.name());
                write_toml(&dir.join(RunRecord::file_name(task.run_index)), &record)
                    .map_err(|e| e.to_string())?;
                Ok(record)
            })
            .collect()
    });

    // Tasks were laid out cell-major, problem-minor, run order innermost.
    let mut cells = Vec::new();
    let mut chunks = tasks.chunks(config.runs).zip(results.chunks(config.runs));
    for cell in &config.cells {
        for problem in &config.problems {
            let (chunk_tasks, chunk_results) = chunks.next().expect("one chunk per cell and problem");
            let mut records = Vec::new();
            let mut failures = Vec::new();
            for (task, result) in chunk_tasks.iter().zip(chunk_results) {
                match result {
                    Ok(r) => records.push(r.clone()),
                    Err(error) => failures.push(Failure {
                        seed: task.seed,
                        error: error.clone(),
                    }),
                }
            }
            let aggregate = Aggregate::from_records(
                problem,
                &cell.name,
                chunk_tasks[0].config_digest,
                config.runs,
                &records,
                failures,
            );
            let directory = cell_directory(out, &cell.name, problem);
            write_toml(&directory.join(AGGREGATE_FILE), &aggregate)?;
            cells.push(CellSummary {
                directory,
                aggregate,
            });
        }
    }

    let mut comparisons = Vec::new();
    for spec in &config.comparisons {
        let table = compare_cells(&out.join(&spec.a), &out.join(&spec.b), spec.metric);
        // An incomplete side is already reported through the failed runs.
        if let Ok(table) = table {
            let path = out.join(format!("compare-{}-vs-{}-{}.txt", spec.a, spec.b, spec.metric.name()));
            write_atomic(&path, table.to_string().as_bytes())?;
            comparisons.push(path);
        }
    }

    Ok(ExperimentReport { cells, comparisons })
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    let text = payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into());
    format!("run panicked: {text}")
}
