//! Result files: one record per run, one aggregate per (cell, problem), and
//! the reference-front cache.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const AGGREGATE_FILE: &str = "aggregate.toml";

/// Everything kept from a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRecord {
    pub problem: String,
    pub cell: String,
    pub config_digest: String,
    pub seed: u64,
    pub fe_used: u64,
    pub generations: u64,
    /// Number of objectives, so an empty front still has a shape.
    pub objectives: usize,
    pub igd: f64,
    /// Absent when the objective count has no exact hypervolume.
    pub hv: Option<f64>,
    pub feasible_ratio: f64,
    pub n_feasible: usize,
    pub n_nondominated: usize,
    pub wall_time_seconds: f64,
    /// Feasible non-dominated objective vectors of the final population.
    pub front: Vec<Vec<f64>>,
    /// Decision vectors of `front`, row for row.
    pub front_decisions: Vec<Vec<f64>>,
}

impl RunRecord {
    pub fn file_name(run_index: usize) -> String {
        format!("run_{run_index:03}.toml")
    }
}

/// Mean, sample standard deviation and median over the non-NaN values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub median: f64,
    pub nan_count: usize,
    /// Per-run values in run order, NaN included.
    pub values: Vec<f64>,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let clean: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
        let (mean, std, median) = if clean.is_empty() {
            (f64::NAN, f64::NAN, f64::NAN)
        } else {
            let n = clean.len() as f64;
            let mean = clean.iter().sum::<f64>() / n;
            let std = if clean.len() > 1 {
                (clean.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            let mut sorted = clean.clone();
            sorted.sort_by(f64::total_cmp);
            let mid = sorted.len() / 2;
            let median = if sorted.len() % 2 == 0 {
                (sorted[mid - 1] + sorted[mid]) / 2.0
            } else {
                sorted[mid]
            };
            (mean, std, median)
        };
        Summary {
            mean,
            std,
            median,
            nan_count: values.len() - clean.len(),
            values: values.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Failure {
    pub seed: u64,
    pub error: String,
}

/// Statistics of one (cell, problem) pair, written after all of its runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Aggregate {
    pub problem: String,
    pub cell: String,
    pub config_digest: String,
    pub runs_expected: usize,
    pub runs_completed: usize,
    pub complete: bool,
    /// Seeds of the completed runs, matching the order of every `values`.
    pub seeds: Vec<u64>,
    pub igd: Summary,
    pub hv: Option<Summary>,
    pub feasible_ratio: Summary,
    #[serde(default)]
    pub failures: Vec<Failure>,
}

impl Aggregate {
    /// `records` must already be in run order.
    pub fn from_records(
        problem: &str,
        cell: &str,
        config_digest: &str,
        runs_expected: usize,
        records: &[RunRecord],
        failures: Vec<Failure>,
    ) -> Aggregate {
        let column = |f: fn(&RunRecord) -> f64| records.iter().map(f).collect::<Vec<_>>();
        let hv = if records.iter().all(|r| r.hv.is_some()) && !records.is_empty() {
            Some(Summary::of(&column(|r| r.hv.unwrap_or(f64::NAN))))
        } else {
            None
        };
        Aggregate {
            problem: problem.into(),
            cell: cell.into(),
            config_digest: config_digest.into(),
            runs_expected,
            runs_completed: records.len(),
            complete: failures.is_empty() && records.len() == runs_expected,
            seeds: records.iter().map(|r| r.seed).collect(),
            igd: Summary::of(&column(|r| r.igd)),
            hv,
            feasible_ratio: Summary::of(&column(|r| r.feasible_ratio)),
            failures,
        }
    }
}

/// Writes through a temporary file in the same directory and renames it
/// into place, so readers only ever see complete files.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp"));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        HarnessError::io(path, e)
    })
}

pub fn write_toml<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = toml::to_string(value).map_err(|e| HarnessError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    write_atomic(path, text.as_bytes())
}

pub fn read_toml<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    toml::from_str(&text).map_err(|e| HarnessError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Where a cached reference front lives.
pub fn reference_cache_path(output_dir: &Path, problem: &str, count: usize) -> PathBuf {
    output_dir.join(".reference").join(format!("{problem}-{count}.txt"))
}

/// One vector per line, components separated by single spaces, 17
/// significant digits so values survive the round trip exactly.
pub fn format_points(points: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for p in points {
        let line: Vec<String> = p.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_points(path: &Path, text: &str) -> Result<Vec<Vec<f64>>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            line.split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>().map_err(|e| HarnessError::Format {
                        path: path.to_path_buf(),
                        message: format!("line {}: '{tok}': {e}", i + 1),
                    })
                })
                .collect()
        })
        .collect()
}

/// Loads the cached front or computes and caches it.
pub fn load_or_build_reference(
    output_dir: &Path,
    problem: &nsbidico::ProblemDefinition,
    count: usize,
) -> Result<Vec<Vec<f64>>> {
    let path = reference_cache_path(output_dir, problem.name(), count);
    if let Ok(text) = fs::read_to_string(&path) {
        let points = parse_points(&path, &text)?;
        if points.iter().all(|p| p.len() == problem.m()) && !points.is_empty() {
            return Ok(points);
        }
    }
    let points = nsbidico::problems::reference_front(problem, count)?;
    write_atomic(&path, format_points(&points).as_bytes())?;
    Ok(points)
}
