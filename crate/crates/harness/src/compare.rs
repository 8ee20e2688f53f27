//! Side-by-side statistics of two cells with rank-sum verdicts.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use nsbidico::metrics::{wilcoxon_rank_sum, ComparisonVerdict, Orientation, Verdict};

use crate::config::Metric;
use crate::error::{HarnessError, Result};
use crate::record::{read_toml, Aggregate, Summary, AGGREGATE_FILE};

#[derive(Debug, Clone, PartialEq)]
pub enum RowOutcome {
    Compared {
        a: Summary,
        b: Summary,
        verdict: ComparisonVerdict,
    },
    /// The metric is missing on at least one side.
    Unavailable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub problem: String,
    pub outcome: RowOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub cell_a: PathBuf,
    pub cell_b: PathBuf,
    pub metric: Metric,
    pub rows: Vec<ComparisonRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tally {
    pub better: usize,
    pub worse: usize,
    pub equivalent: usize,
}

impl ComparisonTable {
    /// Counted from the rows, so it always agrees with them.
    pub fn tally(&self) -> Tally {
        let mut t = Tally::default();
        for row in &self.rows {
            if let RowOutcome::Compared { verdict, .. } = &row.outcome {
                match verdict.verdict {
                    Verdict::Better => t.better += 1,
                    Verdict::Worse => t.worse += 1,
                    Verdict::Equivalent => t.equivalent += 1,
                }
            }
        }
        t
    }
}

/// Table symbol: equivalence shows as `≈` as in published comparisons.
pub fn table_symbol(v: Verdict) -> &'static str {
    match v {
        Verdict::Equivalent => "≈",
        other => other.symbol(),
    }
}

fn orientation(metric: Metric) -> Orientation {
    match metric {
        Metric::Igd => Orientation::LowerIsBetter,
        Metric::Hv => Orientation::HigherIsBetter,
    }
}

fn mean_std(s: &Summary) -> String {
    format!("{:.4e} ({:.2e})", s.mean, s.std)
}

impl fmt::Display for ComparisonTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "metric: {}", self.metric.name())?;
        writeln!(f, "a: {}", self.cell_a.display())?;
        writeln!(f, "b: {}", self.cell_b.display())?;
        let width = self.rows.iter().map(|r| r.problem.len()).max().unwrap_or(0).max(7);
        writeln!(f, "{:<width$}  {:<24}  {:<24}", "problem", "a", "b")?;
        for row in &self.rows {
            match &row.outcome {
                RowOutcome::Compared { a, b, verdict } => writeln!(
                    f,
                    "{:<width$}  {:<24}  {:<24}  {}",
                    row.problem,
                    mean_std(a),
                    mean_std(b),
                    table_symbol(verdict.verdict)
                )?,
                RowOutcome::Unavailable => {
                    writeln!(f, "{:<width$}  unavailable", row.problem)?
                }
            }
        }
        let t = self.tally();
        writeln!(f, "+/−/≈ : {}/{}/{}", t.better, t.worse, t.equivalent)
    }
}

fn problem_dirs(cell: &Path) -> Result<Vec<String>> {
    let entries = fs::read_dir(cell).map_err(|e| HarnessError::io(cell, e))?;
    let mut names = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| HarnessError::io(cell, e))?;
        if entry.path().join(AGGREGATE_FILE).is_file() {
            names.push(entry.file_name().to_string_lossy().into_owned());
        }
    }
    names.sort();
    Ok(names)
}

fn load_complete(path: &Path) -> Result<Aggregate> {
    let agg: Aggregate = read_toml(path)?;
    if !agg.complete {
        return Err(HarnessError::IncompleteCell {
            path: path.to_path_buf(),
            completed: agg.runs_completed,
            expected: agg.runs_expected,
        });
    }
    Ok(agg)
}

/// Compares every problem present in both cell directories. `+` means
/// cell `a` is significantly better than `b`.
///
/// Fails with [`HarnessError::IncompleteCell`] when either side of a shared
/// problem has failed runs.
pub fn compare_cells(cell_a: &Path, cell_b: &Path, metric: Metric) -> Result<ComparisonTable> {
    let in_b = problem_dirs(cell_b)?;
    let shared: Vec<String> = problem_dirs(cell_a)?
        .into_iter()
        .filter(|p| in_b.contains(p))
        .collect();
    if shared.is_empty() {
        return Err(HarnessError::Usage(format!(
            "{} and {} have no finished problem in common",
            cell_a.display(),
            cell_b.display()
        )));
    }
    let mut rows = Vec::new();
    for problem in shared {
        let a = load_complete(&cell_a.join(&problem).join(AGGREGATE_FILE))?;
        let b = load_complete(&cell_b.join(&problem).join(AGGREGATE_FILE))?;
        let pick = |agg: Aggregate| match metric {
            Metric::Igd => Some(agg.igd),
            Metric::Hv => agg.hv,
        };
        let outcome = match (pick(a), pick(b)) {
            (Some(a), Some(b)) => {
                let verdict = wilcoxon_rank_sum(&a.values, &b.values, orientation(metric));
                RowOutcome::Compared { a, b, verdict }
            }
            _ => RowOutcome::Unavailable,
        };
        rows.push(ComparisonRow { problem, outcome });
    }
    Ok(ComparisonTable {
        cell_a: cell_a.to_path_buf(),
        cell_b: cell_b.to_path_buf(),
        metric,
        rows,
    })
}
