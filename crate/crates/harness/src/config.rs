//! Experiment configuration files.
//!
//! ```toml
//! problems = ["bnh", "tnk"]
//! runs = 30
//! base_seed = 0
//! output_dir = "results"
//!
//! [defaults]
//! budget = 20000
//!
//! [cells.reversed]
//! archive_normalization = "reversed"
//!
//! [cells.standard]
//! archive_normalization = "standard"
//!
//! [[compare]]
//! a = "reversed"
//! b = "standard"
//! metric = "igd"
//! ```
//!
//! `[defaults]` applies to every cell and each cell may override any of its
//! keys. Without cells there is one cell called `default`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nsbidico::{problems, ArchiveNormalization, ArchiveSource, RunConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use toml::Spanned;

use crate::error::{HarnessError, Result};

/// Environment variable naming the output root when the file has none.
pub const OUTPUT_ENV: &str = "NSBIDICO_OUTPUT";
pub const DEFAULT_OUTPUT_DIR: &str = "nsbidico-output";
pub const DEFAULT_RUNS: usize = 30;
pub const DEFAULT_REFERENCE_POINTS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Igd,
    Hv,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Igd => "igd",
            Metric::Hv => "hv",
        }
    }
}

/// Which documented F/CR pair fills in when a cell leaves them unset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParameterStyle {
    /// CR = 1, F = 0.5.
    #[default]
    Benchmark,
    /// CR = 0.45, F = 0.7.
    RealWorld,
}

impl ParameterStyle {
    fn f_cr(self) -> (f64, f64) {
        match self {
            ParameterStyle::Benchmark => (0.5, 1.0),
            ParameterStyle::RealWorld => (0.7, 0.45),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellConfig {
    pub name: String,
    /// Everything but the seed, which comes from the run index.
    pub run: RunConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonSpec {
    pub a: String,
    pub b: String,
    pub metric: Metric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problems: Vec<String>,
    pub cells: Vec<CellConfig>,
    pub runs: usize,
    pub base_seed: u64,
    pub output_dir: PathBuf,
    pub workers: usize,
    pub reference_points: usize,
    pub parameter_style: ParameterStyle,
    pub comparisons: Vec<ComparisonSpec>,
}

impl ExperimentConfig {
    /// The run configuration for one problem, with `p_m` made concrete.
    pub fn resolve(&self, cell: &CellConfig, problem: &str, seed: u64) -> Result<RunConfig> {
        let def = problems::lookup(problem)?;
        Ok(RunConfig {
            pm: Some(cell.run.pm.unwrap_or(1.0 / def.n() as f64)),
            seed,
            ..cell.run.clone()
        })
    }

    pub fn cell(&self, name: &str) -> Option<&CellConfig> {
        self.cells.iter().find(|c| c.name == name)
    }

    /// SHA-256 over everything that determines a run's output except the
    /// seed.
    pub fn digest(&self, cell: &CellConfig, problem: &str) -> Result<String> {
        let c = self.resolve(cell, problem, 0)?;
        let canonical = format!(
            "problem={problem};population_size={};budget={};f={:?};cr={:?};pm={:?};eta_m={:?};\
             epsilon={:?};force_inherit={};archive_normalization={};archive_source={};\
             reference_points={}",
            c.population_size,
            c.budget,
            c.f,
            c.cr,
            c.pm.unwrap_or(f64::NAN),
            c.eta_m,
            c.epsilon,
            c.force_inherit,
            normalization_name(c.archive_normalization),
            source_name(c.archive_source),
            self.reference_points,
        );
        let mut hex = String::with_capacity(64);
        for byte in Sha256::digest(canonical.as_bytes()) {
            let _ = write!(hex, "{byte:02x}");
        }
        Ok(hex)
    }

    /// The fully resolved configuration as written next to the results.
    pub fn resolved_toml(&self) -> Result<String> {
        let mut cells = Vec::new();
        for cell in &self.cells {
            let mut runs = Vec::new();
            for problem in &self.problems {
                let c = self.resolve(cell, problem, 0)?;
                runs.push(ResolvedRun {
                    problem: problem.clone(),
                    config_digest: self.digest(cell, problem)?,
                    population_size: c.population_size,
                    budget: c.budget,
                    f: c.f,
                    cr: c.cr,
                    pm: c.pm.unwrap_or(f64::NAN),
                    eta_m: c.eta_m,
                    epsilon: c.epsilon,
                    force_inherit: c.force_inherit,
                    archive_normalization: normalization_name(c.archive_normalization),
                    archive_source: source_name(c.archive_source),
                });
            }
            cells.push(ResolvedCell {
                name: cell.name.clone(),
                run: runs,
            });
        }
        let file = ResolvedFile {
            problems: self.problems.clone(),
            runs: self.runs,
            base_seed: self.base_seed,
            output_dir: self.output_dir.display().to_string(),
            workers: self.workers,
            reference_points: self.reference_points,
            parameter_defaults: self.parameter_style,
            cell: cells,
            compare: self
                .comparisons
                .iter()
                .map(|c| ResolvedComparison {
                    a: c.a.clone(),
                    b: c.b.clone(),
                    metric: c.metric,
                })
                .collect(),
        };
        toml::to_string(&file).map_err(|e| HarnessError::Format {
            path: self.output_dir.join(RESOLVED_FILE),
            message: e.to_string(),
        })
    }
}

/// Name of the resolved-configuration echo inside the output directory.
pub const RESOLVED_FILE: &str = "resolved_config.toml";

#[derive(Serialize)]
struct ResolvedFile {
    problems: Vec<String>,
    runs: usize,
    base_seed: u64,
    output_dir: String,
    workers: usize,
    reference_points: usize,
    parameter_defaults: ParameterStyle,
    cell: Vec<ResolvedCell>,
    compare: Vec<ResolvedComparison>,
}

#[derive(Serialize)]
struct ResolvedCell {
    name: String,
    run: Vec<ResolvedRun>,
}

#[derive(Serialize)]
struct ResolvedRun {
    problem: String,
    config_digest: String,
    population_size: usize,
    budget: u64,
    f: f64,
    cr: f64,
    pm: f64,
    eta_m: f64,
    epsilon: f64,
    force_inherit: bool,
    archive_normalization: &'static str,
    archive_source: &'static str,
}

#[derive(Serialize)]
struct ResolvedComparison {
    a: String,
    b: String,
    metric: Metric,
}

pub fn normalization_name(n: ArchiveNormalization) -> &'static str {
    match n {
        ArchiveNormalization::Reversed => "reversed",
        ArchiveNormalization::Standard => "standard",
    }
}

pub fn source_name(s: ArchiveSource) -> &'static str {
    match s {
        ArchiveSource::PreSelection => "pre-selection",
        ArchiveSource::PostSelection => "post-selection",
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum NormalizationKey {
    Reversed,
    Standard,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum SourceKey {
    PreSelection,
    PostSelection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    problems: Spanned<Vec<Spanned<String>>>,
    runs: Option<Spanned<usize>>,
    base_seed: Option<u64>,
    output_dir: Option<PathBuf>,
    workers: Option<Spanned<usize>>,
    reference_points: Option<Spanned<usize>>,
    parameter_defaults: Option<ParameterStyle>,
    #[serde(default)]
    defaults: Overrides,
    #[serde(default)]
    cells: BTreeMap<String, Spanned<Overrides>>,
    #[serde(default)]
    compare: Vec<Spanned<RawComparison>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComparison {
    a: String,
    b: String,
    metric: Metric,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Overrides {
    population_size: Option<Spanned<usize>>,
    budget: Option<Spanned<u64>>,
    f: Option<Spanned<f64>>,
    cr: Option<Spanned<f64>>,
    pm: Option<Spanned<f64>>,
    eta_m: Option<Spanned<f64>>,
    epsilon: Option<Spanned<f64>>,
    force_inherit: Option<Spanned<bool>>,
    archive_normalization: Option<Spanned<NormalizationKey>>,
    archive_source: Option<Spanned<SourceKey>>,
}

type Setter = Box<dyn Fn(&mut RunConfig)>;

impl Overrides {
    /// Each present key as a span plus the change it makes.
    fn settings(&self) -> Vec<(std::ops::Range<usize>, Setter)> {
        let mut out: Vec<(std::ops::Range<usize>, Setter)> = Vec::new();
        macro_rules! field {
            ($name:ident, |$c:ident, $v:ident| $body:expr) => {
                if let Some(s) = &self.$name {
                    let $v = *s.get_ref();
                    out.push((s.span(), Box::new(move |$c: &mut RunConfig| $body)));
                }
            };
        }
        field!(population_size, |c, v| c.population_size = v);
        field!(budget, |c, v| c.budget = v);
        field!(f, |c, v| c.f = v);
        field!(cr, |c, v| c.cr = v);
        field!(pm, |c, v| c.pm = Some(v));
        field!(eta_m, |c, v| c.eta_m = v);
        field!(epsilon, |c, v| c.epsilon = v);
        field!(force_inherit, |c, v| c.force_inherit = v);
        field!(archive_normalization, |c, v| {
            c.archive_normalization = match v {
                NormalizationKey::Reversed => ArchiveNormalization::Reversed,
                NormalizationKey::Standard => ArchiveNormalization::Standard,
            }
        });
        field!(archive_source, |c, v| {
            c.archive_source = match v {
                SourceKey::PreSelection => ArchiveSource::PreSelection,
                SourceKey::PostSelection => ArchiveSource::PostSelection,
            }
        });
        out
    }
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_config_str(&text, path, std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
}

/// Parses configuration text. `path` is only used in messages;
/// `output_root` stands in for the environment variable.
pub fn parse_config_str(
    text: &str,
    path: &Path,
    output_root: Option<PathBuf>,
) -> Result<ExperimentConfig> {
    let fail = |span: Option<std::ops::Range<usize>>, message: String| HarnessError::Config {
        path: path.to_path_buf(),
        message: match span {
            Some(s) => {
                let (line, column) = line_column(text, s.start);
                format!("line {line}, column {column}: {message}")
            }
            None => message,
        },
    };
    let raw: RawConfig = toml::from_str(text).map_err(|e| fail(None, e.to_string()))?;

    let problem_list = raw.problems.get_ref();
    if problem_list.is_empty() {
        return Err(fail(Some(raw.problems.span()), "no problems listed".into()));
    }
    let mut problems_out: Vec<String> = Vec::new();
    for p in problem_list {
        let name = p.get_ref();
        if problems::lookup(name).is_err() {
            return Err(fail(
                Some(p.span()),
                format!(
                    "unknown problem '{name}' (built-in: {})",
                    problems::BUILTIN.join(", ")
                ),
            ));
        }
        if problems_out.contains(name) {
            return Err(fail(Some(p.span()), format!("problem '{name}' listed twice")));
        }
        problems_out.push(name.clone());
    }

    let at_least_one = |v: &Option<Spanned<usize>>, key: &str, default: usize| match v {
        Some(s) if *s.get_ref() == 0 => Err(fail(Some(s.span()), format!("{key} must be at least 1"))),
        Some(s) => Ok(*s.get_ref()),
        None => Ok(default),
    };
    let runs = at_least_one(&raw.runs, "runs", DEFAULT_RUNS)?;
    let default_workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let workers = at_least_one(&raw.workers, "workers", default_workers)?;
    let reference_points = match &raw.reference_points {
        Some(s) if *s.get_ref() < 2 => {
            return Err(fail(Some(s.span()), "reference_points must be at least 2".into()))
        }
        Some(s) => *s.get_ref(),
        None => DEFAULT_REFERENCE_POINTS,
    };

    let style = raw.parameter_defaults.unwrap_or_default();
    let (f, cr) = style.f_cr();
    let base = RunConfig {
        f,
        cr,
        ..RunConfig::default()
    };
    let defaults = raw.defaults.settings();

    let mut named: Vec<(String, Option<Spanned<Overrides>>)> = raw
        .cells
        .into_iter()
        .map(|(name, o)| (name, Some(o)))
        .collect();
    if named.is_empty() {
        named.push(("default".into(), None));
    }
    // Keep file order rather than the map's alphabetical order.
    named.sort_by_key(|(_, o)| o.as_ref().map_or(0, |o| o.span().start));

    let mut cells = Vec::new();
    for (name, overrides) in named {
        let cell_span = overrides.as_ref().map(|o| o.span());
        if name.is_empty()
            || !name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(fail(
                cell_span,
                format!("cell name '{name}' may only use letters, digits, '_' and '-'"),
            ));
        }
        let own = overrides.map(|o| o.into_inner().settings()).unwrap_or_default();
        let mut run = base.clone();
        for (span, set) in defaults.iter().chain(&own) {
            // Checked alone first so the message points at the offending key.
            // The smallest legal population and an unbounded budget leave
            // only genuinely out-of-range values failing here.
            let mut probe = RunConfig {
                population_size: 4,
                budget: u64::MAX,
                ..base.clone()
            };
            set(&mut probe);
            if let Err(e) = probe.validate() {
                return Err(fail(Some(span.clone()), e.to_string()));
            }
            set(&mut run);
        }
        run.validate()
            .map_err(|e| fail(cell_span.clone(), format!("cell '{name}': {e}")))?;
        cells.push(CellConfig { name, run });
    }

    let mut comparisons = Vec::new();
    for c in raw.compare {
        let span = c.span();
        let c = c.into_inner();
        for side in [&c.a, &c.b] {
            if !cells.iter().any(|cell| &cell.name == side) {
                return Err(fail(Some(span.clone()), format!("compare names unknown cell '{side}'")));
            }
        }
        comparisons.push(ComparisonSpec {
            a: c.a,
            b: c.b,
            metric: c.metric,
        });
    }

    let output_dir = raw
        .output_dir
        .or(output_root)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));

    Ok(ExperimentConfig {
        problems: problems_out,
        cells,
        runs,
        base_seed: raw.base_seed.unwrap_or(0),
        output_dir,
        workers,
        reference_points,
        parameter_style: style,
        comparisons,
    })
}

/// 1-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}
