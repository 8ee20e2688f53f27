use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nsbidico::problems;
use nsbidico_harness::config::OUTPUT_ENV;
use nsbidico_harness::{
    compare_cells, export_front, parse_config, run_experiment, HarnessError, Metric,
};

#[derive(Parser)]
#[command(name = "nsbidico", version, about = "Run and compare constrained multi-objective experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute every run of an experiment configuration.
    Run { config: PathBuf },
    /// Compare two finished cells problem by problem.
    Compare {
        /// Cell directory, or a cell name under $NSBIDICO_OUTPUT.
        cell_a: PathBuf,
        cell_b: PathBuf,
        #[arg(long, value_enum)]
        metric: MetricArg,
    },
    /// Write the final front of a run record as CSV.
    ExportFront { record: PathBuf, out: PathBuf },
    /// Show the built-in problems.
    ListProblems,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Igd,
    Hv,
}

fn cell_path(given: &Path) -> PathBuf {
    if given.exists() {
        return given.to_path_buf();
    }
    match std::env::var_os(OUTPUT_ENV) {
        Some(root) => Path::new(&root).join(given),
        None => given.to_path_buf(),
    }
}

fn execute(command: Command) -> Result<ExitCode, HarnessError> {
    match command {
        Command::Run { config } => {
            let config = parse_config(&config)?;
            let report = run_experiment(&config)?;
            for cell in &report.cells {
                let a = &cell.aggregate;
                println!(
                    "{}: {}/{} runs, igd median {:.4e}",
                    cell.directory.display(),
                    a.runs_completed,
                    a.runs_expected,
                    a.igd.median
                );
            }
            for path in &report.comparisons {
                println!("comparison written to {}", path.display());
            }
            let failed = report.failed_runs();
            if failed > 0 {
                eprintln!("error: {failed} run(s) failed; see the aggregate files");
                return Ok(ExitCode::from(2));
            }
        }
        Command::Compare {
            cell_a,
            cell_b,
            metric,
        } => {
            let metric = match metric {
                MetricArg::Igd => Metric::Igd,
                MetricArg::Hv => Metric::Hv,
            };
            let table = compare_cells(&cell_path(&cell_a), &cell_path(&cell_b), metric)?;
            print!("{table}");
        }
        Command::ExportFront { record, out } => export_front(&record, &out)?,
        Command::ListProblems => {
            println!("{:<10} {:>3} {:>3} {:>5} {:>5}  bounds", "name", "n", "m", "ineq", "eq");
            for p in problems::registry() {
                let bounds: Vec<String> = p
                    .lower()
                    .iter()
                    .zip(p.upper())
                    .map(|(lo, hi)| format!("[{lo}, {hi}]"))
                    .collect();
                println!(
                    "{:<10} {:>3} {:>3} {:>5} {:>5}  {}",
                    p.name(),
                    p.n(),
                    p.m(),
                    p.p(),
                    p.l() - p.p(),
                    bounds.join(" ")
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
