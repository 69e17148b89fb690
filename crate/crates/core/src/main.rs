use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use signdescent::harness::{
    run_experiment, slope_report, ExperimentConfig, ExperimentKind, ReportFormat, RunTable, Statistic,
};
use signdescent::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_CELLS: u8 = 3;

#[derive(Parser)]
#[command(
    name = "signdescent",
    version,
    about = "Threshold learning and sign-oracle coordinate descent experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a threshold-learning experiment and emit its report.
    LearnThreshold {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run an optimization experiment and emit its report.
    Optimize {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run any experiment and write CSV, JSON and a slope summary into a directory.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the log-log slope of an error column in a saved CSV table.
    Slope {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value = "excess_risk")]
        column: String,
        #[arg(long, default_value = "median")]
        statistic: Statistic,
    },
}

enum Failure {
    Config(Error),
    Runtime(String),
    Cells(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } | Error::Parse(_) => Failure::Config(e),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn load(path: &Path, expect: Option<ExperimentKind>) -> Result<ExperimentConfig, Failure> {
    let config = ExperimentConfig::from_file(path).map_err(Failure::Config)?;
    match expect {
        Some(kind) if kind != config.kind => Err(Failure::Config(Error::Config {
            key: "experiment".into(),
            reason: format!("this subcommand expects `{}`", kind_name(kind)),
        })),
        _ => Ok(config),
    }
}

fn kind_name(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::LearnThreshold => "learn-threshold",
        ExperimentKind::Optimize => "optimize",
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Runtime(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Runtime(e.to_string())),
    }
}

fn check_cells(table: &RunTable) -> Result<(), Failure> {
    let failed: Vec<_> = table.failures().collect();
    for row in &failed {
        eprintln!(
            "cell budget={} replication={} failed: {}",
            row.budget,
            row.replication,
            row.error.as_deref().unwrap_or("")
        );
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Cells(failed.len()))
    }
}

fn run_single(path: &Path, kind: ExperimentKind) -> Result<(), Failure> {
    let config = load(path, Some(kind))?;
    let table = run_experiment(&config)?;
    let text = match config.report {
        ReportFormat::Csv => table.to_csv_string(),
        ReportFormat::Json => table.to_json() + "\n",
        ReportFormat::SlopeSummary => slope_report(&table, config.statistic, &config.column)?.to_string(),
    };
    write_out(config.output.as_deref(), &text)?;
    check_cells(&table)
}

fn run_sweep(path: &Path, out: &Path) -> Result<(), Failure> {
    let config = load(path, None)?;
    fs::create_dir_all(out).map_err(|e| Failure::Runtime(format!("{}: {e}", out.display())))?;
    let table = run_experiment(&config)?;
    let base = out.join(&config.name);
    write_out(Some(&base.with_extension("csv")), &table.to_csv_string())?;
    write_out(Some(&base.with_extension("json")), &(table.to_json() + "\n"))?;
    match slope_report(&table, config.statistic, &config.column) {
        Ok(report) => {
            let text = report.to_string();
            write_out(Some(&base.with_extension("slope.txt")), &text)?;
            print!("{text}");
        }
        Err(e) => eprintln!("no slope summary: {e}"),
    }
    check_cells(&table)
}

fn run_slope(table: &Path, column: &str, statistic: Statistic) -> Result<(), Failure> {
    let file = fs::File::open(table).map_err(|e| Failure::Runtime(format!("{}: {e}", table.display())))?;
    let table = RunTable::read_csv(file)?;
    let report = slope_report(&table, statistic, column).map_err(|e| Failure::Runtime(e.to_string()))?;
    print!("{report}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::LearnThreshold { config } => run_single(config, ExperimentKind::LearnThreshold),
        Command::Optimize { config } => run_single(config, ExperimentKind::Optimize),
        Command::Sweep { config, out } => run_sweep(config, out),
        Command::Slope {
            table,
            column,
            statistic,
        } => run_slope(table, column, *statistic),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
        Err(Failure::Cells(n)) => {
            eprintln!("{n} cells failed");
            ExitCode::from(EXIT_CELLS)
        }
    }
}
