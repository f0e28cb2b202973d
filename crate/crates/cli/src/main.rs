//! `hprow`: run, report on and verify Hermite-Padé row experiments.
//!
//! Exit codes: 0 success, 1 I/O or other failure, 2 configuration or
//! schema error, 3 numeric failure (failed rows, failed analyses, verify
//! violations), 4 a detector hypothesis does not hold.

mod analysis;
mod config;
mod record;
mod report;
mod runner;
mod verify;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use crate::analysis::{FailureKind, Reports};
use crate::config::ConfigError;
use crate::record::SchemaError;

#[derive(Parser)]
#[command(name = "hprow", version, about = "Hermite-Padé row sequence experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured row range and run the requested analyses.
    Run {
        config: PathBuf,
        /// Overrides `run.output_dir`.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Regenerate or export reports from a run directory.
    Report {
        dir: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: report::Format,
    },
    /// Recheck residual bounds of a run directory.
    Verify { dir: PathBuf },
}

const EXIT_IO: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_HYPOTHESIS: u8 = 4;

fn analysis_exit(reports: &Reports, failed_rows: usize) -> u8 {
    let failures = reports.failures();
    for (name, f) in &failures {
        eprintln!("{name}: {:?}: {}", f.kind, f.message);
    }
    if failed_rows > 0 || failures.iter().any(|(_, f)| f.kind == FailureKind::Numeric) {
        EXIT_NUMERIC
    } else if !failures.is_empty() {
        EXIT_HYPOTHESIS
    } else {
        0
    }
}

fn execute(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Run { config, output_dir } => {
            let source = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let mut cfg = config::parse(&source)?;
            if let Some(dir) = output_dir {
                cfg.output_dir = dir;
            }
            let out = runner::run(&cfg, &source)?;
            let failed = record::failed_rows(&out.records);
            for (n, e) in &failed {
                eprintln!("row n={n} failed: {e}");
            }
            println!(
                "{} rows ({} failed), reports in {}",
                out.records.len(),
                failed.len(),
                cfg.output_dir.join("reports").display()
            );
            Ok(analysis_exit(&out.reports, failed.len()))
        }
        Command::Report { dir, format } => {
            let reports = report::report(&dir, format)?;
            let failed = record::failed_rows(&record::RunDir::load(&dir)?.records).len();
            Ok(analysis_exit(&reports, failed))
        }
        Command::Verify { dir } => {
            let v = verify::verify(&dir)?;
            for msg in &v.violations {
                eprintln!("{msg}");
            }
            println!("{} checks, {} violations", v.checked, v.violations.len());
            Ok(if v.ok() { 0 } else { EXIT_NUMERIC })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("HPROW_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = if e.downcast_ref::<ConfigError>().is_some() || e.downcast_ref::<SchemaError>().is_some() {
                EXIT_CONFIG
            } else {
                EXIT_IO
            };
            ExitCode::from(code)
        }
    }
}
