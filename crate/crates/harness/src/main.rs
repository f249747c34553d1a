use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use lieflow_harness::catalog::list_catalog;
use lieflow_harness::output::{emit_series, write_summary};
use lieflow_harness::{all_passed, run_suite, Format, RunConfig, RunOptions};

/// Numerical checks of tensor transport by fluid flows.
#[derive(Debug, Parser)]
#[command(name = "lieflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for report files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format; repeat for several. For `list`, `json` selects machine output.
    #[arg(long, global = true, value_enum)]
    format: Vec<Format>,

    /// Overrides the sampling seed of the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Multiplies every tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    tolerance_scale: f64,

    /// Same as the `list` subcommand.
    #[arg(long)]
    list: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print flows, field suites and checks.
    List {
        /// Keep only entries whose name (or check tag) contains this text.
        #[arg(long, default_value = "")]
        filter: String,
    },
    /// Run the configured checks; writes reports only when an output directory is set.
    Check,
    /// Run the configured checks and write reports (CSV and JSON by default).
    Report,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let command = match (&cli.command, cli.list) {
        (Some(c), _) => c,
        (None, true) => &Command::List { filter: String::new() },
        (None, false) => bail!("nothing to do: give a subcommand (list, check, report) or --list"),
    };
    match command {
        Command::List { filter } => {
            print!("{}", list_catalog(filter, cli.format.contains(&Format::Json)));
            Ok(true)
        }
        Command::Check => execute(&cli, false),
        Command::Report => execute(&cli, true),
    }
}

fn execute(cli: &Cli, always_write: bool) -> anyhow::Result<bool> {
    let path = cli.config.as_ref().context("--config is required")?;
    let config = RunConfig::load(path)?;
    let options = RunOptions {
        seed: cli.seed,
        tolerance_scale: cli.tolerance_scale,
    };
    let reports = run_suite(&config, options)?;
    for r in &reports {
        println!(
            "{} {:<24} {:<32} max {:.3e}  tol {:.1e}  ({:.0} ms)",
            if r.passed { "PASS" } else { "FAIL" },
            r.check,
            r.theorem,
            r.max_residual,
            r.tolerance,
            r.runtime_ms
        );
        for note in r.notes.iter().filter(|_| !r.passed) {
            println!("     {note}");
        }
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} of {} checks passed", reports.len() - failed, reports.len());

    let dir = cli
        .out
        .clone()
        .or_else(|| config.output.dir.clone())
        .or_else(|| always_write.then(|| PathBuf::from("lieflow-report")));
    if let Some(dir) = dir {
        let formats = if !cli.format.is_empty() {
            cli.format.clone()
        } else if !config.output.formats.is_empty() {
            config.output.formats.clone()
        } else {
            vec![Format::Csv, Format::Json]
        };
        for r in &reports {
            for f in &formats {
                emit_series(r, *f, &dir).with_context(|| format!("writing {} report", r.check))?;
            }
        }
        let flow = config.resolve()?.flow.to_string();
        write_summary(&reports, &flow, &dir).context("writing summary")?;
        println!("reports written to {}", dir.display());
    }
    Ok(all_passed(&reports))
}
