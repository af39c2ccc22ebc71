use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hmclab_bench::checks::{self, CheckLine};
use hmclab_bench::config::Format;
use hmclab_bench::{experiments, report, BenchConfig, BenchError};

/// Benchmark harness for the HMC variants.
#[derive(Debug, Parser)]
#[command(name = "bench", version)]
struct Cli {
    /// JSON config; every field is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Evaluate the acceptance thresholds for this command; exit 1 on failure.
    #[arg(long, global = true)]
    check: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every algorithm on every chain and report per-chain diagnostics.
    Sample,
    /// Averaged ESS and covariance error per algorithm.
    Table1,
    /// Iterations to tolerance against condition number.
    Scaling,
    /// Integrator bias orders and the sMC variance check.
    Integrators,
}

fn load(cli: &Cli) -> Result<BenchConfig, BenchError> {
    let mut cfg = match &cli.config {
        Some(p) => BenchConfig::load(p)?,
        None => BenchConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.output = Some(o.clone());
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<Option<CheckLine>, BenchError> {
    let cfg = load(cli)?;
    let out = cfg.output.as_deref();
    match cli.command.as_ref().unwrap_or(&Command::Sample) {
        Command::Sample => {
            let runs = experiments::sample(&cfg)?;
            report::emit(out, &report::render_sample(&cfg, &runs)?)?;
            if cfg.positions {
                if let Some(p) = out {
                    report::emit(Some(&report::positions_path(p)), &report::render_positions(&cfg, &runs)?)?;
                }
            }
            Ok(None)
        }
        Command::Table1 => {
            report::emit(out, &report::render_table1(&cfg, &experiments::table1(&cfg)?)?)?;
            Ok(cli.check.then(checks::criterion_10))
        }
        Command::Scaling => {
            report::emit(out, &report::render_scaling(&cfg, &experiments::scaling(&cfg)?)?)?;
            Ok(cli.check.then(checks::criterion_3))
        }
        Command::Integrators => {
            report::emit(out, &report::render_integrators(&cfg, &experiments::integrators(&cfg)?)?)?;
            Ok(cli.check.then(checks::criterion_7))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(Some(line)) => {
            eprintln!("{line}");
            if line.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bench: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
