//! `tqkd` — run and sweep time-coding QKD protocol simulations.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use tqkd::{run_session, EveStrategy, SessionConfig};
use tqkd_cli::config::{apply_overrides, load_config, parse_eve_selector, Overrides};
use tqkd_cli::output::{report_to_csv, report_to_json, sweep_to_csv};
use tqkd_cli::sweep::{run_sweep, SweepParam, SweepSpec};

#[derive(Parser)]
#[command(
    name = "tqkd",
    version,
    about = "Monte Carlo simulator of a time-coding quantum key distribution protocol"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one session and write its report.
    Run(RunArgs),
    /// Run a parameter sweep and write a CSV table.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to a JSON session config.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's pulse count.
    #[arg(long)]
    pulses: Option<u64>,
    /// Override the adversary: none, resend-full, resend-full-suppress, or
    /// resend-short=<duration>.
    #[arg(long, value_parser = parse_eve_selector)]
    eve: Option<EveStrategy>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    /// Full report, floats at 17 significant digits.
    Json,
    /// One-row summary with the fixed sweep column set.
    Csv,
}

#[derive(Args)]
struct SweepArgs {
    /// Path to the base JSON session config.
    #[arg(long)]
    config: PathBuf,
    /// Parameter to vary: intercept_fraction, eve.pulse_duration,
    /// channel.transmittance, or n_pulses.
    #[arg(long)]
    param: SweepParam,
    /// First grid value.
    #[arg(long)]
    from: f64,
    /// Last grid value (inclusive).
    #[arg(long)]
    to: f64,
    /// Number of grid points (at least 2).
    #[arg(long)]
    steps: usize,
    /// Sessions per grid point.
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

fn load_with_overrides(path: &Path, overrides: &Overrides) -> Result<SessionConfig> {
    let mut cfg = load_config(path)?;
    apply_overrides(&mut cfg, overrides);
    // fail fast, before any simulation or output, and surface warnings
    let warnings = cfg
        .validate()
        .with_context(|| format!("invalid config in {}", path.display()))?;
    for warning in warnings {
        eprintln!("warning: {warning}");
    }
    Ok(cfg)
}

fn write_output(path: Option<&PathBuf>, content: &str) -> Result<()> {
    match path {
        // the content is fully rendered before this point, so a config or
        // simulation failure never leaves a partial file behind
        Some(path) => fs::write(path, content)
            .with_context(|| format!("cannot write output file {}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let cfg = load_with_overrides(
        &args.config,
        &Overrides {
            seed: args.seed,
            pulses: args.pulses,
            eve: args.eve.clone(),
        },
    )?;
    let report = run_session(&cfg)?;
    let rendered = match args.format {
        OutputFormat::Json => report_to_json(&report),
        OutputFormat::Csv => report_to_csv(cfg.seed, &report)?,
    };
    write_output(args.out.as_ref(), &rendered)
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let base = load_with_overrides(&args.config, &Overrides::default())?;
    let spec = SweepSpec {
        param: args.param,
        from: args.from,
        to: args.to,
        steps: args.steps,
        repetitions: args.reps,
        base,
    };
    let rows = run_sweep(&spec)?;
    let rendered = sweep_to_csv(&rows)?;
    write_output(Some(&args.out), &rendered)
}
