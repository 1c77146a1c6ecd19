//! `platform-sim`: equilibrium analysis and simulation experiments.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration, 3 failed
//! run.

mod analyze;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use platform_sim::equilibrium::WelfareThresholds;
use platform_sim::experiments::{self, ExperimentError};

use crate::config::{Config, ConfigError};

#[derive(Debug, Parser)]
#[command(
    name = "platform-sim",
    version,
    about = "Content platform equilibrium analysis and simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the analytic equilibrium and welfare report.
    Analyze(AnalyzeArgs),
    /// Run one simulation and write history.csv plus chart panels.
    Run(RunArgs),
    /// Run the sweep section of the config and write sweep.csv.
    Sweep(BatchArgs),
    /// Run the grid section of the config and write grid.csv.
    Grid(BatchArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON config file. Built-in defaults are used when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides the configured seed (and sweep/grid seed lists).
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Print machine-readable JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: Common,
    /// Also write analysis.csv into this directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Optimal quality at or above which AI content counts as high quality.
    #[arg(long, default_value_t = 1.0)]
    quality_threshold: f64,
    /// Overload weight at or below which overload counts as low.
    #[arg(long, default_value_t = 0.5)]
    overload_threshold: f64,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BatchArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Worker threads, 0 for one per core. Falls back to
    /// PLATFORM_SIM_THREADS, then 0.
    #[arg(long, value_name = "N", env = "PLATFORM_SIM_THREADS")]
    parallel: Option<usize>,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn io(message: impl ToString) -> Self {
        Failure {
            code: 1,
            message: message.to_string(),
        }
    }

    pub fn invalid(message: impl ToString) -> Self {
        Failure {
            code: 2,
            message: message.to_string(),
        }
    }

    pub fn run(message: impl ToString) -> Self {
        Failure {
            code: 3,
            message: message.to_string(),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => Failure::io(e),
            _ => Failure::invalid(e),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Io { .. } | ExperimentError::Csv { .. } => Failure::io(e),
            _ if e.is_validation() => Failure::invalid(e),
            _ => Failure::run(e),
        }
    }
}

fn load(common: &Common) -> Result<Config, Failure> {
    let mut config = match &common.config {
        Some(path) => Config::load(path)?,
        None => Config::builtin(),
    };
    if let Some(seed) = common.seed {
        config.override_seed(seed);
    }
    Ok(config)
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::io(format!("cannot create {}: {e}", dir.display())))
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serializes")
    );
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let config = load(&args.common)?;
    let sim = &config.sim;
    let result = experiments::run_baseline(sim).map_err(Failure::run)?;
    create_dir(&args.out)?;
    experiments::write_csv(&result.history, &args.out.join("history.csv"))?;
    if !result.history.is_empty() {
        for (stem, plot) in experiments::history_panels(&result.history, sim.introduce_ai_step) {
            experiments::emit_plot(&plot, &args.out.join(format!("{stem}.svg")))?;
        }
    }
    let last = result.history.last();
    if args.common.json {
        print_json(&serde_json::json!({
            "ticks": result.history.len(),
            "final": last,
            "shock_summary": result.summary.as_ref().ok(),
        }));
    } else {
        println!("ticks: {}", result.history.len());
        if let Some(r) = last {
            println!(
                "final: content {} humans {} ai {} gini {:.4} W {:.4}",
                r.total_content, r.n_human_active, r.n_ai_active, r.gini, r.social_welfare
            );
        }
        match &result.summary {
            Ok(s) => {
                for column in [
                    "consumer_surplus",
                    "producer_surplus",
                    "social_welfare",
                    "n_human_active",
                ] {
                    println!(
                        "shock delta {column}: {:.6}",
                        s.delta.get(column).unwrap_or(f64::NAN)
                    );
                }
            }
            Err(e) => println!("shock summary unavailable: {e}"),
        }
        println!("wrote {}", args.out.display());
    }
    Ok(())
}

fn threads(args: &BatchArgs) -> usize {
    args.parallel.unwrap_or(0)
}

fn cmd_sweep(args: BatchArgs) -> Result<(), Failure> {
    let config = load(&args.common)?;
    let spec = config
        .sweep
        .ok_or_else(|| Failure::invalid("config has no `sweep` section"))?;
    let result = experiments::sensitivity_sweep(&spec, threads(&args))?;
    create_dir(&args.out)?;
    experiments::write_csv(&result.rows, &args.out.join("sweep.csv"))?;
    if args.common.json {
        print_json(&result);
    } else {
        print!("{}", experiments::to_csv(&result.rows));
    }
    Ok(())
}

fn cmd_grid(args: BatchArgs) -> Result<(), Failure> {
    let config = load(&args.common)?;
    let spec = config
        .grid
        .ok_or_else(|| Failure::invalid("config has no `grid` section"))?;
    let result = experiments::policy_grid(&spec, threads(&args))?;
    create_dir(&args.out)?;
    experiments::write_csv(&result.rows, &args.out.join("grid.csv"))?;
    if args.common.json {
        print_json(&result);
    } else {
        print!("{}", experiments::to_csv(&result.rows));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze(args) => load(&args.common).and_then(|c| {
            let thresholds = WelfareThresholds {
                quality: args.quality_threshold,
                overload: args.overload_threshold,
            };
            analyze::cmd_analyze(
                &c.sim.model_params,
                thresholds,
                args.common.json,
                args.out.as_deref(),
            )
        }),
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Grid(args) => cmd_grid(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
