use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use matlip_cli::config;
use matlip_cli::tasks::{self, Task};

#[derive(Parser)]
#[command(
    name = "matlip",
    version,
    about = "Matrix Lipschitz seminorms and matrix metrics on matrix state spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Audit the matrix seminorm relations on random samples.
    CheckSeminorm(RunArgs),
    /// Distances between pairs of matrix states.
    Distance(RunArgs),
    /// Lower estimates of the seminorm recovered from the metric.
    Recover(RunArgs),
    /// Dual gauge of functionals vanishing on the unit.
    DualGauge(RunArgs),
    /// Audit symmetry, triangle, direct-sum and compression relations of the metric.
    MetricAudit(RunArgs),
    /// Audit convexity, midpoint balance and midpoint concavity of the metric.
    ConvexityAudit(RunArgs),
    /// The matrix norm built from the metric, on functionals vanishing on the unit.
    NormFromMetric(RunArgs),
    /// Compare distances with the transport or grid oracle.
    OracleCompare(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Seed for all random draws; overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `output` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads. Results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
}

impl Command {
    fn split(self) -> (Task, RunArgs) {
        match self {
            Command::CheckSeminorm(a) => (Task::CheckSeminorm, a),
            Command::Distance(a) => (Task::Distance, a),
            Command::Recover(a) => (Task::Recover, a),
            Command::DualGauge(a) => (Task::DualGauge, a),
            Command::MetricAudit(a) => (Task::MetricAudit, a),
            Command::ConvexityAudit(a) => (Task::ConvexityAudit, a),
            Command::NormFromMetric(a) => (Task::NormFromMetric, a),
            Command::OracleCompare(a) => (Task::OracleCompare, a),
        }
    }
}

fn run(task: Task, args: RunArgs) -> Result<bool> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .context("cannot start the worker pool")?;
    }
    let cfg = config::load(&args.config)?;
    let base = args.config.parent().map(PathBuf::from).unwrap_or_default();
    let result = tasks::run(task, &cfg, &base, args.seed)?;
    let out = args
        .out
        .or_else(|| cfg.output.as_ref().map(|p| base.join(p)))
        .unwrap_or_else(|| PathBuf::from("matlip-out"));
    result
        .output
        .write(&out)
        .with_context(|| format!("cannot write results to {}", out.display()))?;
    for line in &result.output.summary {
        println!("{line}");
    }
    Ok(result.violations)
}

fn main() -> ExitCode {
    let (task, args) = Cli::parse().command.split();
    match run(task, args) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            match e.downcast_ref::<config::ConfigError>() {
                Some(_) => eprintln!("config error: {e:#}"),
                None => eprintln!("error: {e:#}"),
            }
            ExitCode::from(1)
        }
    }
}
