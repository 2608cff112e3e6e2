//! `sndh`: generate instances and demand scenarios, bundle scenarios with
//! fuzzy c-means or k-means, and solve the resulting stochastic service
//! network design either exactly or with bundle-decomposed progressive
//! hedging.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};

use sndh::commands::{cmd_bundle, cmd_gen, cmd_solve, BundleArgs, BundleMethod, GenArgs, SolveArgs};
use sndh::experiment::{cmd_experiment, ExperimentConfig};
use sndh::formats::read_json;

#[derive(Parser)]
#[command(name = "sndh", version, about = "Stochastic service network design toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file and scenario files.
    Gen(GenOpts),
    /// Group a scenario file into bundles.
    Bundle(BundleOpts),
    /// Solve an instance over a scenario set.
    Solve(SolveOpts),
    /// Run the full bundling-method comparison grid.
    Experiment(ExperimentOpts),
}

#[derive(Args)]
struct GenOpts {
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 12)]
    terminals: usize,
    #[arg(long, default_value_t = 5)]
    horizon: usize,
    #[arg(long, default_value_t = 6)]
    commodities: usize,
    #[arg(long, default_value_t = 12.0)]
    capacity: f64,
    /// Cost per outsourced flow unit.
    #[arg(long, default_value_t = 80.0)]
    outsourcing: f64,
    /// Scenario counts, one file per count.
    #[arg(long, value_delimiter = ',', default_value = "48,72,96,120,150")]
    scenarios: Vec<usize>,
    /// Rescale each commodity's sample to the exact triangular moments.
    #[arg(long, default_value_t = false)]
    moment_correct: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MethodOpt {
    Fcm,
    Kmeans,
}

#[derive(Args)]
struct BundleOpts {
    /// Scenario file to bundle.
    #[arg(long)]
    scenarios: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodOpt::Fcm)]
    method: MethodOpt,
    /// Number of bundles.
    #[arg(long, default_value_t = 5)]
    bundles: usize,
    /// Fuzzy partition matrix exponent (FCM only).
    #[arg(long, default_value_t = 2.0)]
    exponent: f64,
    /// Membership score threshold.
    #[arg(long, default_value_t = 0.8)]
    gamma: f64,
    /// Interval parameter for scenarios below the threshold.
    #[arg(long, default_value_t = 0.95)]
    eta: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct SolveOpts {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    scenarios: PathBuf,
    /// Bundle file (required unless --extensive).
    #[arg(long)]
    bundles: Option<PathBuf>,
    /// Solve the extensive form exactly instead of running the heuristic.
    #[arg(long, default_value_t = false)]
    extensive: bool,
    /// Column guard for the extensive form.
    #[arg(long, default_value_t = 100_000)]
    max_extensive_cols: usize,
    /// Penalty factor.
    #[arg(long, default_value_t = 1.5)]
    rho: f64,
    /// Penalty grid; the best run wins.
    #[arg(long, value_delimiter = ',')]
    rho_grid: Option<Vec<f64>>,
    /// Consensus tolerance.
    #[arg(long, default_value_t = 1e-5)]
    tolerance: f64,
    /// Wall-clock budget in seconds.
    #[arg(long, default_value_t = 10_800.0)]
    max_seconds: f64,
    #[arg(long, default_value_t = 200)]
    max_iterations: usize,
    /// Relative MIP gap for subproblem (and extensive) solves.
    #[arg(long, default_value_t = 0.05)]
    mip_gap: f64,
    /// Reference objective for the relative-difference report.
    #[arg(long)]
    reference: Option<f64>,
    /// Write the per-iteration trace CSV here.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentOpts {
    /// Experiment configuration JSON; desk-scale defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "experiment_out")]
    out: PathBuf,
    /// Overrides the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Gen(opts) => {
            let written = cmd_gen(&GenArgs {
                out_dir: opts.out,
                seed: opts.seed,
                terminals: opts.terminals,
                horizon: opts.horizon,
                commodities: opts.commodities,
                capacity: opts.capacity,
                outsourcing_cost: opts.outsourcing,
                scenario_counts: opts.scenarios,
                moment_correct: opts.moment_correct,
            })?;
            for path in written {
                println!("{}", path.display());
            }
            Ok(true)
        }
        Command::Bundle(opts) => {
            let outcome = cmd_bundle(&BundleArgs {
                scenario_file: opts.scenarios,
                out_dir: opts.out,
                method: match opts.method {
                    MethodOpt::Fcm => BundleMethod::Fcm,
                    MethodOpt::Kmeans => BundleMethod::Kmeans,
                },
                num_bundles: opts.bundles,
                exponent: opts.exponent,
                gamma: opts.gamma,
                eta: opts.eta,
                seed: opts.seed,
            })?;
            println!("{}", outcome.bundle_path.display());
            println!("{}", outcome.csv_path.display());
            println!(
                "bundle sizes: {:?}, repeated scenarios: {}",
                outcome.stats.bundle_sizes, outcome.stats.repeated_scenarios
            );
            Ok(true)
        }
        Command::Solve(opts) => {
            let solution = cmd_solve(&SolveArgs {
                instance_file: opts.instance,
                scenario_file: opts.scenarios,
                bundle_file: opts.bundles,
                extensive: opts.extensive,
                max_extensive_cols: opts.max_extensive_cols,
                rho: opts.rho,
                rho_grid: opts.rho_grid,
                tolerance: opts.tolerance,
                max_seconds: opts.max_seconds,
                max_iterations: opts.max_iterations,
                mip_gap: opts.mip_gap,
                reference_objective: opts.reference,
                trace_file: opts.trace,
                out_dir: opts.out,
            })?;
            println!(
                "method={} objective={:.6} iterations={} seconds={:.2} converged={}",
                solution.method,
                solution.objective,
                solution.iterations,
                solution.seconds,
                solution.converged
            );
            if let Some(diff) = solution.relative_difference_pct {
                println!("relative difference vs reference: {diff:+.4}%");
            }
            Ok(true)
        }
        Command::Experiment(opts) => {
            let mut config: ExperimentConfig = match &opts.config {
                Some(path) => read_json(path)?,
                None => ExperimentConfig::default(),
            };
            if let Some(seed) = opts.seed {
                config.master_seed = seed;
            }
            let report = cmd_experiment(&config, &opts.out)?;
            println!("{}", report.table_path.display());
            for row in &report.rows {
                println!(
                    "{} {} m={} objective={} rel_diff={}% error={}",
                    row.scenario_count,
                    row.method,
                    row.exponent.map(|m| m.to_string()).unwrap_or_else(|| "-".into()),
                    row.objective.map(|o| format!("{o:.4}")).unwrap_or_else(|| "-".into()),
                    row.rel_diff_pct.map(|d| format!("{d:+.3}")).unwrap_or_else(|| "-".into()),
                    row.error.as_deref().unwrap_or("none"),
                );
            }
            Ok(report.all_completed)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SNDH_LOG", "warn")).init();
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
