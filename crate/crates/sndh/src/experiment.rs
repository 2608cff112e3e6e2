//! End-to-end experiment driver: for each scenario count, bundle with
//! k-means and with fuzzy c-means across an exponent grid, solve each
//! bundling with progressive hedging, and emit a results table with the
//! k-means row as the reference for relative differences.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use log::{info, warn};
use serde::{Deserialize, Serialize};

use sndh_core::clock::Clock;
use sndh_core::generate::{generate_instance, InstanceParams};
use sndh_core::network::Instance;
use sndh_core::scenarios::{generate_scenario_set, ScenarioSet};

use crate::clock::WallClock;
use crate::commands::{
    bundle_scenarios, overlap_csv, run_pha, BundleArgs, BundleMethod, SolveArgs, DEMAND_HI,
    DEMAND_LO, DEMAND_MODE,
};
use crate::derive_seed;
use crate::formats::{read_json, relative_difference_pct, write_json, InstanceFile, ScenarioFile};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    /// Optional pre-built instance file; otherwise one is generated from the
    /// size fields below.
    pub instance: Option<PathBuf>,
    pub terminals: usize,
    pub horizon: usize,
    pub commodities: usize,
    pub capacity: f64,
    pub outsourcing_cost: f64,
    pub scenario_counts: Vec<usize>,
    pub num_bundles: usize,
    /// Fuzzy exponent grid; k-means always runs as the baseline.
    pub exponents: Vec<f64>,
    pub gamma: f64,
    pub eta: f64,
    pub rho: f64,
    pub rho_grid: Option<Vec<f64>>,
    pub tolerance: f64,
    pub max_seconds_per_solve: f64,
    pub max_iterations: usize,
    pub mip_gap: f64,
    pub master_seed: u64,
    pub moment_correct: bool,
}

impl Default for ExperimentConfig {
    /// Desk-scale defaults: a 6-terminal, 4-period network with 48 scenarios
    /// in 5 bundles, the benchmark thresholds, and a moderate penalty.
    fn default() -> Self {
        ExperimentConfig {
            instance: None,
            terminals: 6,
            horizon: 4,
            commodities: 6,
            capacity: 12.0,
            outsourcing_cost: 80.0,
            scenario_counts: vec![48],
            num_bundles: 5,
            exponents: vec![1.5, 1.85, 2.0],
            gamma: 0.8,
            eta: 0.95,
            rho: 1.5,
            rho_grid: None,
            tolerance: 1e-5,
            max_seconds_per_solve: 180.0,
            max_iterations: 60,
            mip_gap: 0.05,
            master_seed: 2024,
            moment_correct: false,
        }
    }
}

/// One row of the results table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellResult {
    pub scenario_count: usize,
    /// `"kmeans"` or `"fcm"`.
    pub method: String,
    pub exponent: Option<f64>,
    pub objective: Option<f64>,
    /// Relative difference versus the k-means row, percent.
    pub rel_diff_pct: Option<f64>,
    pub iterations: Option<usize>,
    pub pha_seconds: Option<f64>,
    pub bundle_seconds: Option<f64>,
    pub converged: Option<bool>,
    pub repeated_scenarios: Option<usize>,
    pub sum_bundle_sizes: Option<usize>,
    pub error: Option<String>,
}

pub struct ExperimentReport {
    pub rows: Vec<CellResult>,
    pub table_path: PathBuf,
    /// True when every cell completed (converged or flagged as a timeout).
    pub all_completed: bool,
}

fn load_or_generate_instance(cfg: &ExperimentConfig) -> Result<Instance> {
    if let Some(path) = &cfg.instance {
        return read_json::<InstanceFile>(path)?.into_instance();
    }
    let params = InstanceParams {
        num_terminals: cfg.terminals,
        horizon: cfg.horizon,
        num_commodities: cfg.commodities,
        capacity: cfg.capacity,
        outsourcing_cost: cfg.outsourcing_cost,
        ..InstanceParams::default()
    };
    generate_instance(&params, derive_seed(cfg.master_seed, 0))
        .map_err(|e| anyhow::anyhow!("instance generation failed: {e}"))
}

fn run_cell(
    inst: &Instance,
    scens: &ScenarioSet,
    cfg: &ExperimentConfig,
    cell_dir: &Path,
    method: BundleMethod,
    exponent: f64,
    bundle_seed: u64,
) -> Result<CellResult> {
    let scenario_count = scens.len();
    let bundle_args = BundleArgs {
        scenario_file: PathBuf::new(), // bundling runs in memory here
        out_dir: cell_dir.to_path_buf(),
        method,
        num_bundles: cfg.num_bundles,
        exponent,
        gamma: cfg.gamma,
        eta: cfg.eta,
        seed: bundle_seed,
    };

    let bundle_clock = WallClock::new();
    let (bundle_set, bundle_file) = bundle_scenarios(scens, &bundle_args)?;
    let bundle_seconds = bundle_clock.elapsed();
    let stats = sndh_core::bundling::overlap_stats(&bundle_set);

    fs::create_dir_all(cell_dir)?;
    write_json(&cell_dir.join("bundles.json"), &bundle_file)?;
    fs::write(cell_dir.join("overlap.csv"), overlap_csv(&stats))?;

    let solve_args = SolveArgs {
        rho: cfg.rho,
        rho_grid: cfg.rho_grid.clone(),
        tolerance: cfg.tolerance,
        max_seconds: cfg.max_seconds_per_solve,
        max_iterations: cfg.max_iterations,
        mip_gap: cfg.mip_gap,
        ..SolveArgs::default()
    };
    let clock = WallClock::new();
    let result = run_pha(inst, scens, &bundle_set, &solve_args, &clock)?;

    let (method_name, exp) = match method {
        BundleMethod::Fcm => ("fcm", Some(exponent)),
        BundleMethod::Kmeans => ("kmeans", None),
    };
    Ok(CellResult {
        scenario_count,
        method: method_name.to_string(),
        exponent: exp,
        objective: Some(result.objective),
        rel_diff_pct: None, // filled against the k-means row by the caller
        iterations: Some(result.iterations),
        pha_seconds: Some(result.seconds),
        bundle_seconds: Some(bundle_seconds),
        converged: Some(result.converged),
        repeated_scenarios: Some(stats.repeated_scenarios),
        sum_bundle_sizes: Some(stats.bundle_sizes.iter().sum()),
        error: None,
    })
}

fn failed_cell(
    scenario_count: usize,
    method: &str,
    exponent: Option<f64>,
    error: &anyhow::Error,
) -> CellResult {
    CellResult {
        scenario_count,
        method: method.to_string(),
        exponent,
        objective: None,
        rel_diff_pct: None,
        iterations: None,
        pha_seconds: None,
        bundle_seconds: None,
        converged: None,
        repeated_scenarios: None,
        sum_bundle_sizes: None,
        error: Some(format!("{error:#}")),
    }
}

/// Runs the whole grid and writes `table.csv` (plus per-cell artifacts)
/// under `out_dir`.
pub fn cmd_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentReport> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let inst = load_or_generate_instance(cfg)?;
    write_json(&out_dir.join("instance.json"), &InstanceFile::from_instance(&inst))?;

    let mut rows: Vec<CellResult> = Vec::new();
    for (i, &count) in cfg.scenario_counts.iter().enumerate() {
        let scen_seed = derive_seed(cfg.master_seed, 1000 + i as u64);
        let scens = match generate_scenario_set(
            &inst,
            count,
            DEMAND_LO,
            DEMAND_HI,
            DEMAND_MODE,
            scen_seed,
            cfg.moment_correct,
        ) {
            Ok(s) => s,
            Err(e) => {
                let err = anyhow::anyhow!("scenario generation failed: {e}");
                warn!("{err:#}");
                rows.push(failed_cell(count, "kmeans", None, &err));
                for &m in &cfg.exponents {
                    rows.push(failed_cell(count, "fcm", Some(m), &err));
                }
                continue;
            }
        };
        write_json(&out_dir.join(format!("scenarios_{count}.json")), &ScenarioFile::from_set(&scens))?;
        let bundle_seed = derive_seed(cfg.master_seed, 2000 + count as u64);

        // k-means baseline first: its objective anchors Eq-20 comparisons
        let kmeans_dir = out_dir.join(format!("cells/{count}_kmeans"));
        let mut kmeans_row =
            match run_cell(&inst, &scens, cfg, &kmeans_dir, BundleMethod::Kmeans, 0.0, bundle_seed)
            {
                Ok(row) => row,
                Err(e) => {
                    warn!("k-means cell failed: {e:#}");
                    failed_cell(count, "kmeans", None, &e)
                }
            };
        let reference = kmeans_row.objective;
        kmeans_row.rel_diff_pct = reference.map(|_| 0.0);
        info!(
            "cell {count}/kmeans: objective {:?} in {:?} iterations",
            kmeans_row.objective, kmeans_row.iterations
        );
        rows.push(kmeans_row);

        for &m in &cfg.exponents {
            let cell_dir = out_dir.join(format!("cells/{count}_fcm_m{m}"));
            let row = match run_cell(&inst, &scens, cfg, &cell_dir, BundleMethod::Fcm, m, bundle_seed)
            {
                Ok(mut row) => {
                    row.rel_diff_pct = match (row.objective, reference) {
                        (Some(obj), Some(reference)) => {
                            Some(relative_difference_pct(obj, reference))
                        }
                        _ => None,
                    };
                    row
                }
                Err(e) => {
                    warn!("fcm m={m} cell failed: {e:#}");
                    failed_cell(count, "fcm", Some(m), &e)
                }
            };
            info!("cell {count}/fcm m={m}: objective {:?}", row.objective);
            rows.push(row);
        }
    }

    let table_path = out_dir.join("table.csv");
    fs::write(&table_path, results_csv(&rows))?;
    let all_completed = rows.iter().all(|r| r.error.is_none());
    Ok(ExperimentReport { rows, table_path, all_completed })
}

fn fmt_opt<T: std::fmt::Display>(value: &Option<T>) -> String {
    value.as_ref().map(|v| v.to_string()).unwrap_or_default()
}

/// The results table: method and exponent, objective, relative difference
/// versus k-means, iteration count, timings, and overlap statistics.
pub fn results_csv(rows: &[CellResult]) -> String {
    let mut out = String::from(
        "scenarios,method,m,objective,rel_diff_pct,iterations,pha_seconds,bundle_seconds,converged,repeated_scenarios,sum_bundle_sizes,error\n",
    );
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            row.scenario_count,
            row.method,
            fmt_opt(&row.exponent),
            fmt_opt(&row.objective),
            fmt_opt(&row.rel_diff_pct),
            fmt_opt(&row.iterations),
            fmt_opt(&row.pha_seconds),
            fmt_opt(&row.bundle_seconds),
            fmt_opt(&row.converged),
            fmt_opt(&row.repeated_scenarios),
            fmt_opt(&row.sum_bundle_sizes),
            row.error.as_deref().unwrap_or_default().replace(',', ";"),
        );
    }
    out
}
