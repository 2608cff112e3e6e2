//! The gen, bundle and solve pipeline stages, callable as library functions.

use std::fs;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::info;

use sndh_core::bundling::{
    assign_bundles, bundle_probabilities, fcm_fit, kmeans_fit, overlap_stats, BundleSet, FcmConfig,
    OverlapStats,
};
use sndh_core::clock::Clock;
use sndh_core::formulation::build_extensive_form;
use sndh_core::generate::{generate_instance, InstanceParams};
use sndh_core::milp::{solve_milp, MilpOptions, Status};
use sndh_core::network::Instance;
use sndh_core::pha::{penalty_sweep, pha_run, PhaConfig, PhaResult};
use sndh_core::scenarios::{generate_scenario_set, ScenarioSet};

use crate::clock::WallClock;
use crate::derive_seed;
use crate::formats::{
    read_json, relative_difference_pct, write_json, BundleFile, BundleParams, InstanceFile,
    ScenarioFile, SolutionFile,
};

/// Demand distribution used by every generated scenario set.
pub const DEMAND_LO: f64 = 5.0;
pub const DEMAND_HI: f64 = 11.0;
pub const DEMAND_MODE: f64 = 8.0;

#[derive(Debug, Clone)]
pub struct GenArgs {
    pub out_dir: PathBuf,
    pub seed: u64,
    pub terminals: usize,
    pub horizon: usize,
    pub commodities: usize,
    pub capacity: f64,
    pub outsourcing_cost: f64,
    pub scenario_counts: Vec<usize>,
    pub moment_correct: bool,
}

impl Default for GenArgs {
    /// The benchmark network: 12 terminals, 5 periods, 6 commodities,
    /// capacity 12, outsourcing cost 80.
    fn default() -> Self {
        GenArgs {
            out_dir: PathBuf::from("."),
            seed: 1,
            terminals: 12,
            horizon: 5,
            commodities: 6,
            capacity: 12.0,
            outsourcing_cost: 80.0,
            scenario_counts: vec![48, 72, 96, 120, 150],
            moment_correct: false,
        }
    }
}

/// Writes `instance.json` plus one `scenarios_<n>.json` per requested count.
/// Returns the written paths (instance first).
pub fn cmd_gen(args: &GenArgs) -> Result<Vec<PathBuf>> {
    let params = InstanceParams {
        num_terminals: args.terminals,
        horizon: args.horizon,
        num_commodities: args.commodities,
        capacity: args.capacity,
        outsourcing_cost: args.outsourcing_cost,
        ..InstanceParams::default()
    };
    let inst = generate_instance(&params, derive_seed(args.seed, 0))
        .map_err(|e| anyhow::anyhow!("instance generation failed: {e}"))?;
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let instance_path = args.out_dir.join("instance.json");
    write_json(&instance_path, &InstanceFile::from_instance(&inst))?;
    let mut written = vec![instance_path];

    for (i, &count) in args.scenario_counts.iter().enumerate() {
        let seed = derive_seed(args.seed, 1 + i as u64);
        let set = generate_scenario_set(
            &inst,
            count,
            DEMAND_LO,
            DEMAND_HI,
            DEMAND_MODE,
            seed,
            args.moment_correct,
        )
        .map_err(|e| anyhow::anyhow!("scenario generation failed: {e}"))?;
        let path = args.out_dir.join(format!("scenarios_{count}.json"));
        write_json(&path, &ScenarioFile::from_set(&set))?;
        written.push(path);
    }
    info!("generated {} files in {}", written.len(), args.out_dir.display());
    Ok(written)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BundleMethod {
    Fcm,
    Kmeans,
}

#[derive(Debug, Clone)]
pub struct BundleArgs {
    pub scenario_file: PathBuf,
    pub out_dir: PathBuf,
    pub method: BundleMethod,
    pub num_bundles: usize,
    pub exponent: f64,
    pub gamma: f64,
    pub eta: f64,
    pub seed: u64,
}

/// Result of one bundling run, kept for the experiment driver.
pub struct BundleOutcome {
    pub bundle_set: BundleSet,
    pub stats: OverlapStats,
    pub bundle_path: PathBuf,
    pub csv_path: PathBuf,
}

/// Runs the requested bundling on a scenario file and writes the bundle JSON
/// plus an overlap-statistics CSV next to it.
pub fn cmd_bundle(args: &BundleArgs) -> Result<BundleOutcome> {
    let scens: ScenarioSet = read_json::<ScenarioFile>(&args.scenario_file)?.into_set()?;
    if args.num_bundles > scens.len() {
        bail!("requested {} bundles from {} scenarios", args.num_bundles, scens.len());
    }
    let (bundle_set, file) = bundle_scenarios(&scens, args)?;
    let stats = overlap_stats(&bundle_set);

    fs::create_dir_all(&args.out_dir)?;
    let stem = match args.method {
        BundleMethod::Fcm => format!("bundles_fcm_m{}", args.exponent),
        BundleMethod::Kmeans => "bundles_kmeans".to_string(),
    };
    let bundle_path = args.out_dir.join(format!("{stem}.json"));
    write_json(&bundle_path, &file)?;
    let csv_path = args.out_dir.join(format!("{stem}_overlap.csv"));
    fs::write(&csv_path, overlap_csv(&stats))?;
    Ok(BundleOutcome { bundle_set, stats, bundle_path, csv_path })
}

/// In-memory bundling shared by `cmd_bundle` and the experiment driver.
pub fn bundle_scenarios(scens: &ScenarioSet, args: &BundleArgs) -> Result<(BundleSet, BundleFile)> {
    match args.method {
        BundleMethod::Fcm => {
            let cfg = FcmConfig {
                score_threshold: args.gamma,
                interval_param: args.eta,
                ..FcmConfig::new(args.num_bundles, args.exponent, args.seed)
            };
            let partition =
                fcm_fit(scens, &cfg).map_err(|e| anyhow::anyhow!("fuzzy c-means failed: {e}"))?;
            let bundles = assign_bundles(&partition, &cfg);
            let set = bundle_probabilities(bundles, scens)
                .map_err(|e| anyhow::anyhow!("bundle probabilities failed: {e}"))?;
            let file = BundleFile::from_bundle_set(
                &set,
                "fcm",
                BundleParams::from_fcm(&cfg),
                Some(partition.membership.clone()),
            );
            Ok((set, file))
        }
        BundleMethod::Kmeans => {
            let set = kmeans_fit(scens, args.num_bundles, args.seed)
                .map_err(|e| anyhow::anyhow!("k-means failed: {e}"))?;
            let params = BundleParams {
                num_bundles: args.num_bundles,
                seed: args.seed,
                exponent: None,
                score_threshold: None,
                interval_param: None,
            };
            let file = BundleFile::from_bundle_set(&set, "kmeans", params, None);
            Ok((set, file))
        }
    }
}

/// Bundle sizes, the repeated-scenario count, and the per-scenario
/// occurrence histogram as one CSV.
pub fn overlap_csv(stats: &OverlapStats) -> String {
    let mut out = String::from("record,key,value\n");
    for (b, size) in stats.bundle_sizes.iter().enumerate() {
        let _ = writeln!(out, "bundle_size,{b},{size}");
    }
    let _ = writeln!(out, "repeated_scenarios,,{}", stats.repeated_scenarios);
    for (s, occ) in stats.occurrences.iter().enumerate() {
        let _ = writeln!(out, "occurrences,{s},{occ}");
    }
    out
}

#[derive(Debug, Clone)]
pub struct SolveArgs {
    pub instance_file: PathBuf,
    pub scenario_file: PathBuf,
    /// Required unless `extensive` is set.
    pub bundle_file: Option<PathBuf>,
    pub extensive: bool,
    /// Column-count guard for the extensive form.
    pub max_extensive_cols: usize,
    pub rho: f64,
    pub rho_grid: Option<Vec<f64>>,
    pub tolerance: f64,
    pub max_seconds: f64,
    pub max_iterations: usize,
    pub mip_gap: f64,
    pub reference_objective: Option<f64>,
    pub trace_file: Option<PathBuf>,
    pub out_dir: PathBuf,
}

impl Default for SolveArgs {
    fn default() -> Self {
        SolveArgs {
            instance_file: PathBuf::from("instance.json"),
            scenario_file: PathBuf::from("scenarios_48.json"),
            bundle_file: None,
            extensive: false,
            max_extensive_cols: 100_000,
            rho: 1.5,
            rho_grid: None,
            tolerance: 1e-5,
            max_seconds: 10_800.0,
            max_iterations: 200,
            mip_gap: 0.05,
            reference_objective: None,
            trace_file: None,
            out_dir: PathBuf::from("."),
        }
    }
}

/// Solves the instance either exactly (extensive form) or with the
/// progressive hedging heuristic, and writes `solution.json`.
pub fn cmd_solve(args: &SolveArgs) -> Result<SolutionFile> {
    let inst: Instance = read_json::<InstanceFile>(&args.instance_file)?.into_instance()?;
    let scens: ScenarioSet = read_json::<ScenarioFile>(&args.scenario_file)?.into_set()?;
    if scens.num_commodities() != inst.num_commodities() {
        bail!("scenario file and instance disagree on the commodity count");
    }

    let clock = WallClock::new();
    let mut solution = if args.extensive {
        solve_extensive(&inst, &scens, args, &clock)?
    } else {
        let Some(bundle_file) = &args.bundle_file else {
            bail!("PHA mode needs a bundle file (or pass --extensive)");
        };
        let bundles = read_json::<BundleFile>(bundle_file)?.into_bundle_set(&scens)?;
        let result = run_pha(&inst, &scens, &bundles, args, &clock)?;
        if let Some(path) = &args.trace_file {
            fs::write(path, trace_csv(&result))?;
        }
        SolutionFile {
            design: result.design.iter().map(|&x| if x > 0.5 { 1 } else { 0 }).collect(),
            objective: result.objective,
            iterations: result.iterations,
            seconds: result.seconds,
            converged: result.converged,
            residual: result.residual,
            method: "pha".to_string(),
            penalty: Some(result.penalty),
            relative_difference_pct: None,
        }
    };

    if let Some(reference) = args.reference_objective {
        solution.relative_difference_pct =
            Some(relative_difference_pct(solution.objective, reference));
    }
    fs::create_dir_all(&args.out_dir)?;
    write_json(&args.out_dir.join("solution.json"), &solution)?;
    Ok(solution)
}

pub(crate) fn run_pha(
    inst: &Instance,
    scens: &ScenarioSet,
    bundles: &BundleSet,
    args: &SolveArgs,
    clock: &dyn Clock,
) -> Result<PhaResult> {
    let cfg = PhaConfig {
        tolerance: args.tolerance,
        max_seconds: args.max_seconds,
        max_iterations: args.max_iterations,
        subproblem_gap: args.mip_gap,
        ..PhaConfig::new(args.rho)
    };
    let result = match &args.rho_grid {
        Some(grid) => penalty_sweep(inst, scens, bundles, grid, &cfg, clock),
        None => pha_run(inst, scens, bundles, &cfg, clock),
    };
    result.map_err(|e| anyhow::anyhow!("progressive hedging failed: {e}"))
}

fn solve_extensive(
    inst: &Instance,
    scens: &ScenarioSet,
    args: &SolveArgs,
    clock: &WallClock,
) -> Result<SolutionFile> {
    let (lp, _index) = build_extensive_form(inst, scens)
        .map_err(|e| anyhow::anyhow!("extensive form build failed: {e}"))?;
    if lp.num_vars() > args.max_extensive_cols {
        bail!(
            "extensive form has {} columns, above the {}-column guard",
            lp.num_vars(),
            args.max_extensive_cols
        );
    }
    let options = MilpOptions {
        rel_gap: args.mip_gap,
        node_limit: 10_000_000,
        time_limit: args.max_seconds,
    };
    let sol = solve_milp(&lp, &options, clock)
        .map_err(|e| anyhow::anyhow!("extensive solve failed: {e}"))?;
    match sol.status {
        Status::Optimal | Status::GapReached => {}
        Status::LimitReached if !sol.primal.is_empty() => {}
        other => bail!("extensive solve ended without a solution: {other:?}"),
    }
    let design: Vec<u8> =
        sol.primal[..inst.num_arcs()].iter().map(|&x| if x > 0.5 { 1 } else { 0 }).collect();
    Ok(SolutionFile {
        design,
        objective: sol.objective,
        iterations: sol.nodes_explored,
        seconds: clock.elapsed(),
        converged: sol.status != Status::LimitReached,
        residual: 0.0,
        method: "extensive".to_string(),
        penalty: None,
        relative_difference_pct: None,
    })
}

/// Per-iteration trace of a hedging run as CSV.
pub fn trace_csv(result: &PhaResult) -> String {
    let mut out = String::from("iteration,residual,objective_estimate,seconds\n");
    for record in &result.history {
        let _ = writeln!(
            out,
            "{},{},{},{:.6}",
            record.iteration, record.residual, record.objective_estimate, record.seconds
        );
    }
    out
}

/// Convenience used by tests: load the three files of a PHA run.
pub fn load_problem(
    instance_file: &Path,
    scenario_file: &Path,
) -> Result<(Instance, ScenarioSet)> {
    let inst = read_json::<InstanceFile>(instance_file)?.into_instance()?;
    let scens = read_json::<ScenarioFile>(scenario_file)?.into_set()?;
    Ok((inst, scens))
}
