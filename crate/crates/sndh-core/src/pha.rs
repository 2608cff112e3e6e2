//! Bundle-decomposed progressive hedging.
//!
//! Iteration 0 solves every bundle subproblem without dual or proximal terms.
//! Each following iteration rebuilds the subproblems with the current duals,
//! consensus and penalty, solves them, aggregates the bundle designs into an
//! implementable consensus, and takes a dual step. The loop stops when the
//! largest disagreement between any bundle design and the consensus falls
//! below the tolerance, or when the iteration or wall-clock budget runs out.
//!
//! Returned designs are always priced independently: fixed design cost plus
//! the probability-weighted recourse LP value over the *full* scenario set.

use alloc::vec;
use alloc::vec::Vec;

use crate::bundling::BundleSet;
use crate::clock::Clock;
use crate::error::{Error, Result};
use crate::formulation::{
    build_bundle_lp, build_bundle_subproblem, build_bundle_subproblem_relaxed, build_recourse_lp,
    design_cost, SubproblemSpec,
};
use crate::math;
use crate::milp::{solve_lp, solve_milp, LinearProgram, MilpOptions, Solution};
use crate::network::Instance;
use crate::scenarios::ScenarioSet;

/// Controls for one progressive hedging run.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaConfig {
    /// Penalty factor `rho` of the augmented Lagrangian, strictly positive.
    pub penalty: f64,
    /// Consensus tolerance on `max |x_b - consensus|`.
    pub tolerance: f64,
    /// Wall-clock budget in seconds for the whole run.
    pub max_seconds: f64,
    /// Iteration cap, counting iteration 0.
    pub max_iterations: usize,
    /// Relative MIP gap handed to every bundle subproblem solve.
    pub subproblem_gap: f64,
    /// Node cap per subproblem solve (safety valve).
    pub subproblem_nodes: usize,
    /// Solve the relaxation instead: binaries become continuous and the
    /// returned design is the fractional consensus.
    pub relax_binaries: bool,
}

impl PhaConfig {
    pub fn new(penalty: f64) -> PhaConfig {
        PhaConfig {
            penalty,
            tolerance: 1e-5,
            max_seconds: f64::INFINITY,
            max_iterations: 200,
            subproblem_gap: 0.05,
            subproblem_nodes: 500_000,
            relax_binaries: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.penalty > 0.0) {
            return Err(Error::InvalidArgument("penalty factor must be positive"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive"));
        }
        if !(self.subproblem_gap >= 0.0) {
            return Err(Error::InvalidArgument("subproblem gap must be nonnegative"));
        }
        Ok(())
    }
}

/// One row of the iteration trace.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// `max_b max_arc |x_b - consensus|` after aggregation.
    pub residual: f64,
    /// Sum of the bundle subproblem objectives (a progress estimate, not the
    /// true objective).
    pub objective_estimate: f64,
    /// Wall seconds since the run started.
    pub seconds: f64,
}

/// Final synchronized state of the hedging loop.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaState {
    pub per_bundle_design: Vec<Vec<f64>>,
    pub consensus: Vec<f64>,
    pub duals: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaResult {
    /// The returned first-stage design: 0/1, or the fractional consensus in
    /// relaxed mode.
    pub design: Vec<f64>,
    /// True objective of `design`: fixed cost plus expected outsourcing cost,
    /// recomputed from per-scenario recourse LPs.
    pub objective: f64,
    /// Iterations performed, counting iteration 0.
    pub iterations: usize,
    pub converged: bool,
    /// Final consensus residual.
    pub residual: f64,
    pub seconds: f64,
    pub history: Vec<IterationRecord>,
    pub state: PhaState,
    /// Penalty factor the run used (echoed for sweep reporting).
    pub penalty: f64,
}

/// Probability-weighted aggregation of the bundle designs (the
/// implementable solution).
pub fn aggregate(per_bundle_design: &[Vec<f64>], bundle_probs: &[f64]) -> Result<Vec<f64>> {
    if per_bundle_design.len() != bundle_probs.len() || per_bundle_design.is_empty() {
        return Err(Error::InvalidArgument("designs and probabilities must align"));
    }
    let dim = per_bundle_design[0].len();
    if per_bundle_design.iter().any(|d| d.len() != dim) {
        return Err(Error::InvalidArgument("bundle designs have mixed lengths"));
    }
    let mut consensus = vec![0.0; dim];
    for (design, &p) in per_bundle_design.iter().zip(bundle_probs) {
        for (c, x) in consensus.iter_mut().zip(design) {
            *c += p * x;
        }
    }
    Ok(consensus)
}

/// One dual step: `w + rho (x - consensus)`, elementwise.
pub fn dual_update(w_prev: &[f64], design: &[f64], consensus: &[f64], rho: f64) -> Vec<f64> {
    assert!(rho > 0.0, "penalty factor must be positive");
    w_prev
        .iter()
        .zip(design)
        .zip(consensus)
        .map(|((w, x), c)| w + rho * (x - c))
        .collect()
}

/// Fixed cost plus expected outsourcing cost of a (possibly fractional)
/// design, priced by one recourse LP per scenario.
pub fn evaluate_design(inst: &Instance, scens: &ScenarioSet, design: &[f64]) -> Result<f64> {
    let mut expected = 0.0;
    for s in &scens.scenarios {
        let lp = build_recourse_lp(inst, design, &s.demand)?;
        let sol = solve_lp(&lp)?;
        if !sol.is_feasible() {
            return Err(Error::Internal("recourse LP must always be feasible"));
        }
        expected += s.probability * sol.objective;
    }
    Ok(design_cost(inst, design) + inst.outsourcing_cost * expected)
}

fn solve_subproblem(
    lp: &LinearProgram,
    cfg: &PhaConfig,
    remaining: f64,
    clock: &dyn Clock,
) -> Result<Option<Solution>> {
    let sol = if cfg.relax_binaries {
        if lp.num_binary() > 0 {
            solve_lp(&lp.relaxed())?
        } else {
            solve_lp(lp)?
        }
    } else {
        solve_milp(
            lp,
            &MilpOptions {
                rel_gap: cfg.subproblem_gap,
                node_limit: cfg.subproblem_nodes,
                time_limit: remaining,
            },
            clock,
        )?
    };
    if sol.is_feasible() {
        Ok(Some(sol))
    } else if sol.status == crate::milp::Status::LimitReached {
        Ok(None) // budget ran out before any incumbent
    } else {
        Err(Error::Internal("bundle subproblem must be feasible (outsourcing exists)"))
    }
}

/// Runs progressive hedging on the given bundles.
pub fn pha_run(
    inst: &Instance,
    scens: &ScenarioSet,
    bundles: &BundleSet,
    cfg: &PhaConfig,
    clock: &dyn Clock,
) -> Result<PhaResult> {
    cfg.validate()?;
    inst.validate()?;
    scens.validate()?;
    if bundles.num_bundles() == 0 {
        return Err(Error::InvalidArgument("need at least one bundle"));
    }
    if bundles.num_scenarios() != scens.len() {
        return Err(Error::InvalidArgument("bundle set and scenario set disagree"));
    }
    let prob_total: f64 = bundles.bundle_prob.iter().sum();
    if (prob_total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument("bundle probabilities must sum to 1"));
    }

    let start = clock.elapsed();
    let num_bundles = bundles.num_bundles();
    let dim = inst.num_arcs();
    let mut duals = vec![vec![0.0; dim]; num_bundles];
    let mut designs = vec![vec![0.0; dim]; num_bundles];
    let mut consensus = vec![0.0; dim];
    let mut history: Vec<IterationRecord> = Vec::new();
    let mut converged = false;
    let mut residual = f64::INFINITY;
    let mut budget_exhausted = false;

    let member_probs: Vec<Vec<f64>> = bundles
        .bundles
        .iter()
        .map(|members| members.iter().map(|&s| bundles.reweighted_prob[s]).collect())
        .collect();

    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        let r = iterations;
        let mut objective_estimate = 0.0;
        for b in 0..num_bundles {
            let remaining = cfg.max_seconds - (clock.elapsed() - start);
            if remaining <= 0.0 {
                budget_exhausted = true;
                break;
            }
            let (lp, _) = if r == 0 {
                build_bundle_lp(
                    inst,
                    scens,
                    &bundles.bundles[b],
                    &member_probs[b],
                    bundles.bundle_prob[b],
                )?
            } else {
                let spec = SubproblemSpec {
                    members: bundles.bundles[b].clone(),
                    reweighted_prob: member_probs[b].clone(),
                    bundle_prob: bundles.bundle_prob[b],
                    duals: duals[b].clone(),
                    consensus: consensus.clone(),
                    penalty: cfg.penalty,
                };
                if cfg.relax_binaries {
                    // the binary shortcut in the proximal term is exact only
                    // on 0/1 points; the relaxation keeps it quadratic
                    build_bundle_subproblem_relaxed(inst, &spec, scens, 1e-6)?
                } else {
                    build_bundle_subproblem(inst, &spec, scens)?
                }
            };
            match solve_subproblem(&lp, cfg, remaining, clock)? {
                Some(sol) => {
                    designs[b].copy_from_slice(&sol.primal[..dim]);
                    objective_estimate += sol.objective;
                }
                None => {
                    budget_exhausted = true;
                    break;
                }
            }
        }
        if budget_exhausted {
            break;
        }
        iterations += 1;

        consensus = aggregate(&designs, &bundles.bundle_prob)?;
        for b in 0..num_bundles {
            duals[b] = dual_update(&duals[b], &designs[b], &consensus, cfg.penalty);
        }
        debug_assert!(
            {
                let mut drift = 0.0_f64;
                for a in 0..dim {
                    let total: f64 =
                        (0..num_bundles).map(|b| bundles.bundle_prob[b] * duals[b][a]).sum();
                    drift = drift.max(total.abs());
                }
                drift < 1e-9
            },
            "probability-weighted duals must stay centered"
        );

        residual = designs
            .iter()
            .map(|d| {
                d.iter()
                    .zip(&consensus)
                    .map(|(x, c)| (x - c).abs())
                    .fold(0.0_f64, f64::max)
            })
            .fold(0.0_f64, f64::max);
        history.push(IterationRecord {
            iteration: r,
            residual,
            objective_estimate,
            seconds: clock.elapsed() - start,
        });

        if residual < cfg.tolerance {
            converged = true;
            break;
        }
        if clock.elapsed() - start > cfg.max_seconds {
            budget_exhausted = true;
            break;
        }
    }
    let _ = budget_exhausted;

    // extract the reported design
    let design = if cfg.relax_binaries {
        consensus.clone()
    } else {
        let mut rounded: Vec<f64> =
            consensus.iter().map(|&x| if x > 0.5 { 1.0 } else { 0.0 }).collect();
        if !converged {
            repair_design_balance(inst, &mut rounded)?;
        }
        rounded
    };
    let objective = evaluate_design(inst, scens, &design)?;

    Ok(PhaResult {
        design,
        objective,
        iterations,
        converged,
        residual,
        seconds: clock.elapsed() - start,
        history,
        state: PhaState { per_bundle_design: designs, consensus, duals },
        penalty: cfg.penalty,
    })
}

/// Makes a rounded design satisfy the design-balance equations by walking
/// each surplus of arriving vehicles forward in time over the cheapest
/// closed arcs until it reaches a node short of arrivals.
fn repair_design_balance(inst: &Instance, design: &mut [f64]) -> Result<()> {
    let n = inst.num_terminals;
    let horizon = inst.horizon;
    let imbalance = |design: &[f64], i: usize, t: usize| -> i64 {
        let t_next = (t + 1) % horizon;
        let inflow: f64 = (0..n).map(|j| design[inst.arc_index(j, i, t)]).sum();
        let outflow: f64 = (0..n).map(|j| design[inst.arc_index(i, j, t_next)]).sum();
        math::round(inflow - outflow) as i64
    };

    let mut guard = 0usize;
    loop {
        guard += 1;
        if guard > inst.num_arcs() + 4 * n * horizon {
            return Err(Error::Internal("design repair failed to terminate"));
        }
        let mut surplus = None;
        'scan: for i in 0..n {
            for t in 0..horizon {
                if imbalance(design, i, t) > 0 {
                    surplus = Some((i, t));
                    break 'scan;
                }
            }
        }
        let Some((mut i, mut t)) = surplus else {
            return Ok(());
        };

        // walk the extra vehicle forward until a deficit node absorbs it
        for _ in 0..inst.num_arcs() {
            let t_next = (t + 1) % horizon;
            let closed_arcs = (0..n)
                .filter(|&j| design[inst.arc_index(i, j, t_next)] < 0.5)
                .collect::<Vec<_>>();
            if closed_arcs.is_empty() {
                return Err(Error::Internal("surplus node has no closed outgoing arc"));
            }
            let pick_cheapest = |js: &[usize]| -> usize {
                *js.iter()
                    .min_by(|&&a, &&b| {
                        inst.cost(i, a).total_cmp(&inst.cost(i, b)).then(a.cmp(&b))
                    })
                    .unwrap()
            };
            let deficit: Vec<usize> = closed_arcs
                .iter()
                .copied()
                .filter(|&j| imbalance(design, j, t_next) < 0)
                .collect();
            if !deficit.is_empty() {
                let j = pick_cheapest(&deficit);
                design[inst.arc_index(i, j, t_next)] = 1.0;
                break;
            }
            let j = pick_cheapest(&closed_arcs);
            design[inst.arc_index(i, j, t_next)] = 1.0;
            i = j;
            t = t_next;
        }
    }
}

/// Runs [`pha_run`] once per distinct penalty value and keeps the best run:
/// lowest true objective, then fewest iterations, then smallest penalty.
pub fn penalty_sweep(
    inst: &Instance,
    scens: &ScenarioSet,
    bundles: &BundleSet,
    grid: &[f64],
    base: &PhaConfig,
    clock: &dyn Clock,
) -> Result<PhaResult> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("penalty grid is empty"));
    }
    let mut values: Vec<f64> = grid.to_vec();
    values.sort_by(f64::total_cmp);
    values.dedup();

    let mut best: Option<PhaResult> = None;
    for &rho in &values {
        let cfg = PhaConfig { penalty: rho, ..base.clone() };
        let run = pha_run(inst, scens, bundles, &cfg, clock)?;
        let better = match &best {
            None => true,
            Some(cur) => {
                let diff = run.objective - cur.objective;
                diff < -1e-9
                    || (diff.abs() <= 1e-9
                        && (run.iterations < cur.iterations
                            || (run.iterations == cur.iterations && run.penalty < cur.penalty)))
            }
        };
        if better {
            best = Some(run);
        }
    }
    Ok(best.expect("grid was nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundling::bundle_probabilities;
    use crate::clock::NoClock;
    use crate::network::Commodity;
    use crate::scenarios::Scenario;

    fn tiny_instance() -> Instance {
        Instance {
            num_terminals: 2,
            horizon: 2,
            commodities: vec![Commodity {
                id: 0,
                origin: 0,
                avail_period: 0,
                destination: 1,
                deadline: 1,
            }],
            arc_cost: vec![1.0, 5.0, 5.0, 1.0],
            capacity: 12.0,
            outsourcing_cost: 80.0,
        }
    }

    fn set_with(demands: &[f64]) -> ScenarioSet {
        let p = 1.0 / demands.len() as f64;
        ScenarioSet {
            scenarios: demands
                .iter()
                .map(|&d| Scenario { demand: vec![d], probability: p })
                .collect(),
            seed: 0,
        }
    }

    #[test]
    fn aggregate_examples() {
        let half = aggregate(&[vec![1.0], vec![0.0]], &[0.5, 0.5]).unwrap();
        assert_eq!(half, vec![0.5]);
        let same = aggregate(&[vec![0.7], vec![0.7]], &[0.3, 0.7]).unwrap();
        assert!((same[0] - 0.7).abs() < 1e-12);
        let weighted = aggregate(&[vec![1.0], vec![1.0]], &[0.25, 0.75]).unwrap();
        assert!((weighted[0] - 1.0).abs() < 1e-12);
        assert!(aggregate(&[vec![1.0], vec![0.0, 1.0]], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn dual_update_examples() {
        assert_eq!(dual_update(&[0.0], &[1.0], &[0.5], 1.0), vec![0.5]);
        assert_eq!(dual_update(&[0.3], &[0.7], &[0.7], 2.0), vec![0.3]);
        let w = dual_update(&[0.5], &[0.0], &[0.25], 2.0);
        assert!((w[0] - 0.0).abs() < 1e-12);
    }

    #[test]
    fn singleton_everything_converges_immediately() {
        let inst = tiny_instance();
        let scens = set_with(&[8.0]);
        let bundles = bundle_probabilities(vec![vec![0]], &scens).unwrap();
        let result = pha_run(&inst, &scens, &bundles, &PhaConfig::new(1.0), &NoClock).unwrap();
        assert!(result.converged);
        assert_eq!(result.iterations, 1);
        assert!(result.residual < 1e-9);
    }

    #[test]
    fn identical_scenarios_in_singleton_bundles_agree_at_once() {
        let inst = tiny_instance();
        let scens = set_with(&[8.0, 8.0]);
        let bundles = bundle_probabilities(vec![vec![0], vec![1]], &scens).unwrap();
        let result = pha_run(&inst, &scens, &bundles, &PhaConfig::new(1.3), &NoClock).unwrap();
        assert!(result.converged);
        assert_eq!(result.iterations, 1);
        assert!(result.residual < 1e-9);
    }

    #[test]
    fn repair_fixes_unbalanced_roundings() {
        let inst = tiny_instance();
        let mut design = vec![0.0; 8];
        design[inst.arc_index(0, 1, 1)] = 1.0; // open one movement, unbalanced
        repair_design_balance(&inst, &mut design).unwrap();
        assert!(crate::formulation::design_balance_violation(&inst, &design) < 1e-9);
        assert!(design[inst.arc_index(0, 1, 1)] > 0.5, "repair must not close arcs");
    }

    #[test]
    fn sweep_picks_the_best_run_and_dedups() {
        let inst = tiny_instance();
        let scens = set_with(&[6.0, 10.0]);
        let bundles = bundle_probabilities(vec![vec![0], vec![1]], &scens).unwrap();
        let base = PhaConfig::new(1.0);
        let grid = [1.0, 1.0, 2.0, 0.8];
        let best = penalty_sweep(&inst, &scens, &bundles, &grid, &base, &NoClock).unwrap();
        for rho in [0.8, 1.0, 2.0] {
            let single =
                pha_run(&inst, &scens, &bundles, &PhaConfig { penalty: rho, ..base.clone() }, &NoClock)
                    .unwrap();
            assert!(best.objective <= single.objective + 1e-9, "rho {rho}");
        }
    }

    #[test]
    fn reported_objective_matches_independent_pricing() {
        let inst = tiny_instance();
        let scens = set_with(&[5.0, 9.0, 13.0]);
        let bundles = bundle_probabilities(vec![vec![0, 1], vec![2]], &scens).unwrap();
        let result = pha_run(&inst, &scens, &bundles, &PhaConfig::new(1.5), &NoClock).unwrap();
        let repriced = evaluate_design(&inst, &scens, &result.design).unwrap();
        assert!((repriced - result.objective).abs() < 1e-9);
        // duals stay probability-centered
        for a in 0..inst.num_arcs() {
            let total: f64 = (0..bundles.num_bundles())
                .map(|b| bundles.bundle_prob[b] * result.state.duals[b][a])
                .sum();
            assert!(total.abs() < 1e-9);
        }
    }
}
