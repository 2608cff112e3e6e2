//! Cross-formulation identities and progressive hedging against the exact
//! extensive-form optimum on instances small enough to solve outright.

use sndh_core::bundling::bundle_probabilities;
use sndh_core::clock::NoClock;
use sndh_core::formulation::{
    build_bundle_lp, build_extensive_form, design_balance_violation, fix_design,
};
use sndh_core::generate::{generate_instance, InstanceParams};
use sndh_core::milp::{solve_lp, solve_milp, MilpOptions, Status};
use sndh_core::pha::{penalty_sweep, pha_run, PhaConfig};
use sndh_core::scenarios::generate_scenario_set;
use sndh_oracles::random_balanced_design;

fn tiny_params(terminals: usize, horizon: usize, commodities: usize) -> InstanceParams {
    InstanceParams {
        num_terminals: terminals,
        horizon,
        num_commodities: commodities,
        capacity: 12.0,
        outsourcing_cost: 80.0,
        cost_min: 10,
        cost_max: 30,
        holding_cost: 1.0,
    }
}

#[test]
fn bundle_objectives_regroup_into_the_extensive_objective() {
    let inst = generate_instance(&tiny_params(3, 3, 2), 11).unwrap();
    let scens = generate_scenario_set(&inst, 4, 5.0, 11.0, 8.0, 21, false).unwrap();
    let bundles = bundle_probabilities(vec![vec![0, 1], vec![2, 3]], &scens).unwrap();

    let (extensive, _) = build_extensive_form(&inst, &scens).unwrap();
    let bundle_lps: Vec<_> = (0..2)
        .map(|b| {
            let members = &bundles.bundles[b];
            let q: Vec<f64> = members.iter().map(|&s| bundles.reweighted_prob[s]).collect();
            build_bundle_lp(&inst, &scens, members, &q, bundles.bundle_prob[b]).unwrap().0
        })
        .collect();

    let mut tested = 0;
    for seed in 0..40u64 {
        if tested >= 20 {
            break;
        }
        let design = random_balanced_design(&inst, seed);
        assert!(design_balance_violation(&inst, &design) < 1e-12);

        let mut whole = extensive.clone();
        fix_design(&mut whole, &design);
        let whole_sol = solve_lp(&whole.relaxed()).unwrap();
        assert_eq!(whole_sol.status, Status::Optimal);

        let mut parts = 0.0;
        for lp in &bundle_lps {
            let mut part = lp.clone();
            fix_design(&mut part, &design);
            let sol = solve_lp(&part.relaxed()).unwrap();
            assert_eq!(sol.status, Status::Optimal);
            parts += sol.objective;
        }
        assert!(
            (whole_sol.objective - parts).abs() < 1e-9,
            "seed {seed}: extensive {} vs bundles {parts}",
            whole_sol.objective
        );
        tested += 1;
    }
    assert!(tested >= 20, "not enough balanced designs generated");
}

#[test]
fn pha_reaches_the_exact_optimum_zone() {
    let inst = generate_instance(&tiny_params(4, 3, 3), 5).unwrap();
    let scens = generate_scenario_set(&inst, 6, 5.0, 11.0, 8.0, 31, false).unwrap();
    let bundles = bundle_probabilities(vec![vec![0, 1, 2], vec![3, 4, 5]], &scens).unwrap();

    let (extensive, _) = build_extensive_form(&inst, &scens).unwrap();
    let exact = solve_milp(&extensive, &MilpOptions::default(), &NoClock).unwrap();
    assert_eq!(exact.status, Status::Optimal);

    let result = pha_run(&inst, &scens, &bundles, &PhaConfig::new(1.5), &NoClock).unwrap();
    assert!(
        result.objective >= exact.objective - 1e-6,
        "heuristic {} beats exact {}",
        result.objective,
        exact.objective
    );
    assert!(
        result.objective <= 1.05 * exact.objective,
        "heuristic {} too far from exact {}",
        result.objective,
        exact.objective
    );
}

#[test]
fn penalty_sweep_beats_or_ties_each_grid_point() {
    let inst = generate_instance(&tiny_params(3, 3, 2), 11).unwrap();
    let scens = generate_scenario_set(&inst, 4, 5.0, 11.0, 8.0, 21, false).unwrap();
    let bundles = bundle_probabilities(vec![vec![0, 1], vec![2, 3]], &scens).unwrap();
    let base = PhaConfig::new(1.0);
    let grid = [0.8, 1.0, 1.3, 1.5, 1.7, 1.9, 2.0];

    let best = penalty_sweep(&inst, &scens, &bundles, &grid, &base, &NoClock).unwrap();
    let (extensive, _) = build_extensive_form(&inst, &scens).unwrap();
    let exact = solve_milp(&extensive, &MilpOptions::default(), &NoClock).unwrap();
    assert!(best.objective >= exact.objective - 1e-6);
    assert!(best.objective <= 1.05 * exact.objective);
}

#[test]
fn relaxed_singleton_bundles_converge_toward_the_lp_optimum() {
    let inst = generate_instance(&tiny_params(3, 3, 2), 11).unwrap();
    let scens = generate_scenario_set(&inst, 4, 5.0, 11.0, 8.0, 21, false).unwrap();
    let singletons: Vec<Vec<usize>> = (0..4).map(|s| vec![s]).collect();
    let bundles = bundle_probabilities(singletons, &scens).unwrap();

    // the dual steps have to climb to the cost scale, so the penalty is set
    // near the outsourcing cost
    let cfg = PhaConfig {
        relax_binaries: true,
        max_iterations: 60,
        tolerance: 1e-7,
        ..PhaConfig::new(80.0)
    };
    let result = pha_run(&inst, &scens, &bundles, &cfg, &NoClock).unwrap();

    // history[1] is the first penalized iteration
    let first = result.history.get(1).or(result.history.first()).map(|h| h.residual).unwrap();
    let at_50 = result
        .history
        .get(50)
        .or_else(|| result.history.last())
        .map(|h| h.residual)
        .unwrap();
    assert!(
        at_50 < 0.1 * first || at_50 < 1e-7,
        "residual stalled: first {first}, at 50 {at_50}"
    );

    let (extensive, _) = build_extensive_form(&inst, &scens).unwrap();
    let lp_opt = solve_lp(&extensive.relaxed()).unwrap();
    assert_eq!(lp_opt.status, Status::Optimal);
    assert!(
        result.objective <= 1.01 * lp_opt.objective + 1e-9,
        "relaxed hedging {} vs LP optimum {}",
        result.objective,
        lp_opt.objective
    );
    assert!(result.objective >= lp_opt.objective - 1e-6);
}
