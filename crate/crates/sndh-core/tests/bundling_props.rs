//! Property-style checks of the fuzzy bundling pipeline over many seeded
//! scenario sets, plus the overlap-versus-exponent trend.

use sndh_core::bundling::{
    assign_bundles, bundle_probabilities, fcm_fit, fcm_objective, kmeans_fit, overlap_stats,
    FcmConfig,
};
use sndh_core::generate::{generate_instance, InstanceParams};
use sndh_core::scenarios::{generate_scenario_set, ScenarioSet};

fn scenario_set(n: usize, seed: u64) -> ScenarioSet {
    let inst = generate_instance(&InstanceParams::default(), 1).unwrap();
    generate_scenario_set(&inst, n, 5.0, 11.0, 8.0, seed, false).unwrap()
}

/// Deterministic sweep of set sizes, bundle counts and exponents.
fn sweep_configs() -> Vec<(usize, usize, f64, u64)> {
    let mut configs = Vec::new();
    let mut seed = 1000;
    for i in 0..50usize {
        let n = 10 + (i * 140 / 49).min(140);
        let g = 2 + i % 6;
        let m = if i % 2 == 0 { 1.5 } else { 2.0 };
        seed += 17;
        configs.push((n, g, m, seed));
    }
    configs
}

#[test]
fn fcm_invariants_over_fifty_seeded_sets() {
    for (n, g, m, seed) in sweep_configs() {
        let scens = scenario_set(n, seed);
        let cfg = FcmConfig { max_iterations: 500, ..FcmConfig::new(g, m, seed ^ 0x5eed) };
        let part = fcm_fit(&scens, &cfg).unwrap();

        // memberships form a fuzzy partition
        for row in &part.membership {
            let total: f64 = row.iter().sum();
            assert!((total - 1.0).abs() < 1e-9, "n={n} g={g} m={m}: row sum {total}");
            assert!(row.iter().all(|v| (-1e-12..=1.0 + 1e-12).contains(v)));
        }

        // the objective never increases along the iteration trace
        for pair in part.objective_history.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-9, "n={n} g={g} m={m}: J rose {pair:?}");
        }

        // the returned partition is a fixed point within the improvement
        // threshold: one more sweep barely changes the objective
        assert!(
            part.iterations_used < cfg.max_iterations,
            "n={n} g={g} m={m}: did not settle"
        );
        let recomputed = fcm_objective(&part, &scens, m);
        assert!((recomputed - part.objective).abs() < 1e-6);
    }
}

#[test]
fn placement_and_probabilities_over_fifty_seeded_sets() {
    for (n, g, m, seed) in sweep_configs() {
        let scens = scenario_set(n, seed);
        let cfg = FcmConfig { max_iterations: 500, ..FcmConfig::new(g, m, seed ^ 0x5eed) };
        let part = fcm_fit(&scens, &cfg).unwrap();

        // rows sum to 1, so at the benchmark threshold 0.8 at most one
        // bundle can clear it
        for row in &part.membership {
            let above = row.iter().filter(|v| **v > cfg.score_threshold).count();
            assert!(above <= 1, "two scores above 0.8 in one row");
        }

        let bundles = assign_bundles(&part, &cfg);
        let bs = bundle_probabilities(bundles, &scens).unwrap();
        assert!(bs.occurrences.iter().all(|c| *c >= 1), "scenario left unbundled");
        for (s, scenario) in scens.scenarios.iter().enumerate() {
            let expected = scenario.probability / bs.occurrences[s] as f64;
            assert_eq!(bs.reweighted_prob[s], expected, "q_s must divide exactly");
        }
        let total: f64 = bs.bundle_prob.iter().sum();
        assert!((total - 1.0).abs() < 1e-9, "bundle probabilities sum to {total}");
    }
}

#[test]
fn kmeans_probabilities_sum_to_one_as_well() {
    for seed in [3u64, 17, 99] {
        let scens = scenario_set(60, seed);
        let bs = kmeans_fit(&scens, 6, seed).unwrap();
        assert!(bs.occurrences.iter().all(|c| *c == 1));
        let total: f64 = bs.bundle_prob.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
}

#[test]
fn overlap_grows_with_the_fuzzy_exponent() {
    // one seeded 48-scenario set, 5 bundles, benchmark threshold parameters
    let scens = scenario_set(48, 7);
    let mut repeated = Vec::new();
    for m in [1.5, 1.75, 2.0] {
        let cfg = FcmConfig::new(5, m, 1);
        let part = fcm_fit(&scens, &cfg).unwrap();
        let bs = bundle_probabilities(assign_bundles(&part, &cfg), &scens).unwrap();
        repeated.push(overlap_stats(&bs).repeated_scenarios);
    }
    assert!(
        repeated[2] > repeated[0],
        "repeated scenarios must grow strictly from m=1.5 to m=2.0: {repeated:?}"
    );
    assert!(
        repeated[0] <= repeated[1] && repeated[1] <= repeated[2],
        "trend must be nondecreasing: {repeated:?}"
    );
}

#[test]
fn hard_degeneration_with_unit_interval_parameter() {
    // eta = 1 and a threshold above 0.5 assign each scenario exactly once
    // whenever its top score is unique
    let scens = scenario_set(40, 11);
    let cfg = FcmConfig { interval_param: 1.0, ..FcmConfig::new(4, 2.0, 5) };
    let part = fcm_fit(&scens, &cfg).unwrap();
    let unique_top = |row: &[f64]| {
        let mut sorted: Vec<f64> = row.to_vec();
        sorted.sort_by(f64::total_cmp);
        sorted[row.len() - 1] > sorted[row.len() - 2] + 1e-12
    };
    let bundles = assign_bundles(&part, &cfg);
    let bs = bundle_probabilities(bundles, &scens).unwrap();
    for (s, row) in part.membership.iter().enumerate() {
        if unique_top(row) {
            assert_eq!(bs.occurrences[s], 1, "scenario {s} should land in one bundle");
        }
    }
}
