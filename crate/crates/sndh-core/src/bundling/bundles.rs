//! Bundle placement and probability reweighting.

use alloc::vec;
use alloc::vec::Vec;

use super::FcmConfig;
use crate::bundling::FuzzyPartition;
use crate::error::{Error, Result};
use crate::scenarios::ScenarioSet;

/// Scenario bundles with the reweighted probabilities that keep the bundle
/// probabilities summing to one even when scenarios repeat across bundles.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleSet {
    /// Scenario indices per bundle, each list sorted ascending.
    pub bundles: Vec<Vec<usize>>,
    /// How many bundles each scenario landed in.
    pub occurrences: Vec<usize>,
    /// `q_s`: the scenario's probability divided by its occurrence count.
    pub reweighted_prob: Vec<f64>,
    /// `p_b`: sum of `q_s` over the bundle's scenarios.
    pub bundle_prob: Vec<f64>,
}

impl BundleSet {
    pub fn num_bundles(&self) -> usize {
        self.bundles.len()
    }

    pub fn num_scenarios(&self) -> usize {
        self.occurrences.len()
    }
}

/// Summary of how much the bundles overlap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapStats {
    pub bundle_sizes: Vec<usize>,
    /// Scenarios appearing in two or more bundles.
    pub repeated_scenarios: usize,
    /// Occurrence count per scenario.
    pub occurrences: Vec<usize>,
}

/// Places each scenario into bundles from its membership scores.
///
/// Let `h(s)` be the scenario's maximum score. Above the threshold `gamma`
/// the scenario joins every bundle whose score exceeds `gamma`; otherwise it
/// joins every bundle whose score falls within `[eta * h(s), h(s)]`. Every
/// scenario lands in at least one bundle (the arg-max one).
pub fn assign_bundles(partition: &FuzzyPartition, cfg: &FcmConfig) -> Vec<Vec<usize>> {
    let g = partition.num_bundles();
    let mut bundles = vec![Vec::new(); g];
    for (s, row) in partition.membership.iter().enumerate() {
        // ties resolve to the lowest bundle index
        let mut top = 0;
        for (b, score) in row.iter().enumerate() {
            if *score > row[top] {
                top = b;
            }
        }
        let h = row[top];
        if h > cfg.score_threshold {
            for (b, score) in row.iter().enumerate() {
                if *score > cfg.score_threshold {
                    bundles[b].push(s);
                }
            }
        } else {
            let floor = cfg.interval_param * h;
            for (b, score) in row.iter().enumerate() {
                if *score >= floor && *score <= h {
                    bundles[b].push(s);
                }
            }
        }
    }
    bundles
}

/// Tallies occurrence counts and computes `q_s` and `p_b`.
pub fn bundle_probabilities(bundles: Vec<Vec<usize>>, scenarios: &ScenarioSet) -> Result<BundleSet> {
    let n = scenarios.len();
    let mut occurrences = vec![0usize; n];
    for bundle in &bundles {
        for &s in bundle {
            if s >= n {
                return Err(Error::InvalidArgument("bundle refers to an unknown scenario"));
            }
            occurrences[s] += 1;
        }
    }
    if occurrences.iter().any(|c| *c == 0) {
        return Err(Error::Internal("a scenario was placed in no bundle"));
    }
    let reweighted_prob: Vec<f64> = scenarios
        .scenarios
        .iter()
        .zip(&occurrences)
        .map(|(s, c)| s.probability / *c as f64)
        .collect();
    let bundle_prob: Vec<f64> = bundles
        .iter()
        .map(|bundle| bundle.iter().map(|&s| reweighted_prob[s]).sum())
        .collect();
    Ok(BundleSet { bundles, occurrences, reweighted_prob, bundle_prob })
}

/// Per-bundle sizes, repeated-scenario count, and the occurrence histogram.
pub fn overlap_stats(bundles: &BundleSet) -> OverlapStats {
    OverlapStats {
        bundle_sizes: bundles.bundles.iter().map(|b| b.len()).collect(),
        repeated_scenarios: bundles.occurrences.iter().filter(|c| **c >= 2).count(),
        occurrences: bundles.occurrences.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::Scenario;

    fn partition_with(rows: &[&[f64]]) -> FuzzyPartition {
        FuzzyPartition {
            membership: rows.iter().map(|r| r.to_vec()).collect(),
            centers: vec![vec![0.0]; rows[0].len()],
            objective: 0.0,
            iterations_used: 0,
            objective_history: vec![],
        }
    }

    fn uniform_set(n: usize) -> ScenarioSet {
        ScenarioSet {
            scenarios: (0..n)
                .map(|i| Scenario { demand: vec![i as f64], probability: 1.0 / n as f64 })
                .collect(),
            seed: 0,
        }
    }

    fn cfg() -> FcmConfig {
        FcmConfig::new(3, 2.0, 0)
    }

    #[test]
    fn clear_winner_goes_to_one_bundle() {
        let part = partition_with(&[&[0.85, 0.10, 0.05]]);
        assert_eq!(assign_bundles(&part, &cfg()), vec![vec![0], vec![], vec![]]);
    }

    #[test]
    fn interval_rule_captures_near_ties() {
        let part = partition_with(&[&[0.48, 0.48, 0.04]]);
        assert_eq!(assign_bundles(&part, &cfg()), vec![vec![0], vec![0], vec![]]);

        let part = partition_with(&[&[0.50, 0.45, 0.05]]);
        assert_eq!(assign_bundles(&part, &cfg()), vec![vec![0], vec![], vec![]]);
    }

    #[test]
    fn threshold_above_half_gives_at_most_one_bundle() {
        // rows sum to 1, so two scores > 0.8 cannot coexist
        let part = partition_with(&[&[0.81, 0.19, 0.0], &[0.2, 0.75, 0.05], &[0.1, 0.1, 0.8]]);
        let bundles = assign_bundles(&part, &cfg());
        let mut occurrences = vec![0; 3];
        for b in &bundles {
            for &s in b {
                occurrences[s] += 1;
            }
        }
        assert!(occurrences.iter().all(|c| *c >= 1));
    }

    #[test]
    fn probabilities_reweight_by_occurrence() {
        // disjoint bundles leave probabilities untouched
        let set = uniform_set(4);
        let b = bundle_probabilities(vec![vec![0, 1], vec![2, 3]], &set).unwrap();
        assert_eq!(b.reweighted_prob, vec![0.25; 4]);
        assert!((b.bundle_prob.iter().sum::<f64>() - 1.0).abs() < 1e-12);

        // a scenario in two bundles has its probability halved
        let set = ScenarioSet {
            scenarios: vec![
                Scenario { demand: vec![0.0], probability: 0.1 },
                Scenario { demand: vec![1.0], probability: 0.9 },
            ],
            seed: 0,
        };
        let b = bundle_probabilities(vec![vec![0, 1], vec![0]], &set).unwrap();
        assert_eq!(b.reweighted_prob[0], 0.05);

        // three scenarios at 1/3 in bundles {0,1} and {1,2}
        let set = uniform_set(3);
        let b = bundle_probabilities(vec![vec![0, 1], vec![1, 2]], &set).unwrap();
        assert!((b.bundle_prob[0] - 0.5).abs() < 1e-12);
        assert!((b.bundle_prob[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn missing_scenario_is_an_internal_error() {
        let set = uniform_set(3);
        assert_eq!(
            bundle_probabilities(vec![vec![0], vec![2]], &set),
            Err(Error::Internal("a scenario was placed in no bundle"))
        );
    }

    #[test]
    fn overlap_statistics() {
        let set = uniform_set(3);
        let disjoint = bundle_probabilities(vec![vec![0, 1], vec![2]], &set).unwrap();
        assert_eq!(overlap_stats(&disjoint).repeated_scenarios, 0);

        let overlapping = bundle_probabilities(vec![vec![0, 1], vec![1, 2]], &set).unwrap();
        let stats = overlap_stats(&overlapping);
        assert_eq!(stats.repeated_scenarios, 1);
        assert_eq!(stats.occurrences, vec![1, 2, 1]);
        // counting identity: total size == |S| + sum (occurrences - 1)
        let total: usize = stats.bundle_sizes.iter().sum();
        let extra: usize = stats.occurrences.iter().map(|c| c - 1).sum();
        assert_eq!(total, 3 + extra);
    }
}
