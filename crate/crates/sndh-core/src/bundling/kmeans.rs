//! Hard-clustering baseline: Lloyd's algorithm with k-means++ seeding on the
//! squared Euclidean distance.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{bundle_probabilities, dist_sq, BundleSet};
use crate::error::{Error, Result};
use crate::scenarios::ScenarioSet;

const MAX_ITERATIONS: usize = 300;
const MIN_RELATIVE_IMPROVEMENT: f64 = 1e-9;

fn seed_centers(features: &[&[f64]], g: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centers = Vec::with_capacity(g);
    centers.push(features[rng.random_range(0..features.len())].to_vec());
    while centers.len() < g {
        let weights: Vec<f64> = features
            .iter()
            .map(|p| centers.iter().map(|c| dist_sq(p, c)).fold(f64::INFINITY, f64::min))
            .collect();
        let total: f64 = weights.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = features.len() - 1;
            for (s, w) in weights.iter().enumerate() {
                target -= w;
                if target <= 0.0 {
                    chosen = s;
                    break;
                }
            }
            chosen
        } else {
            // all points coincide with chosen centers; any point works
            rng.random_range(0..features.len())
        };
        centers.push(features[pick].to_vec());
    }
    centers
}

fn nearest(point: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (b, c) in centers.iter().enumerate() {
        let d = dist_sq(point, c);
        if d < best_d {
            best_d = d;
            best = b;
        }
    }
    (best, best_d)
}

/// Partitions the scenarios into exactly `g` disjoint bundles.
pub fn kmeans_fit(scenarios: &ScenarioSet, g: usize, seed: u64) -> Result<BundleSet> {
    scenarios.validate()?;
    if g == 0 {
        return Err(Error::InvalidArgument("need at least one bundle"));
    }
    if g > scenarios.len() {
        return Err(Error::InvalidArgument("more bundles than scenarios"));
    }
    let features: Vec<&[f64]> = scenarios.scenarios.iter().map(|s| s.demand.as_slice()).collect();
    let dim = features[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = seed_centers(&features, g, &mut rng);

    let mut assignment = vec![0usize; features.len()];
    let mut inertia = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        let mut changed = false;
        let mut new_inertia = 0.0;
        for (s, point) in features.iter().enumerate() {
            let (b, d) = nearest(point, &centers);
            new_inertia += d;
            if assignment[s] != b {
                assignment[s] = b;
                changed = true;
            }
        }

        let mut counts = vec![0usize; g];
        let mut sums = vec![vec![0.0; dim]; g];
        for (s, point) in features.iter().enumerate() {
            counts[assignment[s]] += 1;
            for (a, x) in sums[assignment[s]].iter_mut().zip(point.iter()) {
                *a += x;
            }
        }
        for b in 0..g {
            if counts[b] == 0 {
                // empty cluster: reseed at the point farthest from its
                // nearest center and rerun the assignment pass
                let far = features
                    .iter()
                    .enumerate()
                    .map(|(s, p)| (s, nearest(p, &centers).1))
                    .max_by(|a, b| a.1.total_cmp(&b.1))
                    .map(|(s, _)| s)
                    .unwrap();
                centers[b] = features[far].to_vec();
                changed = true;
            } else {
                for (c, total) in centers[b].iter_mut().zip(&sums[b]) {
                    *c = total / counts[b] as f64;
                }
            }
        }

        let improved = inertia.is_infinite()
            || inertia - new_inertia > MIN_RELATIVE_IMPROVEMENT * inertia.max(1.0);
        inertia = new_inertia;
        if !changed || !improved {
            break;
        }
    }

    let mut bundles = vec![Vec::new(); g];
    for (s, b) in assignment.iter().enumerate() {
        bundles[*b].push(s);
    }
    bundle_probabilities(bundles, scenarios)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundling::overlap_stats;
    use crate::scenarios::Scenario;

    fn set_of(points: &[&[f64]]) -> ScenarioSet {
        let p = 1.0 / points.len() as f64;
        ScenarioSet {
            scenarios: points
                .iter()
                .map(|d| Scenario { demand: d.to_vec(), probability: p })
                .collect(),
            seed: 0,
        }
    }

    #[test]
    fn one_bundle_holds_everything() {
        let set = set_of(&[&[1.0], &[2.0], &[5.0]]);
        let b = kmeans_fit(&set, 1, 0).unwrap();
        assert_eq!(b.bundles, vec![vec![0, 1, 2]]);
        assert!((b.bundle_prob[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn as_many_bundles_as_scenarios_gives_singletons() {
        let set = set_of(&[&[1.0], &[4.0], &[9.0], &[16.0]]);
        let b = kmeans_fit(&set, 4, 1).unwrap();
        let mut sizes: Vec<usize> = b.bundles.iter().map(|x| x.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 1, 1, 1]);
        for prob in &b.bundle_prob {
            assert!((prob - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn recovers_separated_clouds() {
        let set = set_of(&[
            &[0.0, 0.2],
            &[0.2, 0.0],
            &[0.1, 0.1],
            &[9.0, 9.2],
            &[9.2, 9.0],
            &[9.1, 9.1],
        ]);
        let b = kmeans_fit(&set, 2, 7).unwrap();
        let stats = overlap_stats(&b);
        assert_eq!(stats.repeated_scenarios, 0);
        let mut sizes = stats.bundle_sizes.clone();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![3, 3]);
        // the two clouds may land in either bundle, but never split
        let low_bundle = b.bundles.iter().find(|x| x.contains(&0)).unwrap();
        assert_eq!(low_bundle, &vec![0, 1, 2]);
    }

    #[test]
    fn hard_clustering_counts_every_scenario_once() {
        let set = set_of(&[&[1.0], &[2.0], &[3.0], &[10.0], &[11.0]]);
        let b = kmeans_fit(&set, 2, 3).unwrap();
        assert!(b.occurrences.iter().all(|c| *c == 1));
        assert!((b.bundle_prob.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(kmeans_fit(&set, 6, 3).is_err());
    }

    #[test]
    fn deterministic_for_a_seed() {
        let set = set_of(&[&[1.0], &[2.0], &[3.0], &[10.0], &[11.0], &[12.0]]);
        let a = kmeans_fit(&set, 2, 9).unwrap();
        let b = kmeans_fit(&set, 2, 9).unwrap();
        assert_eq!(a, b);
    }
}
