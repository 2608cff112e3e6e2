//! Fuzzy c-means on scenario demand vectors, by alternating optimization.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dist_sq;
use crate::error::{Error, Result};
use crate::math;
use crate::scenarios::ScenarioSet;

/// Distances below this are treated as coincidence with a center.
const ZERO_DIST_SQ: f64 = 1e-12 * 1e-12;
/// Minimum total membership mass before a bundle center is re-seeded.
const EMPTY_MASS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct FcmConfig {
    /// Number of bundles `g`.
    pub num_bundles: usize,
    /// Fuzzy partition matrix exponent `m`, strictly greater than 1.
    pub exponent: f64,
    /// Iteration cap.
    pub max_iterations: usize,
    /// Stop once the objective improves by less than this between iterations.
    pub min_improvement: f64,
    /// Membership score threshold `gamma` for bundle placement.
    pub score_threshold: f64,
    /// Interval parameter `eta` in `[0, 1]` for scenarios below the threshold.
    pub interval_param: f64,
    pub seed: u64,
}

impl FcmConfig {
    /// The benchmark placement parameters (`gamma` 0.8, `eta` 0.95) with
    /// common alternating-optimization controls.
    pub fn new(num_bundles: usize, exponent: f64, seed: u64) -> Self {
        FcmConfig {
            num_bundles,
            exponent,
            max_iterations: 100,
            min_improvement: 1e-5,
            score_threshold: 0.8,
            interval_param: 0.95,
            seed,
        }
    }

    fn validate(&self, num_scenarios: usize) -> Result<()> {
        if self.num_bundles < 2 {
            return Err(Error::InvalidArgument("fuzzy c-means needs at least 2 bundles"));
        }
        if self.num_bundles > num_scenarios {
            return Err(Error::InvalidArgument("more bundles than scenarios"));
        }
        if !(self.exponent > 1.0) {
            return Err(Error::InvalidArgument("fuzzy exponent must exceed 1"));
        }
        if !(self.min_improvement > 0.0) {
            return Err(Error::InvalidArgument("minimum improvement must be positive"));
        }
        if !(self.score_threshold > 0.0 && self.score_threshold < 1.0) {
            return Err(Error::InvalidArgument("score threshold must lie in (0, 1)"));
        }
        if !(0.0..=1.0).contains(&self.interval_param) {
            return Err(Error::InvalidArgument("interval parameter must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Result of the alternating optimization: membership scores, bundle centers,
/// and the objective trace.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyPartition {
    /// `|S| x g`; row `s` holds the membership of scenario `s` in each bundle.
    pub membership: Vec<Vec<f64>>,
    /// `g` centers in demand space.
    pub centers: Vec<Vec<f64>>,
    /// Final objective value.
    pub objective: f64,
    pub iterations_used: usize,
    /// Objective value after each iteration, `objective_history.last() == objective`.
    pub objective_history: Vec<f64>,
}

impl FuzzyPartition {
    pub fn num_bundles(&self) -> usize {
        self.centers.len()
    }
}

/// Membership scores of one point against the current centers: the score for
/// bundle `b` is `[sum_l (d_b / d_l)^(2/(m-1))]^-1`. A point within
/// coincidence range of a center gets full membership there.
pub fn membership_scores(point: &[f64], centers: &[Vec<f64>], exponent: f64) -> Vec<f64> {
    let g = centers.len();
    let mut dists = Vec::with_capacity(g);
    let mut coincident = None;
    for (b, center) in centers.iter().enumerate() {
        let d2 = dist_sq(point, center);
        if coincident.is_none() && d2 < ZERO_DIST_SQ {
            coincident = Some(b);
        }
        dists.push(d2);
    }
    if let Some(b) = coincident {
        let mut row = vec![0.0; g];
        row[b] = 1.0;
        return row;
    }
    // 1 / sum_l (d_b/d_l)^(2/(m-1)) == d_b^(-1/(m-1)) / sum_l d_l^(-1/(m-1))
    // when written on squared distances.
    let inv_exp = -1.0 / (exponent - 1.0);
    let mut row: Vec<f64> = dists.iter().map(|d2| math::powf(*d2, inv_exp)).collect();
    let total: f64 = row.iter().sum();
    for v in &mut row {
        *v /= total;
    }
    row
}

fn update_centers(
    features: &[&[f64]],
    membership: &[Vec<f64>],
    exponent: f64,
    centers: &mut Vec<Vec<f64>>,
) {
    let dim = features[0].len();
    for (b, center) in centers.iter_mut().enumerate() {
        let mut mass = 0.0;
        let mut acc = vec![0.0; dim];
        for (s, point) in features.iter().enumerate() {
            let w = math::powf(membership[s][b], exponent);
            mass += w;
            for (a, x) in acc.iter_mut().zip(point.iter()) {
                *a += w * x;
            }
        }
        if mass < EMPTY_MASS {
            continue; // re-seeded below once all centers are in place
        }
        for (c, a) in center.iter_mut().zip(acc) {
            *c = a / mass;
        }
    }
    repair_empty_centers(features, membership, exponent, centers);
}

/// Re-seeds any bundle whose total membership mass collapsed to the scenario
/// farthest from its nearest center.
fn repair_empty_centers(
    features: &[&[f64]],
    membership: &[Vec<f64>],
    exponent: f64,
    centers: &mut [Vec<f64>],
) {
    for b in 0..centers.len() {
        let mass: f64 = membership.iter().map(|row| math::powf(row[b], exponent)).sum();
        if mass >= EMPTY_MASS {
            continue;
        }
        let far = farthest_from_nearest_center(features, centers);
        centers[b] = features[far].to_vec();
    }
}

fn farthest_from_nearest_center(features: &[&[f64]], centers: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = -1.0;
    for (s, point) in features.iter().enumerate() {
        let d = centers
            .iter()
            .map(|c| dist_sq(point, c))
            .fold(f64::INFINITY, f64::min);
        if d > best_d {
            best_d = d;
            best = s;
        }
    }
    best
}

fn objective_value(features: &[&[f64]], membership: &[Vec<f64>], centers: &[Vec<f64>], m: f64) -> f64 {
    let mut total = 0.0;
    for (s, point) in features.iter().enumerate() {
        for (b, center) in centers.iter().enumerate() {
            total += math::powf(membership[s][b], m) * dist_sq(point, center);
        }
    }
    total
}

/// The clustering objective `J`: squared center distances weighted by
/// exponentiated memberships.
pub fn fcm_objective(partition: &FuzzyPartition, scenarios: &ScenarioSet, exponent: f64) -> f64 {
    let features: Vec<&[f64]> = scenarios.scenarios.iter().map(|s| s.demand.as_slice()).collect();
    objective_value(&features, &partition.membership, &partition.centers, exponent)
}

/// Runs the alternating optimization on the scenario demand vectors.
///
/// Memberships are initialized with seeded uniform randoms normalized per
/// scenario. Each iteration recomputes the centers from the exponentiated
/// memberships, then the memberships from the new centers, then the
/// objective; it stops when the objective improvement drops below
/// `min_improvement` or the iteration cap is reached.
pub fn fcm_fit(scenarios: &ScenarioSet, cfg: &FcmConfig) -> Result<FuzzyPartition> {
    scenarios.validate()?;
    cfg.validate(scenarios.len())?;
    let features: Vec<&[f64]> = scenarios.scenarios.iter().map(|s| s.demand.as_slice()).collect();
    let spread = features
        .iter()
        .map(|p| dist_sq(p, features[0]))
        .fold(0.0_f64, f64::max);
    if spread < ZERO_DIST_SQ {
        return Err(Error::DegenerateInput("all scenarios have identical demand"));
    }

    let g = cfg.num_bundles;
    let dim = features[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut membership: Vec<Vec<f64>> = (0..features.len())
        .map(|_| {
            let mut row: Vec<f64> = (0..g).map(|_| rng.random::<f64>()).collect();
            let total: f64 = row.iter().sum();
            if total < EMPTY_MASS {
                row = vec![1.0 / g as f64; g];
            } else {
                for v in &mut row {
                    *v /= total;
                }
            }
            row
        })
        .collect();

    let mut centers = vec![vec![0.0; dim]; g];
    let mut history = Vec::new();
    let mut previous = f64::INFINITY;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        update_centers(&features, &membership, cfg.exponent, &mut centers);
        for (s, point) in features.iter().enumerate() {
            membership[s] = membership_scores(point, &centers, cfg.exponent);
        }
        let objective = objective_value(&features, &membership, &centers, cfg.exponent);
        history.push(objective);
        iterations += 1;
        if (objective - previous).abs() <= cfg.min_improvement {
            previous = objective;
            break;
        }
        previous = objective;
    }

    Ok(FuzzyPartition {
        membership,
        centers,
        objective: previous,
        iterations_used: iterations,
        objective_history: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{Scenario, ScenarioSet};

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
    fn membership_formula_one_dimensional() {
        // point 0 against centers 1 and 3 at m = 2: 1/(1 + (1/3)^2) = 0.9
        let scores = membership_scores(&[0.0], &[vec![1.0], vec![3.0]], 2.0);
        assert!((scores[0] - 0.9).abs() < 1e-12);
        assert!((scores[1] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn coincident_point_gets_full_membership() {
        let scores = membership_scores(&[2.0, 2.0], &[vec![0.0, 0.0], vec![2.0, 2.0]], 2.0);
        assert_eq!(scores, vec![0.0, 1.0]);
    }

    #[test]
    fn separated_clouds_polarize() {
        let set = set_of(&[
            &[0.0, 0.1],
            &[0.1, 0.0],
            &[0.05, 0.05],
            &[10.0, 10.1],
            &[10.1, 10.0],
            &[10.05, 10.05],
        ]);
        let cfg = FcmConfig::new(2, 1.5, 3);
        let part = fcm_fit(&set, &cfg).unwrap();
        for s in 0..3 {
            let lo = part.membership[s].iter().cloned().fold(0.0, f64::max);
            let hi = part.membership[s + 3].iter().cloned().fold(0.0, f64::max);
            assert!(lo > 0.99, "low cloud max membership {lo}");
            assert!(hi > 0.99, "high cloud max membership {hi}");
        }
        // the two clouds favor different bundles
        let b0 = part.membership[0].iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        let b1 = part.membership[4].iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert_ne!(b0, b1);
    }

    #[test]
    fn rows_sum_to_one_and_objective_never_increases() {
        let set = set_of(&[
            &[1.0, 2.0],
            &[2.0, 1.0],
            &[8.0, 9.0],
            &[9.0, 8.0],
            &[5.0, 5.0],
            &[4.0, 6.0],
            &[6.0, 4.0],
        ]);
        let cfg = FcmConfig::new(3, 2.0, 11);
        let part = fcm_fit(&set, &cfg).unwrap();
        for row in &part.membership {
            let total: f64 = row.iter().sum();
            assert!((total - 1.0).abs() < 1e-9);
            assert!(row.iter().all(|v| (0.0..=1.0).contains(v)));
        }
        for pair in part.objective_history.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-9, "objective rose: {pair:?}");
        }
        assert_eq!(part.objective, *part.objective_history.last().unwrap());
    }

    #[test]
    fn fixed_point_at_termination() {
        let set = set_of(&[
            &[1.0, 2.0],
            &[2.0, 1.0],
            &[8.0, 9.0],
            &[9.0, 8.0],
            &[5.0, 5.0],
        ]);
        let cfg = FcmConfig::new(2, 2.0, 5);
        let part = fcm_fit(&set, &cfg).unwrap();
        let features: Vec<&[f64]> = set.scenarios.iter().map(|s| s.demand.as_slice()).collect();
        let mut centers = part.centers.clone();
        let mut membership = part.membership.clone();
        update_centers(&features, &membership, 2.0, &mut centers);
        for (s, point) in features.iter().enumerate() {
            membership[s] = membership_scores(point, &centers, 2.0);
        }
        let next = objective_value(&features, &membership, &centers, 2.0);
        assert!((next - part.objective).abs() < cfg.min_improvement);
    }

    #[test]
    fn objective_examples() {
        // every scenario sits on its bundle center: J = 0
        let set = set_of(&[&[3.0], &[3.0]]);
        let part = FuzzyPartition {
            membership: alloc::vec![alloc::vec![1.0], alloc::vec![1.0]],
            centers: alloc::vec![alloc::vec![3.0]],
            objective: 0.0,
            iterations_used: 0,
            objective_history: alloc::vec![],
        };
        assert_eq!(fcm_objective(&part, &set, 2.0), 0.0);

        // one scenario at distance 2 with full membership, m = 2: J = 4
        let set = set_of(&[&[0.0]]);
        let part = FuzzyPartition {
            membership: alloc::vec![alloc::vec![1.0]],
            centers: alloc::vec![alloc::vec![2.0]],
            objective: 0.0,
            iterations_used: 0,
            objective_history: alloc::vec![],
        };
        assert_eq!(fcm_objective(&part, &set, 2.0), 4.0);

        // 2 scenarios x 2 bundles, memberships 0.5, all distances 1, m = 2:
        // four terms of 0.25
        let set = set_of(&[&[0.0], &[2.0]]);
        let part = FuzzyPartition {
            membership: alloc::vec![alloc::vec![0.5, 0.5], alloc::vec![0.5, 0.5]],
            centers: alloc::vec![alloc::vec![1.0], alloc::vec![1.0]],
            objective: 0.0,
            iterations_used: 0,
            objective_history: alloc::vec![],
        };
        assert!((fcm_objective(&part, &set, 2.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let set = set_of(&[&[1.0], &[2.0], &[3.0]]);
        assert!(fcm_fit(&set, &FcmConfig::new(4, 2.0, 0)).is_err());
        assert!(fcm_fit(&set, &FcmConfig::new(2, 1.0, 0)).is_err());
        let same = set_of(&[&[1.0], &[1.0], &[1.0]]);
        assert_eq!(
            fcm_fit(&same, &FcmConfig::new(2, 2.0, 0)),
            Err(Error::DegenerateInput("all scenarios have identical demand"))
        );
    }
}
