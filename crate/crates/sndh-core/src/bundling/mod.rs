//! Scenario bundling.
//!
//! Scenarios are clustered on their demand vectors. The fuzzy c-means path
//! produces a membership matrix from which scenarios are placed into one *or
//! more* bundles; the k-means path is the hard-clustering baseline. Both feed
//! [`bundle_probabilities`], which reweights scenarios that appear in several
//! bundles so the bundle probabilities still sum to one.

mod bundles;
mod fcm;
mod kmeans;

pub use bundles::{assign_bundles, bundle_probabilities, overlap_stats, BundleSet, OverlapStats};
pub use fcm::{fcm_fit, fcm_objective, membership_scores, FcmConfig, FuzzyPartition};
pub use kmeans::kmeans_fit;

pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
