//! JSON file schemas and their conversions to the core types.
//!
//! Files are written pretty-printed with a trailing newline. Schemas use
//! fixed-order structs and arrays only (no maps), so parsing a file and
//! rewriting it reproduces the bytes exactly.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use sndh_core::bundling::{bundle_probabilities, BundleSet, FcmConfig};
use sndh_core::network::{Commodity, Instance};
use sndh_core::scenarios::{Scenario, ScenarioSet};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CommodityFile {
    pub origin: usize,
    pub avail_period: usize,
    pub destination: usize,
    pub deadline: usize,
}

/// Instance file: costs are a row-major `num_terminals x num_terminals`
/// matrix; indices are zero-based.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InstanceFile {
    pub num_terminals: usize,
    pub horizon: usize,
    pub capacity: f64,
    pub outsourcing_cost: f64,
    pub arc_cost: Vec<f64>,
    pub commodities: Vec<CommodityFile>,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> InstanceFile {
        InstanceFile {
            num_terminals: inst.num_terminals,
            horizon: inst.horizon,
            capacity: inst.capacity,
            outsourcing_cost: inst.outsourcing_cost,
            arc_cost: inst.arc_cost.clone(),
            commodities: inst
                .commodities
                .iter()
                .map(|k| CommodityFile {
                    origin: k.origin,
                    avail_period: k.avail_period,
                    destination: k.destination,
                    deadline: k.deadline,
                })
                .collect(),
        }
    }

    pub fn into_instance(self) -> Result<Instance> {
        let inst = Instance {
            num_terminals: self.num_terminals,
            horizon: self.horizon,
            commodities: self
                .commodities
                .into_iter()
                .enumerate()
                .map(|(id, k)| Commodity {
                    id,
                    origin: k.origin,
                    avail_period: k.avail_period,
                    destination: k.destination,
                    deadline: k.deadline,
                })
                .collect(),
            arc_cost: self.arc_cost,
            capacity: self.capacity,
            outsourcing_cost: self.outsourcing_cost,
        };
        inst.validate().map_err(|e| anyhow::anyhow!("invalid instance file: {e}"))?;
        Ok(inst)
    }
}

/// Scenario file: `demands` is the `n x K` demand matrix flattened
/// row-major (scenario-major).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScenarioFile {
    pub seed: u64,
    pub probabilities: Vec<f64>,
    pub demands: Vec<f64>,
}

impl ScenarioFile {
    pub fn from_set(set: &ScenarioSet) -> ScenarioFile {
        ScenarioFile {
            seed: set.seed,
            probabilities: set.probabilities().collect(),
            demands: set.scenarios.iter().flat_map(|s| s.demand.iter().copied()).collect(),
        }
    }

    pub fn into_set(self) -> Result<ScenarioSet> {
        let n = self.probabilities.len();
        if n == 0 {
            bail!("scenario file has no scenarios");
        }
        if self.demands.len() % n != 0 {
            bail!("scenario file demand matrix is not n x K");
        }
        let dim = self.demands.len() / n;
        let scenarios = self
            .probabilities
            .iter()
            .enumerate()
            .map(|(s, &probability)| Scenario {
                demand: self.demands[s * dim..(s + 1) * dim].to_vec(),
                probability,
            })
            .collect();
        let set = ScenarioSet { scenarios, seed: self.seed };
        set.validate().map_err(|e| anyhow::anyhow!("invalid scenario file: {e}"))?;
        Ok(set)
    }
}

/// Echo of the bundling parameters a bundle file was produced with.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BundleParams {
    pub num_bundles: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub score_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval_param: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BundleFile {
    /// `"fcm"` or `"kmeans"`.
    pub method: String,
    pub config: BundleParams,
    pub bundles: Vec<Vec<usize>>,
    pub bundle_prob: Vec<f64>,
    pub scenario_q: Vec<f64>,
    /// Membership matrix, present for fuzzy bundlings only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub membership: Option<Vec<Vec<f64>>>,
}

impl BundleFile {
    pub fn from_bundle_set(
        set: &BundleSet,
        method: &str,
        config: BundleParams,
        membership: Option<Vec<Vec<f64>>>,
    ) -> BundleFile {
        BundleFile {
            method: method.to_string(),
            config,
            bundles: set.bundles.clone(),
            bundle_prob: set.bundle_prob.clone(),
            scenario_q: set.reweighted_prob.clone(),
            membership,
        }
    }

    /// Rebuilds the bundle set against its scenario set, cross-checking the
    /// stored probabilities.
    pub fn into_bundle_set(self, scens: &ScenarioSet) -> Result<BundleSet> {
        let set = bundle_probabilities(self.bundles, scens)
            .map_err(|e| anyhow::anyhow!("invalid bundle file: {e}"))?;
        if set.bundle_prob.len() != self.bundle_prob.len() {
            bail!("bundle file probability count mismatch");
        }
        for (stored, computed) in self.bundle_prob.iter().zip(&set.bundle_prob) {
            if (stored - computed).abs() > 1e-9 {
                bail!("bundle file probabilities disagree with its bundles");
            }
        }
        Ok(set)
    }
}

impl BundleParams {
    pub fn from_fcm(cfg: &FcmConfig) -> BundleParams {
        BundleParams {
            num_bundles: cfg.num_bundles,
            seed: cfg.seed,
            exponent: Some(cfg.exponent),
            score_threshold: Some(cfg.score_threshold),
            interval_param: Some(cfg.interval_param),
        }
    }
}

/// Solution file for one solve run.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SolutionFile {
    /// 0/1 design per space-time arc, arc-index order.
    pub design: Vec<u8>,
    pub objective: f64,
    pub iterations: usize,
    pub seconds: f64,
    pub converged: bool,
    pub residual: f64,
    /// `"pha"` or `"extensive"`.
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub penalty: Option<f64>,
    /// Relative difference versus a reference objective, in percent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_difference_pct: Option<f64>,
}

/// The relative-difference figure used when comparing objectives against a
/// reference value, in percent.
pub fn relative_difference_pct(objective: f64, reference: f64) -> f64 {
    (objective - reference) / reference * 100.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use sndh_core::generate::{generate_instance, InstanceParams};
    use sndh_core::scenarios::generate_scenario_set;

    #[test]
    fn instance_round_trip() {
        let inst = generate_instance(&InstanceParams::default(), 3).unwrap();
        let file = InstanceFile::from_instance(&inst);
        let text = serde_json::to_string_pretty(&file).unwrap();
        let parsed: InstanceFile = serde_json::from_str(&text).unwrap();
        assert_eq!(file, parsed);
        assert_eq!(parsed.into_instance().unwrap(), inst);
    }

    #[test]
    fn scenario_round_trip() {
        let inst = generate_instance(&InstanceParams::default(), 3).unwrap();
        let set = generate_scenario_set(&inst, 10, 5.0, 11.0, 8.0, 7, true).unwrap();
        let file = ScenarioFile::from_set(&set);
        let parsed = file.clone().into_set().unwrap();
        assert_eq!(parsed, set);
    }

    #[test]
    fn relative_difference_is_percentage() {
        assert_eq!(relative_difference_pct(102.0, 100.0), 2.0);
        assert_eq!(relative_difference_pct(100.0, 100.0), 0.0);
    }
}
