//! Demand scenario generation.
//!
//! Demands are drawn i.i.d. from a triangular distribution via inverse-CDF
//! sampling on a seeded stream, one value per commodity per scenario, all
//! scenarios equally likely. An optional affine correction rescales each
//! commodity's sample so its mean and variance match the analytic triangular
//! moments exactly.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math;
use crate::network::Instance;

/// One demand realization with its probability of occurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Demand per commodity, in flow units; same order as `Instance::commodities`.
    pub demand: Vec<f64>,
    pub probability: f64,
}

/// A finite scenario set approximating the demand distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSet {
    pub scenarios: Vec<Scenario>,
    /// Seed the set was generated from (echoed into files for reproducibility).
    pub seed: u64,
}

impl ScenarioSet {
    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    pub fn num_commodities(&self) -> usize {
        self.scenarios.first().map_or(0, |s| s.demand.len())
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.scenarios.iter().map(|s| s.probability)
    }

    pub fn validate(&self) -> Result<()> {
        if self.scenarios.is_empty() {
            return Err(Error::InvalidArgument("scenario set is empty"));
        }
        let dim = self.scenarios[0].demand.len();
        let mut total = 0.0;
        for s in &self.scenarios {
            if s.demand.len() != dim {
                return Err(Error::InvalidArgument("scenarios have mixed demand lengths"));
            }
            if s.demand.iter().any(|d| !d.is_finite() || *d < 0.0) {
                return Err(Error::InvalidArgument("demands must be finite and nonnegative"));
            }
            if !(s.probability > 0.0 && s.probability <= 1.0) {
                return Err(Error::InvalidArgument("scenario probability must lie in (0, 1]"));
            }
            total += s.probability;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument("scenario probabilities must sum to 1"));
        }
        Ok(())
    }
}

/// Mean of `Tri(lo, hi, mode)`.
pub fn triangular_mean(lo: f64, hi: f64, mode: f64) -> f64 {
    (lo + hi + mode) / 3.0
}

/// Variance of `Tri(lo, hi, mode)`.
pub fn triangular_variance(lo: f64, hi: f64, mode: f64) -> f64 {
    (lo * lo + hi * hi + mode * mode - lo * hi - lo * mode - hi * mode) / 18.0
}

/// Inverse-CDF transform of a uniform variate `u` in `[0, 1]` to
/// `Tri(lo, hi, mode)`.
pub fn sample_triangular(u: f64, lo: f64, hi: f64, mode: f64) -> Result<f64> {
    if !(lo <= mode && mode <= hi && lo < hi) {
        return Err(Error::InvalidArgument("triangular needs lo <= mode <= hi and lo < hi"));
    }
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidArgument("uniform variate must lie in [0, 1]"));
    }
    let span = hi - lo;
    let cut = (mode - lo) / span;
    Ok(if u <= cut {
        lo + math::sqrt(u * span * (mode - lo))
    } else {
        hi - math::sqrt((1.0 - u) * span * (hi - mode))
    })
}

/// Draws `n` equally likely scenarios for the instance's commodities.
///
/// Each demand entry is an independent triangular draw from the stream seeded
/// by `seed` (scenario-major, commodity-minor order). With `moment_correct`,
/// every commodity's column is affinely rescaled so its sample mean and
/// (n-1 normalized) variance hit the analytic moments, then clamped at zero.
pub fn generate_scenario_set(
    inst: &Instance,
    n: usize,
    lo: f64,
    hi: f64,
    mode: f64,
    seed: u64,
    moment_correct: bool,
) -> Result<ScenarioSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one scenario"));
    }
    let dim = inst.num_commodities();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probability = 1.0 / n as f64;
    let mut scenarios = Vec::with_capacity(n);
    for _ in 0..n {
        let mut demand = Vec::with_capacity(dim);
        for _ in 0..dim {
            demand.push(sample_triangular(rng.random::<f64>(), lo, hi, mode)?);
        }
        scenarios.push(Scenario { demand, probability });
    }

    if moment_correct && n >= 2 {
        let target_mean = triangular_mean(lo, hi, mode);
        let target_var = triangular_variance(lo, hi, mode);
        for k in 0..dim {
            let mean = scenarios.iter().map(|s| s.demand[k]).sum::<f64>() / n as f64;
            let var = scenarios
                .iter()
                .map(|s| {
                    let d = s.demand[k] - mean;
                    d * d
                })
                .sum::<f64>()
                / (n - 1) as f64;
            let scale = if var > 1e-12 { math::sqrt(target_var / var) } else { 1.0 };
            let shift = target_mean - scale * mean;
            for s in &mut scenarios {
                s.demand[k] = (scale * s.demand[k] + shift).max(0.0);
            }
        }
    }

    Ok(ScenarioSet { scenarios, seed })
}
