//! Seeded random instance generation.
//!
//! The published experiments fix the network shape (terminal count, horizon,
//! capacity, outsourcing cost) but not the arc costs or commodity orders, so
//! those are drawn here from a seeded stream: integer movement costs uniform
//! in a configurable range, constant holding cost, and commodities whose
//! deadline sits at least two cyclic steps after availability whenever the
//! horizon allows it.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::network::{Commodity, Instance};

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceParams {
    pub num_terminals: usize,
    pub horizon: usize,
    pub num_commodities: usize,
    pub capacity: f64,
    pub outsourcing_cost: f64,
    /// Inclusive integer range for movement-arc costs.
    pub cost_min: u32,
    pub cost_max: u32,
    pub holding_cost: f64,
}

impl Default for InstanceParams {
    /// The benchmark network shape: 12 terminals, 5 periods, 6 commodities,
    /// capacity 12, outsourcing cost 80 per unit.
    fn default() -> Self {
        InstanceParams {
            num_terminals: 12,
            horizon: 5,
            num_commodities: 6,
            capacity: 12.0,
            outsourcing_cost: 80.0,
            cost_min: 10,
            cost_max: 30,
            holding_cost: 1.0,
        }
    }
}

/// Builds a random instance. Identical `(params, seed)` pairs produce
/// identical instances.
pub fn generate_instance(params: &InstanceParams, seed: u64) -> Result<Instance> {
    if params.num_terminals < 2 || params.horizon < 2 {
        return Err(Error::InvalidArgument("need at least 2 terminals and 2 periods"));
    }
    if params.cost_min > params.cost_max {
        return Err(Error::InvalidArgument("cost range is inverted"));
    }
    let n = params.num_terminals;
    let t_max = params.horizon;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut arc_cost = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            arc_cost[i * n + j] = if i == j {
                params.holding_cost
            } else {
                rng.random_range(params.cost_min..=params.cost_max) as f64
            };
        }
    }

    // Deadlines sit >= 2 cyclic steps after availability so every commodity
    // can hold at its origin at least once before the direct move.
    let min_gap = 2.min(t_max - 1);
    let mut commodities = Vec::with_capacity(params.num_commodities);
    for id in 0..params.num_commodities {
        let origin = rng.random_range(0..n);
        let mut destination = rng.random_range(0..n - 1);
        if destination >= origin {
            destination += 1;
        }
        let avail_period = rng.random_range(0..t_max);
        let gap = rng.random_range(min_gap..=t_max - 1);
        let deadline = (avail_period + gap) % t_max;
        commodities.push(Commodity { id, origin, avail_period, destination, deadline });
    }

    let inst = Instance {
        num_terminals: n,
        horizon: t_max,
        commodities,
        arc_cost,
        capacity: params.capacity,
        outsourcing_cost: params.outsourcing_cost,
    };
    inst.validate()?;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::window_len;

    #[test]
    fn defaults_match_benchmark_shape() {
        let inst = generate_instance(&InstanceParams::default(), 1).unwrap();
        assert_eq!(inst.num_terminals, 12);
        assert_eq!(inst.horizon, 5);
        assert_eq!(inst.num_commodities(), 6);
        assert_eq!(inst.capacity, 12.0);
        assert_eq!(inst.outsourcing_cost, 80.0);
        assert_eq!(inst.num_arcs(), 720);
    }

    #[test]
    fn costs_in_range_and_deterministic() {
        let params = InstanceParams::default();
        let a = generate_instance(&params, 5).unwrap();
        let b = generate_instance(&params, 5).unwrap();
        assert_eq!(a, b);
        for i in 0..12 {
            for j in 0..12 {
                let c = a.cost(i, j);
                if i == j {
                    assert_eq!(c, 1.0);
                } else {
                    assert!((10.0..=30.0).contains(&c));
                }
            }
        }
    }

    #[test]
    fn commodity_windows_are_wide_enough() {
        for seed in 0..20 {
            let inst = generate_instance(
                &InstanceParams { num_terminals: 4, horizon: 3, num_commodities: 8, ..Default::default() },
                seed,
            )
            .unwrap();
            for k in &inst.commodities {
                assert_ne!(k.origin, k.destination);
                assert!(window_len(k.avail_period, k.deadline, inst.horizon) >= 2);
            }
        }
    }
}
