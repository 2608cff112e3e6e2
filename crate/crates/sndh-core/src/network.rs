//! Less-than-truckload instance data and its cyclic space-time expansion.
//!
//! Terminals are duplicated once per period of the repeating schedule. An arc
//! `(i, j, t)` moves from terminal `i` at period `t - 1` (wrapping to `T - 1`
//! from period 0) to terminal `j` at period `t`; arcs with `i == j` are
//! holding arcs and carry no capacity.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A shipment order: available at its origin in one period, due at its
/// destination by its deadline period, both on the cyclic schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commodity {
    pub id: usize,
    pub origin: usize,
    pub avail_period: usize,
    pub destination: usize,
    pub deadline: usize,
}

/// A service network design instance.
///
/// `arc_cost` is a row-major `num_terminals x num_terminals` matrix; the
/// diagonal holds the holding-arc cost (zero is allowed). `capacity` is the
/// uniform per-arc flow capacity and applies only to arcs between distinct
/// terminals; holding arcs are uncapacitated.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub num_terminals: usize,
    pub horizon: usize,
    pub commodities: Vec<Commodity>,
    pub arc_cost: Vec<f64>,
    pub capacity: f64,
    pub outsourcing_cost: f64,
}

/// One arc of the space-time expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceTimeArc {
    pub from_terminal: usize,
    pub to_terminal: usize,
    /// Period at which the movement arrives (the `t` of the 3-tuple).
    pub arrival: usize,
    /// Period at which the movement departs: `arrival - 1`, wrapping.
    pub departure: usize,
    pub is_holding: bool,
}

/// Departure period of a movement arriving at period `t` on a cyclic
/// `T`-period schedule: `t - 1` if `t >= 1`, else `T - 1`.
pub fn departure_time(t: usize, horizon: usize) -> Result<usize> {
    if horizon < 1 {
        return Err(Error::InvalidArgument("horizon must be at least 1"));
    }
    if t >= horizon {
        return Err(Error::InvalidArgument("period must lie in [0, T-1]"));
    }
    Ok(if t >= 1 { t - 1 } else { horizon - 1 })
}

/// True iff period `t` lies in the cyclic interval `(sigma, tau]` walked
/// forward from `sigma`. When `sigma == tau` the window is every period.
pub fn in_cyclic_window(t: usize, sigma: usize, tau: usize, horizon: usize) -> bool {
    debug_assert!(t < horizon && sigma < horizon && tau < horizon);
    if sigma == tau {
        return true;
    }
    let offset = (t + horizon - sigma) % horizon;
    let width = (tau + horizon - sigma) % horizon;
    offset >= 1 && offset <= width
}

/// Number of periods in the commodity's delivery window.
pub fn window_len(sigma: usize, tau: usize, horizon: usize) -> usize {
    if sigma == tau {
        horizon
    } else {
        (tau + horizon - sigma) % horizon
    }
}

impl Instance {
    pub fn num_commodities(&self) -> usize {
        self.commodities.len()
    }

    /// Fixed cost of any arc from `i` to `j` (any period).
    pub fn cost(&self, from: usize, to: usize) -> f64 {
        self.arc_cost[from * self.num_terminals + to]
    }

    /// Total number of space-time arcs, `N^2 * T`.
    pub fn num_arcs(&self) -> usize {
        self.num_terminals * self.num_terminals * self.horizon
    }

    /// Dense arc identifier; arrival-period major, then origin, then target.
    pub fn arc_index(&self, from: usize, to: usize, arrival: usize) -> usize {
        (arrival * self.num_terminals + from) * self.num_terminals + to
    }

    /// Inverse of [`Instance::arc_index`].
    pub fn arc_of_index(&self, idx: usize) -> SpaceTimeArc {
        let n = self.num_terminals;
        let to = idx % n;
        let from = (idx / n) % n;
        let arrival = idx / (n * n);
        SpaceTimeArc {
            from_terminal: from,
            to_terminal: to,
            arrival,
            departure: if arrival >= 1 { arrival - 1 } else { self.horizon - 1 },
            is_holding: from == to,
        }
    }

    /// Checks every documented invariant of the instance data.
    pub fn validate(&self) -> Result<()> {
        if self.horizon < 2 {
            return Err(Error::InvalidArgument("horizon must be at least 2"));
        }
        if self.num_terminals < 2 {
            return Err(Error::InvalidArgument("need at least 2 terminals"));
        }
        if self.arc_cost.len() != self.num_terminals * self.num_terminals {
            return Err(Error::InvalidArgument("arc_cost must be an N x N matrix"));
        }
        if self.arc_cost.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidArgument("arc costs must be finite and nonnegative"));
        }
        if !(self.capacity > 0.0) {
            return Err(Error::InvalidArgument("capacity must be positive"));
        }
        if !(self.outsourcing_cost > 0.0) {
            return Err(Error::InvalidArgument("outsourcing cost must be positive"));
        }
        for k in &self.commodities {
            if k.origin == k.destination {
                return Err(Error::InvalidArgument("commodity origin equals destination"));
            }
            if k.origin >= self.num_terminals || k.destination >= self.num_terminals {
                return Err(Error::InvalidArgument("commodity terminal out of range"));
            }
            if k.avail_period >= self.horizon || k.deadline >= self.horizon {
                return Err(Error::InvalidArgument("commodity period out of range"));
            }
            if window_len(k.avail_period, k.deadline, self.horizon) == 0 {
                return Err(Error::InvalidArgument("commodity has an empty delivery window"));
            }
        }
        Ok(())
    }
}

/// Expands the instance into its full space-time arc list, one arc per
/// `(i, j, t)` triple, in [`Instance::arc_index`] order.
pub fn build_spacetime(inst: &Instance) -> Result<Vec<SpaceTimeArc>> {
    inst.validate()?;
    let n = inst.num_terminals;
    let mut arcs = Vec::with_capacity(inst.num_arcs());
    for arrival in 0..inst.horizon {
        let departure = departure_time(arrival, inst.horizon)?;
        for from in 0..n {
            for to in 0..n {
                arcs.push(SpaceTimeArc {
                    from_terminal: from,
                    to_terminal: to,
                    arrival,
                    departure,
                    is_holding: from == to,
                });
            }
        }
    }
    Ok(arcs)
}

/// True iff commodity `k` may carry flow on `arc`: the arrival period must
/// lie inside the commodity's cyclic delivery window.
pub fn commodity_arc_allowed(inst: &Instance, k: &Commodity, arc: &SpaceTimeArc) -> bool {
    in_cyclic_window(arc.arrival, k.avail_period, k.deadline, inst.horizon)
}
