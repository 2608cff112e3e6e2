//! Branch and bound over the binary variables.
//!
//! Nodes are explored depth-first until the first incumbent, then best-first
//! on the parent LP bound. Each node re-solves with the dual simplex from its
//! parent's basis, so a node costs a handful of pivots rather than a full
//! solve. Branching picks the most fractional binary (ties to the lowest
//! index), which keeps the search deterministic.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::lp::{LinearProgram, Solution, Status};
use super::simplex::{BasisSnapshot, LpOutcome, Simplex, FEAS_TOL};
use crate::clock::Clock;
use crate::error::{Error, Result};
use crate::math;

/// Binary variables within this distance of an integer count as integral.
pub const INT_TOL: f64 = 1e-6;

/// Termination controls for [`solve_milp`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MilpOptions {
    /// Stop once `(incumbent - bound) / max(1e-10, |incumbent|)` drops to this.
    pub rel_gap: f64,
    pub node_limit: usize,
    /// Wall-clock budget in seconds, measured on the caller's clock.
    pub time_limit: f64,
}

impl Default for MilpOptions {
    fn default() -> Self {
        MilpOptions { rel_gap: 0.0, node_limit: 1_000_000, time_limit: f64::INFINITY }
    }
}

/// Solves a pure LP (every variable continuous) with the two-phase simplex.
pub fn solve_lp(lp: &LinearProgram) -> Result<Solution> {
    if lp.num_binary() > 0 {
        return Err(Error::InvalidArgument("solve_lp requires all variables continuous"));
    }
    let mut simplex = Simplex::new(lp)?;
    let outcome = simplex.solve_from_scratch()?;
    finish_lp(lp, &mut simplex, outcome)
}

fn finish_lp(lp: &LinearProgram, simplex: &mut Simplex, outcome: LpOutcome) -> Result<Solution> {
    match outcome {
        LpOutcome::Infeasible => Ok(Solution::without_point(Status::Infeasible)),
        LpOutcome::Unbounded => Ok(Solution::without_point(Status::Unbounded)),
        LpOutcome::Optimal => {
            let mut primal = Vec::new();
            simplex.primal_point(&mut primal);
            let (objective, violation) = lp.check_point(&primal);
            if violation > 10.0 * FEAS_TOL {
                return Err(Error::Internal("simplex returned an infeasible point"));
            }
            Ok(Solution { status: Status::Optimal, primal, objective, gap: 0.0, nodes_explored: 0 })
        }
    }
}

struct Node {
    id: u64,
    /// LP bound inherited from the parent (optimistic estimate).
    bound: f64,
    /// Bound fixings accumulated from the root.
    changes: Vec<(usize, f64)>,
    snapshot: BasisSnapshot,
}

/// Max-heap entry inverted into a min-heap on (bound, id).
struct HeapNode(Node);

impl PartialEq for HeapNode {
    fn eq(&self, other: &Self) -> bool {
        self.0.bound == other.0.bound && self.0.id == other.0.id
    }
}

impl Eq for HeapNode {}

impl PartialOrd for HeapNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapNode {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap pops the smallest bound first
        other
            .0
            .bound
            .total_cmp(&self.0.bound)
            .then_with(|| other.0.id.cmp(&self.0.id))
    }
}

/// Best-first branch and bound with depth-first plunging until the first
/// incumbent. Subproblem LPs are re-solved dual-simplex from the parent
/// basis. Deterministic for identical inputs.
pub fn solve_milp(
    lp: &LinearProgram,
    options: &MilpOptions,
    clock: &dyn Clock,
) -> Result<Solution> {
    if !(options.rel_gap >= 0.0) {
        return Err(Error::InvalidArgument("relative gap must be nonnegative"));
    }
    lp.validate()?;
    let binaries: Vec<usize> = lp.binary_vars().collect();
    if binaries.is_empty() {
        return solve_lp(lp);
    }

    let start = clock.elapsed();
    let mut simplex = Simplex::new(lp)?;
    let root_outcome = simplex.solve_from_scratch()?;
    match root_outcome {
        LpOutcome::Infeasible => return Ok(Solution::without_point(Status::Infeasible)),
        LpOutcome::Unbounded => return Ok(Solution::without_point(Status::Unbounded)),
        LpOutcome::Optimal => {}
    }

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut nodes_explored = 0usize;
    let mut next_id = 0u64;
    let mut stack: Vec<Node> = Vec::new();
    let mut heap: BinaryHeap<HeapNode> = BinaryHeap::new();
    let mut hit_limit = false;

    // the root is already solved; seed the search with it. nodes_explored
    // counts LP re-solves beyond the root.
    let mut pending_solved = Some((simplex.objective(), Vec::new()));

    'search: loop {
        // harvest the node solved in the previous step (root or dual re-solve)
        if let Some((obj, changes)) = pending_solved.take() {
            let beats_incumbent = incumbent.as_ref().map_or(true, |(inc, _)| obj < inc - 1e-9);
            if beats_incumbent {
                match most_fractional(&simplex, &binaries) {
                    None => {
                        // integral: new incumbent
                        let mut primal = Vec::new();
                        simplex.primal_point(&mut primal);
                        for &b in &binaries {
                            primal[b] = math::round(primal[b]);
                        }
                        incumbent = Some((obj, primal));
                        // plunging is over; move the stack to the heap
                        for node in stack.drain(..) {
                            heap.push(HeapNode(node));
                        }
                    }
                    Some(var) => {
                        let frac = simplex.value_of(var);
                        let snapshot = simplex.snapshot();
                        let preferred = if frac >= 0.5 { 1.0 } else { 0.0 };
                        for value in [1.0 - preferred, preferred] {
                            let mut changes = changes.clone();
                            changes.push((var, value));
                            let node = Node { id: next_id, bound: obj, changes, snapshot: snapshot.clone() };
                            next_id += 1;
                            if incumbent.is_none() {
                                stack.push(node);
                            } else {
                                heap.push(HeapNode(node));
                            }
                        }
                    }
                }
            }
        }

        // termination checks against the sharpest open bound
        let open_bound = stack
            .iter()
            .map(|n| n.bound)
            .chain(heap.peek().map(|h| h.0.bound))
            .fold(f64::INFINITY, f64::min);
        if let Some((inc, _)) = &incumbent {
            let gap = (inc - open_bound) / f64::max(1e-10, inc.abs());
            if open_bound.is_infinite() || gap <= options.rel_gap {
                break 'search;
            }
        } else if open_bound.is_infinite() {
            break 'search;
        }
        if nodes_explored >= options.node_limit || clock.elapsed() - start > options.time_limit {
            hit_limit = true;
            break 'search;
        }

        // pick the next node: plunge before any incumbent, best-first after
        let node = if incumbent.is_none() {
            match stack.pop() {
                Some(n) => n,
                None => match heap.pop() {
                    Some(h) => h.0,
                    None => break 'search,
                },
            }
        } else {
            match heap.pop() {
                Some(h) => h.0,
                None => break 'search,
            }
        };
        if let Some((inc, _)) = &incumbent {
            if node.bound >= inc - 1e-9 {
                continue; // fathomed by bound without a solve
            }
        }

        simplex.restore(&node.snapshot)?;
        for &b in &binaries {
            let (lo, up) = lp.bounds(b);
            simplex.set_var_bounds(b, lo, up);
        }
        for &(var, value) in &node.changes {
            simplex.set_var_bounds(var, value, value);
        }
        simplex.recompute_xb();
        nodes_explored += 1;
        match simplex.resolve_dual()? {
            LpOutcome::Infeasible => {}
            LpOutcome::Unbounded => {
                return Err(Error::Internal("dual simplex reported an unbounded node"));
            }
            LpOutcome::Optimal => {
                pending_solved = Some((simplex.objective(), node.changes));
            }
        }
    }

    let open_bound = stack
        .iter()
        .map(|n| n.bound)
        .chain(heap.iter().map(|h| h.0.bound))
        .fold(f64::INFINITY, f64::min);
    match incumbent {
        None => {
            if hit_limit {
                let mut s = Solution::without_point(Status::LimitReached);
                s.nodes_explored = nodes_explored;
                Ok(s)
            } else {
                let mut s = Solution::without_point(Status::Infeasible);
                s.nodes_explored = nodes_explored;
                Ok(s)
            }
        }
        Some((obj, primal)) => {
            let bound = open_bound.min(obj);
            let gap = ((obj - bound) / f64::max(1e-10, obj.abs())).max(0.0);
            let status = if hit_limit {
                Status::LimitReached
            } else if gap > 0.0 {
                Status::GapReached
            } else {
                Status::Optimal
            };
            let (objective, violation) = lp.check_point(&primal);
            if violation > 10.0 * FEAS_TOL {
                return Err(Error::Internal("branch and bound returned an infeasible point"));
            }
            Ok(Solution { status, primal, objective, gap, nodes_explored })
        }
    }
}

fn most_fractional(simplex: &Simplex, binaries: &[usize]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &b in binaries {
        let x = simplex.value_of(b);
        let frac = (x - math::round(x)).abs();
        if frac > INT_TOL {
            let score = f64::min(x, 1.0 - x).min(0.5);
            if best.map_or(true, |(_, s)| score > s + 1e-15) {
                best = Some((b, score));
            }
        }
    }
    best.map(|(b, _)| b)
}
