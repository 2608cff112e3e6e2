//! Builders translating an instance plus scenarios into linear programs.
//!
//! Three related models share one variable layout:
//!
//! * the extensive form: binary designs, flows and outsourcing for every
//!   scenario of the set;
//! * the per-scenario recourse LP: flows and outsourcing for one demand
//!   vector under a fixed design (used to price any returned design);
//! * the per-bundle subproblem: a copy of the design variables for the
//!   bundle's scenarios, optionally augmented with the dual and proximal
//!   terms of the progressive hedging iteration.
//!
//! Design columns always occupy `0..N^2*T` in arc-index order, so a design
//! vector is interchangeable across all three builders. Flow columns exist
//! only where a commodity's cyclic delivery window allows them; the deadline
//! constraint is enforced by omission.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::milp::{LinearProgram, RowSense};
use crate::network::{in_cyclic_window, Instance};
use crate::scenarios::ScenarioSet;

/// Column layout of a scenario-indexed model.
#[derive(Debug, Clone)]
pub struct ModelIndex {
    /// Design columns: one per space-time arc, in `Instance::arc_index` order.
    pub num_design: usize,
    pub num_cols: usize,
    num_commodities: usize,
    /// Arc ids each commodity may carry flow on (ascending).
    allowed_arcs: Vec<Vec<usize>>,
    /// Base column of the flow block per (scenario position, commodity).
    flow_base: Vec<Vec<usize>>,
    /// First outsourcing column; laid out scenario-major then commodity.
    outsource_base: usize,
}

impl ModelIndex {
    pub fn design_col(&self, arc: usize) -> usize {
        debug_assert!(arc < self.num_design);
        arc
    }

    /// Flow column of commodity `k` on `arc` for the model's `pos`-th
    /// scenario, if the arc is inside the commodity's window.
    pub fn flow_col(&self, pos: usize, k: usize, arc: usize) -> Option<usize> {
        let arcs = &self.allowed_arcs[k];
        arcs.binary_search(&arc).ok().map(|i| self.flow_base[pos][k] + i)
    }

    pub fn outsource_col(&self, pos: usize, k: usize) -> usize {
        self.outsource_base + pos * self.num_commodities + k
    }

    pub fn allowed_arcs(&self, k: usize) -> &[usize] {
        &self.allowed_arcs[k]
    }
}

fn allowed_arcs_per_commodity(inst: &Instance) -> Result<Vec<Vec<usize>>> {
    let n = inst.num_terminals;
    let mut per_k = Vec::with_capacity(inst.num_commodities());
    for k in &inst.commodities {
        let mut arcs = Vec::new();
        for arrival in 0..inst.horizon {
            if !in_cyclic_window(arrival, k.avail_period, k.deadline, inst.horizon) {
                continue;
            }
            for from in 0..n {
                for to in 0..n {
                    arcs.push(inst.arc_index(from, to, arrival));
                }
            }
        }
        if arcs.is_empty() {
            return Err(Error::ModelBuild("commodity has an empty delivery window"));
        }
        arcs.sort_unstable();
        per_k.push(arcs);
    }
    Ok(per_k)
}

/// Core assembly shared by the extensive form and the bundle subproblem:
/// design columns plus flow/outsourcing blocks for the given demand vectors.
///
/// `design_cost_scale` multiplies the arc fixed costs (1 for the extensive
/// form, the bundle probability for subproblems); `outsource_cost[pos]` is
/// the full objective coefficient of each outsourcing variable of that
/// scenario position (lambda times the scenario weight).
fn build_scenario_model(
    inst: &Instance,
    demands: &[&[f64]],
    outsource_cost: &[f64],
    design_cost_scale: f64,
) -> Result<(LinearProgram, ModelIndex)> {
    inst.validate()?;
    let n = inst.num_terminals;
    let horizon = inst.horizon;
    let num_k = inst.num_commodities();
    let num_design = inst.num_arcs();
    let allowed = allowed_arcs_per_commodity(inst)?;

    let positions = demands.len();
    let per_scenario_flows: usize = allowed.iter().map(|a| a.len()).sum();
    let mut flow_base = vec![vec![0usize; num_k]; positions];
    let mut next = num_design;
    for base in flow_base.iter_mut() {
        for (k, slot) in base.iter_mut().enumerate() {
            *slot = next;
            next += allowed[k].len();
        }
    }
    debug_assert_eq!(next, num_design + positions * per_scenario_flows);
    let outsource_base = next;
    let num_cols = outsource_base + positions * num_k;

    let index = ModelIndex {
        num_design,
        num_cols,
        num_commodities: num_k,
        allowed_arcs: allowed,
        flow_base,
        outsource_base,
    };

    let mut costs = vec![0.0; num_cols];
    for arc in 0..num_design {
        let a = inst.arc_of_index(arc);
        costs[arc] = design_cost_scale * inst.cost(a.from_terminal, a.to_terminal);
    }
    for pos in 0..positions {
        for k in 0..num_k {
            costs[index.outsource_col(pos, k)] = outsource_cost[pos];
        }
    }
    let mut lp = LinearProgram::minimize(costs);
    for arc in 0..num_design {
        lp.set_binary(arc);
    }

    // design balance: vehicles arriving at (i, t) equal vehicles leaving
    for i in 0..n {
        for t in 0..horizon {
            let t_next = (t + 1) % horizon;
            let mut coeffs = Vec::with_capacity(2 * n);
            for j in 0..n {
                coeffs.push((inst.arc_index(j, i, t), 1.0));
            }
            for j in 0..n {
                coeffs.push((inst.arc_index(i, j, t_next), -1.0));
            }
            lp.add_row(RowSense::Eq, 0.0, &coeffs);
        }
    }

    for (pos, demand) in demands.iter().enumerate() {
        if demand.len() != num_k {
            return Err(Error::ModelBuild("demand vector length differs from commodity count"));
        }
        add_capacity_rows(inst, &mut lp, &index, pos, |arc| Some(arc));
        add_conservation_rows(inst, &mut lp, &index, pos, demand)?;
    }

    Ok((lp, index))
}

/// Capacity rows (one per used non-holding arc): total commodity flow minus
/// `u` times the design column (or a fixed rhs when the design is frozen).
fn add_capacity_rows(
    inst: &Instance,
    lp: &mut LinearProgram,
    index: &ModelIndex,
    pos: usize,
    design_col: impl Fn(usize) -> Option<usize>,
) {
    let num_k = inst.num_commodities();
    for arc in 0..inst.num_arcs() {
        let a = inst.arc_of_index(arc);
        if a.is_holding {
            continue;
        }
        let mut coeffs: Vec<(usize, f64)> = Vec::new();
        for k in 0..num_k {
            if let Some(col) = index.flow_col(pos, k, arc) {
                coeffs.push((col, 1.0));
            }
        }
        if coeffs.is_empty() {
            continue; // no commodity can use this arc in this period
        }
        if let Some(x_col) = design_col(arc) {
            coeffs.push((x_col, -inst.capacity));
            lp.add_row(RowSense::Le, 0.0, &coeffs);
        }
    }
}

/// Flow conservation with outsourcing for one scenario position.
fn add_conservation_rows(
    inst: &Instance,
    lp: &mut LinearProgram,
    index: &ModelIndex,
    pos: usize,
    demand: &[f64],
) -> Result<()> {
    let n = inst.num_terminals;
    let horizon = inst.horizon;
    for (k, commodity) in inst.commodities.iter().enumerate() {
        for i in 0..n {
            for t in 0..horizon {
                let t_next = (t + 1) % horizon;
                let mut coeffs: Vec<(usize, f64)> = Vec::new();
                for j in 0..n {
                    if let Some(col) = index.flow_col(pos, k, inst.arc_index(i, j, t_next)) {
                        coeffs.push((col, 1.0));
                    }
                }
                for j in 0..n {
                    if let Some(col) = index.flow_col(pos, k, inst.arc_index(j, i, t)) {
                        coeffs.push((col, -1.0));
                    }
                }
                let supply = i == commodity.origin && t == commodity.avail_period;
                let sink = i == commodity.destination && t == commodity.deadline;
                let rhs = if supply {
                    coeffs.push((index.outsource_col(pos, k), 1.0));
                    demand[k]
                } else if sink {
                    coeffs.push((index.outsource_col(pos, k), -1.0));
                    -demand[k]
                } else {
                    if coeffs.is_empty() {
                        continue; // node untouched by this commodity's window
                    }
                    0.0
                };
                if supply && sink {
                    return Err(Error::ModelBuild("commodity origin equals destination"));
                }
                lp.add_row(RowSense::Eq, rhs, &coeffs);
            }
        }
    }
    Ok(())
}

/// The deterministic equivalent over the whole scenario set: design cost plus
/// probability-weighted outsourcing across every scenario.
pub fn build_extensive_form(
    inst: &Instance,
    scens: &ScenarioSet,
) -> Result<(LinearProgram, ModelIndex)> {
    scens.validate()?;
    if scens.num_commodities() != inst.num_commodities() {
        return Err(Error::ModelBuild("scenario set and instance disagree on commodities"));
    }
    let demands: Vec<&[f64]> = scens.scenarios.iter().map(|s| s.demand.as_slice()).collect();
    let z_costs: Vec<f64> =
        scens.scenarios.iter().map(|s| inst.outsourcing_cost * s.probability).collect();
    build_scenario_model(inst, &demands, &z_costs, 1.0)
}

/// Second-stage LP for one demand vector under a frozen (possibly
/// fractional) design: minimizes raw outsourced units. The caller scales by
/// the outsourcing cost.
///
/// Always feasible: outsourcing everything satisfies every constraint.
pub fn build_recourse_lp(inst: &Instance, design: &[f64], demand: &[f64]) -> Result<LinearProgram> {
    inst.validate()?;
    if design.len() != inst.num_arcs() {
        return Err(Error::ModelBuild("design vector length differs from arc count"));
    }
    if demand.len() != inst.num_commodities() {
        return Err(Error::ModelBuild("demand vector length differs from commodity count"));
    }
    let num_k = inst.num_commodities();
    let allowed_all = allowed_arcs_per_commodity(inst)?;
    // flow columns exist on holding arcs and on open movement arcs only
    let open = |arc: usize| -> bool {
        let a = inst.arc_of_index(arc);
        a.is_holding || design[arc] > 1e-9
    };
    let allowed: Vec<Vec<usize>> =
        allowed_all.iter().map(|arcs| arcs.iter().copied().filter(|&a| open(a)).collect()).collect();

    let mut flow_base = vec![vec![0usize; num_k]];
    let mut next = 0usize;
    for (k, slot) in flow_base[0].iter_mut().enumerate() {
        *slot = next;
        next += allowed[k].len();
    }
    let outsource_base = next;
    let index = ModelIndex {
        num_design: 0,
        num_cols: outsource_base + num_k,
        num_commodities: num_k,
        allowed_arcs: allowed,
        flow_base,
        outsource_base,
    };

    let mut costs = vec![0.0; index.num_cols];
    for k in 0..num_k {
        costs[index.outsource_col(0, k)] = 1.0;
    }
    let mut lp = LinearProgram::minimize(costs);

    // capacity of open movement arcs, with the design folded into the rhs
    for arc in 0..inst.num_arcs() {
        let a = inst.arc_of_index(arc);
        if a.is_holding || !open(arc) {
            continue;
        }
        let coeffs: Vec<(usize, f64)> =
            (0..num_k).filter_map(|k| index.flow_col(0, k, arc).map(|c| (c, 1.0))).collect();
        if coeffs.is_empty() {
            continue;
        }
        lp.add_row(RowSense::Le, inst.capacity * design[arc], &coeffs);
    }
    add_conservation_rows(inst, &mut lp, &index, 0, demand)?;
    Ok(lp)
}

/// One bundle's share of the decomposed objective: scaled design cost plus
/// reweighted outsourcing over the bundle's scenarios, without any
/// progressive-hedging terms. `members` and `reweighted_prob` are parallel.
pub fn build_bundle_lp(
    inst: &Instance,
    scens: &ScenarioSet,
    members: &[usize],
    reweighted_prob: &[f64],
    bundle_prob: f64,
) -> Result<(LinearProgram, ModelIndex)> {
    scens.validate()?;
    if members.is_empty() || members.len() != reweighted_prob.len() {
        return Err(Error::InvalidArgument("bundle members and probabilities must align"));
    }
    let demands: Vec<&[f64]> = members
        .iter()
        .map(|&s| {
            scens
                .scenarios
                .get(s)
                .map(|sc| sc.demand.as_slice())
                .ok_or(Error::InvalidArgument("bundle refers to an unknown scenario"))
        })
        .collect::<Result<_>>()?;
    let z_costs: Vec<f64> = reweighted_prob.iter().map(|q| inst.outsourcing_cost * q).collect();
    build_scenario_model(inst, &demands, &z_costs, bundle_prob)
}

/// Progressive-hedging data attached to one bundle's subproblem.
#[derive(Debug, Clone)]
pub struct SubproblemSpec {
    /// Scenario indices of the bundle.
    pub members: Vec<usize>,
    /// `q_s` for each member, aligned with `members`.
    pub reweighted_prob: Vec<f64>,
    pub bundle_prob: f64,
    /// Dual value per design column.
    pub duals: Vec<f64>,
    /// Consensus design per design column, entries in `[0, 1]`.
    pub consensus: Vec<f64>,
    /// Penalty factor, strictly positive.
    pub penalty: f64,
}

/// The augmented-Lagrangian subproblem for one bundle: the bundle objective
/// plus `w x` and the exact linearization of `(rho/2)(x - consensus)^2` over
/// binary `x`, which contributes `rho (1/2 - consensus)` per design column
/// and a constant `(rho/2) consensus^2` carried in the objective offset.
pub fn build_bundle_subproblem(
    inst: &Instance,
    spec: &SubproblemSpec,
    scens: &ScenarioSet,
) -> Result<(LinearProgram, ModelIndex)> {
    if !(spec.penalty > 0.0) {
        return Err(Error::InvalidArgument("penalty factor must be positive"));
    }
    let num_design = inst.num_arcs();
    if spec.duals.len() != num_design || spec.consensus.len() != num_design {
        return Err(Error::InvalidArgument("dual/consensus length differs from design count"));
    }
    if spec.consensus.iter().any(|x| !(-1e-9..=1.0 + 1e-9).contains(x)) {
        return Err(Error::InvalidArgument("consensus entries must lie in [0, 1]"));
    }
    let (mut lp, index) =
        build_bundle_lp(inst, scens, &spec.members, &spec.reweighted_prob, spec.bundle_prob)?;
    let mut offset = 0.0;
    for arc in 0..num_design {
        let xbar = spec.consensus[arc];
        let coeff = lp.cost(arc) + spec.duals[arc] + spec.penalty * (0.5 - xbar);
        lp.set_cost(arc, coeff);
        offset += 0.5 * spec.penalty * xbar * xbar;
    }
    lp.set_objective_offset(offset);
    Ok((lp, index))
}

/// Tangency points for the piecewise-linear quadratic penalty: a geometric
/// ladder of offsets around the consensus value (finest at `base_scale`,
/// doubling outward until the whole unit interval is covered). The chordal
/// gap between adjacent tangents stays a bounded fraction of the function
/// value at every distance, so the approximation never develops a weak tail
/// that would let iterates jump far from the consensus.
fn quadratic_tangents(xbar: f64, base_scale: f64) -> Vec<f64> {
    let base = base_scale.clamp(1e-7, 1e-2);
    let mut points = vec![0.0, 1.0, xbar];
    let mut offset = base;
    while offset < 2.0 {
        for t in [xbar - offset, xbar + offset] {
            if (0.0..=1.0).contains(&t) {
                points.push(t);
            }
        }
        offset *= 2.0;
    }
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    points
}

/// Relaxed-mode subproblem: binaries become continuous and the proximal term
/// stays genuinely quadratic, realized as an epigraph variable per design
/// column held down by tangent cuts of `(x - consensus)^2`. The binary
/// shortcut `x^2 = x` is exact only on 0/1 points, so the relaxation needs
/// this form for the proximal pull to survive.
pub fn build_bundle_subproblem_relaxed(
    inst: &Instance,
    spec: &SubproblemSpec,
    scens: &ScenarioSet,
    tangent_spacing: f64,
) -> Result<(LinearProgram, ModelIndex)> {
    if !(spec.penalty > 0.0) {
        return Err(Error::InvalidArgument("penalty factor must be positive"));
    }
    let num_design = inst.num_arcs();
    if spec.duals.len() != num_design || spec.consensus.len() != num_design {
        return Err(Error::InvalidArgument("dual/consensus length differs from design count"));
    }
    let (bundle_lp, index) =
        build_bundle_lp(inst, scens, &spec.members, &spec.reweighted_prob, spec.bundle_prob)?;
    let mut lp = bundle_lp.relaxed();
    for arc in 0..num_design {
        lp.set_cost(arc, lp.cost(arc) + spec.duals[arc]);
        let epigraph = lp.push_var(0.5 * spec.penalty, 0.0, f64::INFINITY);
        let xbar = spec.consensus[arc];
        for t in quadratic_tangents(xbar, tangent_spacing) {
            // q >= (t - xbar)^2 + 2 (t - xbar)(x - t)
            lp.add_row(
                RowSense::Ge,
                xbar * xbar - t * t,
                &[(epigraph, 1.0), (arc, -2.0 * (t - xbar))],
            );
        }
    }
    Ok((lp, index))
}

/// Fixes the design columns of a scenario model to the given 0/1 vector.
pub fn fix_design(lp: &mut LinearProgram, design: &[f64]) {
    for (arc, &x) in design.iter().enumerate() {
        lp.set_bounds(arc, x, x);
    }
}

/// Total fixed cost of a design.
pub fn design_cost(inst: &Instance, design: &[f64]) -> f64 {
    (0..inst.num_arcs())
        .map(|arc| {
            let a = inst.arc_of_index(arc);
            inst.cost(a.from_terminal, a.to_terminal) * design[arc]
        })
        .sum()
}

/// Largest violation of the design-balance equations by a design vector.
pub fn design_balance_violation(inst: &Instance, design: &[f64]) -> f64 {
    let n = inst.num_terminals;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for t in 0..inst.horizon {
            let t_next = (t + 1) % inst.horizon;
            let inflow: f64 = (0..n).map(|j| design[inst.arc_index(j, i, t)]).sum();
            let outflow: f64 = (0..n).map(|j| design[inst.arc_index(i, j, t_next)]).sum();
            worst = worst.max((inflow - outflow).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::NoClock;
    use crate::milp::{solve_lp, solve_milp, MilpOptions, Status};
    use crate::network::Commodity;
    use crate::scenarios::Scenario;

    fn two_terminal_instance() -> Instance {
        Instance {
            num_terminals: 2,
            horizon: 2,
            commodities: vec![Commodity {
                id: 0,
                origin: 0,
                avail_period: 0,
                destination: 1,
                deadline: 1,
            }],
            arc_cost: vec![1.0, 5.0, 5.0, 1.0],
            capacity: 12.0,
            outsourcing_cost: 80.0,
        }
    }

    fn single_scenario(demand: f64) -> ScenarioSet {
        ScenarioSet {
            scenarios: vec![Scenario { demand: vec![demand], probability: 1.0 }],
            seed: 0,
        }
    }

    #[test]
    fn extensive_form_dimensions() {
        let inst = two_terminal_instance();
        let (lp, index) = build_extensive_form(&inst, &single_scenario(8.0)).unwrap();
        assert_eq!(index.num_design, 8);
        assert_eq!(lp.num_binary(), 8);
        // only the single window period carries flow columns: 4 arcs
        assert_eq!(index.allowed_arcs(0).len(), 4);
    }

    #[test]
    fn zero_demand_opens_nothing() {
        let inst = two_terminal_instance();
        let (lp, _) = build_extensive_form(&inst, &single_scenario(0.0)).unwrap();
        let sol = solve_milp(&lp, &MilpOptions::default(), &NoClock).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!(sol.objective.abs() < 1e-9, "objective {}", sol.objective);
        assert!(sol.primal[..8].iter().all(|x| x.abs() < 1e-6));
    }

    #[test]
    fn outsourcing_absorbs_excess_demand() {
        let mut inst = two_terminal_instance();
        inst.capacity = 5.0;
        let (lp, index) = build_extensive_form(&inst, &single_scenario(50.0)).unwrap();
        let sol = solve_milp(&lp, &MilpOptions::default(), &NoClock).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        let z = sol.primal[index.outsource_col(0, 0)];
        assert!(z > 0.0, "expected outsourcing, got {z}");
    }

    #[test]
    fn solved_design_is_balanced() {
        let inst = two_terminal_instance();
        let (lp, _) = build_extensive_form(&inst, &single_scenario(8.0)).unwrap();
        let sol = solve_milp(&lp, &MilpOptions::default(), &NoClock).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!(design_balance_violation(&inst, &sol.primal[..8]) < 1e-6);
    }

    #[test]
    fn recourse_values() {
        let inst = two_terminal_instance();
        let zeros = vec![0.0; 8];
        // everything outsourced under the empty design
        let lp = build_recourse_lp(&inst, &zeros, &[7.5]).unwrap();
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective - 7.5).abs() < 1e-9);

        // a balanced design with the direct arc open ships everything
        let mut design = vec![0.0; 8];
        design[inst.arc_index(0, 1, 1)] = 1.0;
        design[inst.arc_index(1, 0, 0)] = 1.0;
        let lp = build_recourse_lp(&inst, &design, &[7.5]).unwrap();
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective - 0.0).abs() < 1e-9, "objective {}", sol.objective);

        // capacity-limited: u = 12, d = 15 leaves 3 units outsourced
        let lp = build_recourse_lp(&inst, &design, &[15.0]).unwrap();
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective - 3.0).abs() < 1e-9, "objective {}", sol.objective);
    }

    #[test]
    fn proximal_linearization_is_exact_on_binaries() {
        let inst = two_terminal_instance();
        let scens = single_scenario(8.0);
        let rho = 1.7;
        let consensus = vec![0.25; 8];
        let spec = SubproblemSpec {
            members: vec![0],
            reweighted_prob: vec![1.0],
            bundle_prob: 1.0,
            duals: vec![0.0; 8],
            consensus: consensus.clone(),
            penalty: rho,
        };
        let (aug, _) = build_bundle_subproblem(&inst, &spec, &scens).unwrap();
        let (plain, _) = build_bundle_lp(&inst, &scens, &[0], &[1.0], 1.0).unwrap();
        // at every binary design the linearized objective equals
        // plain + (rho/2) * sum (x - consensus)^2
        for mask in 0..256u32 {
            let design: Vec<f64> = (0..8).map(|a| ((mask >> a) & 1) as f64).collect();
            let mut aug_fixed = aug.clone();
            fix_design(&mut aug_fixed, &design);
            let mut plain_fixed = plain.clone();
            fix_design(&mut plain_fixed, &design);
            let aug_sol = solve_lp(&aug_fixed.relaxed()).unwrap();
            let plain_sol = solve_lp(&plain_fixed.relaxed()).unwrap();
            assert_eq!(aug_sol.status, plain_sol.status, "mask {mask}");
            if plain_sol.status != Status::Optimal {
                continue; // unbalanced designs are infeasible in both models
            }
            let penalty: f64 =
                design.iter().zip(&consensus).map(|(x, c)| 0.5 * rho * (x - c) * (x - c)).sum();
            assert!(
                (aug_sol.objective - (plain_sol.objective + penalty)).abs() < 1e-9,
                "mask {mask}: {} vs {}",
                aug_sol.objective,
                plain_sol.objective + penalty
            );
        }
    }

    #[test]
    fn subproblem_rejects_bad_penalty() {
        let inst = two_terminal_instance();
        let scens = single_scenario(8.0);
        let spec = SubproblemSpec {
            members: vec![0],
            reweighted_prob: vec![1.0],
            bundle_prob: 1.0,
            duals: vec![0.0; 8],
            consensus: vec![0.0; 8],
            penalty: 0.0,
        };
        assert!(build_bundle_subproblem(&inst, &spec, &scens).is_err());
    }

    #[test]
    fn singleton_bundle_matches_deterministic_model() {
        let inst = two_terminal_instance();
        let scens = single_scenario(9.0);
        let (extensive, _) = build_extensive_form(&inst, &scens).unwrap();
        let (bundle, _) = build_bundle_lp(&inst, &scens, &[0], &[1.0], 1.0).unwrap();
        let a = solve_milp(&extensive, &MilpOptions::default(), &NoClock).unwrap();
        let b = solve_milp(&bundle, &MilpOptions::default(), &NoClock).unwrap();
        assert!((a.objective - b.objective).abs() < 1e-9);
    }
}
