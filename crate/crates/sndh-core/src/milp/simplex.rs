//! Bounded-variable revised simplex.
//!
//! One engine serves three entry points: a two-phase primal solve from
//! scratch (artificial variables form the initial basis wherever a slack
//! cannot), a primal re-optimization from a dual-infeasible but
//! primal-feasible basis, and a dual simplex used by branch and bound to
//! recover primal feasibility after variable bounds change.
//!
//! The basis inverse is kept as the LU factorization of the last
//! refactorization plus a product-form eta file; the file is folded back into
//! a fresh factorization on a fixed cadence. Pricing is Dantzig with a
//! fall-back to Bland's rule after a run of degenerate steps.

use alloc::vec;
use alloc::vec::Vec;

use super::lp::{LinearProgram, RowSense};
use super::lu::{ColumnEntries, LuFactors};
use crate::error::{Error, Result};

/// Primal feasibility tolerance on variable bounds and row activity.
pub(crate) const FEAS_TOL: f64 = 1e-7;
/// Dual feasibility tolerance on reduced costs.
pub(crate) const OPT_TOL: f64 = 1e-9;
/// Entries smaller than this never pivot.
const PIVOT_SKIP: f64 = 1e-10;
/// Consecutive degenerate steps before Bland's rule engages.
const STALL_LIMIT: usize = 80;
/// Consecutive degenerate steps before costs are perturbed.
const PERTURB_LIMIT: usize = 500;
/// Pivots below this magnitude are taken only when nothing better blocks.
const PIVOT_GOOD: f64 = 1e-7;
/// Eta columns accumulated before a refactorization.
const REFACTOR_EVERY: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic with both bounds infinite; rests at zero.
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpOutcome {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Snapshot sufficient to reconstruct a basis (used by branch and bound).
#[derive(Clone)]
pub(crate) struct BasisSnapshot {
    basis: Vec<u32>,
    status: Vec<VarStatus>,
}

struct Csc {
    ptr: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
}

impl Csc {
    #[inline]
    fn col(&self, j: usize) -> (&[usize], &[f64]) {
        let range = self.ptr[j]..self.ptr[j + 1];
        (&self.idx[range.clone()], &self.val[range])
    }
}

struct EtaFile {
    /// Pivot slot per eta column.
    slots: Vec<usize>,
    ptr: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
}

impl EtaFile {
    fn new() -> EtaFile {
        EtaFile { slots: Vec::new(), ptr: vec![0], idx: Vec::new(), val: Vec::new() }
    }

    fn clear(&mut self) {
        self.slots.clear();
        self.ptr.clear();
        self.ptr.push(0);
        self.idx.clear();
        self.val.clear();
    }

    fn len(&self) -> usize {
        self.slots.len()
    }

    /// Records the scaled eta column for a pivot on `slot` with FTRAN column
    /// `w` (nonzeros listed in `pattern`).
    fn push(&mut self, slot: usize, w: &[f64], pattern: &[usize]) {
        let pivot = w[slot];
        for &i in pattern {
            let v = if i == slot { (w[i] - 1.0) / pivot } else { w[i] / pivot };
            if v != 0.0 {
                self.idx.push(i);
                self.val.push(v);
            }
        }
        self.slots.push(slot);
        self.ptr.push(self.idx.len());
    }

    /// In-place `E_1^-1 ... E_k^-1 x` (application after the LU solve).
    fn apply_forward(&self, x: &mut [f64]) {
        for e in 0..self.slots.len() {
            let xr = x[self.slots[e]];
            if xr != 0.0 {
                for p in self.ptr[e]..self.ptr[e + 1] {
                    x[self.idx[p]] -= self.val[p] * xr;
                }
            }
        }
    }

    /// In-place transposed application in reverse order (before the LU
    /// transpose solve).
    fn apply_transposed(&self, x: &mut [f64]) {
        for e in (0..self.slots.len()).rev() {
            let mut acc = 0.0;
            for p in self.ptr[e]..self.ptr[e + 1] {
                acc += self.val[p] * x[self.idx[p]];
            }
            x[self.slots[e]] -= acc;
        }
    }
}

/// Aggregate iteration counters, exposed for tests and tuning.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub primal_iterations: usize,
    pub dual_iterations: usize,
    pub refactorizations: usize,
}

pub(crate) struct Simplex {
    m: usize,
    /// Structural variable count (the LP's own columns).
    n_struct: usize,
    /// Structural + slack count; artificials live past this index.
    n_real: usize,
    csc: Csc,
    cost: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rhs: Vec<f64>,
    art_sign: Vec<f64>,

    basis: Vec<usize>,
    slot_of: Vec<usize>,
    status: Vec<VarStatus>,
    xb: Vec<f64>,

    lu: LuFactors,
    etas: EtaFile,

    // scratch buffers
    w: Vec<f64>,
    w_pattern: Vec<usize>,
    z: Vec<f64>,
    z_row: Vec<f64>,
    scratch: Vec<f64>,
    rhs_work: Vec<f64>,

    bland: bool,
    stall: usize,
    bland_entry_obj: f64,
    /// True costs, saved while an anti-degeneracy perturbation is active.
    saved_costs: Option<Vec<f64>>,
    pub(crate) stats: SolveStats,
}

const NO_SLOT: usize = usize::MAX;

impl Simplex {
    /// Builds the solver state for a validated program. Binary variables are
    /// treated as their continuous relaxation; branch and bound drives
    /// integrality through bound fixing.
    pub(crate) fn new(lp: &LinearProgram) -> Result<Simplex> {
        lp.validate()?;
        let m = lp.num_rows();
        let n_struct = lp.num_vars();
        let n_real = n_struct + m;
        let n_all = n_real + m;

        // CSC over structural columns then unit slack columns
        let mut triples: Vec<(usize, usize, f64)> =
            lp.entries().iter().map(|&(r, c, v)| (c, r, v)).collect();
        triples.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut ptr = Vec::with_capacity(n_real + 1);
        let mut idx = Vec::with_capacity(triples.len() + m);
        let mut val = Vec::with_capacity(triples.len() + m);
        ptr.push(0);
        let mut t = 0;
        for j in 0..n_struct {
            while t < triples.len() && triples[t].0 == j {
                idx.push(triples[t].1);
                val.push(triples[t].2);
                t += 1;
            }
            ptr.push(idx.len());
        }
        for row in 0..m {
            idx.push(row);
            val.push(1.0);
            ptr.push(idx.len());
        }

        let mut cost = vec![0.0; n_all];
        let mut lower = vec![0.0; n_all];
        let mut upper = vec![0.0; n_all];
        for v in 0..n_struct {
            cost[v] = lp.cost(v);
            let (lo, up) = lp.bounds(v);
            lower[v] = lo;
            upper[v] = up;
        }
        for row in 0..m {
            let (lo, up) = match lp.row_sense(row) {
                RowSense::Le => (0.0, f64::INFINITY),
                RowSense::Ge => (f64::NEG_INFINITY, 0.0),
                RowSense::Eq => (0.0, 0.0),
            };
            lower[n_struct + row] = lo;
            upper[n_struct + row] = up;
            // artificials start fixed; init_basis opens the ones it uses
            lower[n_real + row] = 0.0;
            upper[n_real + row] = 0.0;
        }

        let rhs: Vec<f64> = (0..m).map(|r| lp.rhs(r)).collect();
        let lu = LuFactors::factorize(0, |_| ColumnEntries::Unit(0, 1.0))?;

        Ok(Simplex {
            m,
            n_struct,
            n_real,
            csc: Csc { ptr, idx, val },
            cost,
            lower,
            upper,
            rhs,
            art_sign: vec![1.0; m],
            basis: Vec::new(),
            slot_of: vec![NO_SLOT; n_all],
            status: vec![VarStatus::AtLower; n_all],
            xb: vec![0.0; m],
            lu,
            etas: EtaFile::new(),
            w: vec![0.0; m],
            w_pattern: Vec::new(),
            z: vec![0.0; m],
            z_row: vec![0.0; m],
            scratch: vec![0.0; m],
            rhs_work: vec![0.0; m],
            bland: false,
            stall: 0,
            bland_entry_obj: f64::INFINITY,
            saved_costs: None,
            stats: SolveStats::default(),
        })
    }

    fn column(&self, var: usize) -> ColumnEntries<'_> {
        if var < self.n_real {
            let (idx, val) = self.csc.col(var);
            ColumnEntries::Sparse(idx, val)
        } else {
            ColumnEntries::Unit(var - self.n_real, self.art_sign[var - self.n_real])
        }
    }

    fn col_dot(&self, var: usize, dense_by_row: &[f64]) -> f64 {
        if var < self.n_real {
            let (idx, val) = self.csc.col(var);
            idx.iter().zip(val).map(|(&r, &v)| v * dense_by_row[r]).sum()
        } else {
            self.art_sign[var - self.n_real] * dense_by_row[var - self.n_real]
        }
    }

    fn nonbasic_value(&self, var: usize) -> f64 {
        match self.status[var] {
            VarStatus::AtLower => self.lower[var],
            VarStatus::AtUpper => self.upper[var],
            VarStatus::Free => 0.0,
            VarStatus::Basic => unreachable!("basic variable has no resting value"),
        }
    }

    pub(crate) fn value_of(&self, var: usize) -> f64 {
        if self.status[var] == VarStatus::Basic {
            self.xb[self.slot_of[var]]
        } else {
            self.nonbasic_value(var)
        }
    }

    /// Objective over the structural variables plus slacks (slack costs are
    /// zero; artificials only matter in phase one).
    pub(crate) fn objective(&self) -> f64 {
        let mut total = 0.0;
        for (slot, &var) in self.basis.iter().enumerate() {
            total += self.cost[var] * self.xb[slot];
        }
        for var in 0..self.cost.len() {
            if self.status[var] != VarStatus::Basic && self.cost[var] != 0.0 {
                total += self.cost[var] * self.nonbasic_value(var);
            }
        }
        total
    }

    pub(crate) fn primal_point(&self, out: &mut Vec<f64>) {
        out.clear();
        out.extend((0..self.n_struct).map(|v| self.value_of(v)));
    }

    pub(crate) fn set_var_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
        // a nonbasic variable must rest on a finite bound
        self.status[var] = match self.status[var] {
            VarStatus::Basic => VarStatus::Basic,
            VarStatus::AtLower if lower.is_finite() => VarStatus::AtLower,
            VarStatus::AtUpper if upper.is_finite() => VarStatus::AtUpper,
            _ if lower.is_finite() => VarStatus::AtLower,
            _ if upper.is_finite() => VarStatus::AtUpper,
            _ => VarStatus::Free,
        };
    }

    pub(crate) fn snapshot(&self) -> BasisSnapshot {
        BasisSnapshot {
            basis: self.basis.iter().map(|&v| v as u32).collect(),
            status: self.status.clone(),
        }
    }

    pub(crate) fn restore(&mut self, snap: &BasisSnapshot) -> Result<()> {
        self.basis = snap.basis.iter().map(|&v| v as usize).collect();
        self.status = snap.status.clone();
        for s in self.slot_of.iter_mut() {
            *s = NO_SLOT;
        }
        for (slot, &var) in self.basis.iter().enumerate() {
            self.slot_of[var] = slot;
        }
        self.refactorize()
    }

    /// Puts every variable at a bound, installs slack/artificial columns as
    /// the starting basis, and returns whether any artificial was needed.
    fn init_basis(&mut self) -> Result<bool> {
        let n_all = self.cost.len();
        for var in 0..n_all {
            self.slot_of[var] = NO_SLOT;
            self.status[var] = if self.lower[var].is_finite() {
                VarStatus::AtLower
            } else if self.upper[var].is_finite() {
                VarStatus::AtUpper
            } else {
                VarStatus::Free
            };
        }
        for row in 0..self.m {
            self.lower[self.n_real + row] = 0.0;
            self.upper[self.n_real + row] = 0.0;
        }

        // residual once every structural variable sits at its bound
        let mut residual = self.rhs.clone();
        for var in 0..self.n_struct {
            let x = self.nonbasic_value(var);
            if x != 0.0 {
                let (idx, val) = self.csc.col(var);
                for (&r, &v) in idx.iter().zip(val) {
                    residual[r] -= v * x;
                }
            }
        }

        self.basis.clear();
        let mut need_phase_one = false;
        for row in 0..self.m {
            let slack = self.n_struct + row;
            let fits = residual[row] >= self.lower[slack] - FEAS_TOL
                && residual[row] <= self.upper[slack] + FEAS_TOL;
            let chosen = if fits {
                self.xb[row] = residual[row];
                slack
            } else {
                let art = self.n_real + row;
                self.art_sign[row] = if residual[row] >= 0.0 { 1.0 } else { -1.0 };
                self.lower[art] = 0.0;
                self.upper[art] = f64::INFINITY;
                self.xb[row] = residual[row].abs();
                // the slack stays nonbasic at the bound nearest the residual
                self.status[slack] = if residual[row] > self.upper[slack] {
                    VarStatus::AtUpper
                } else {
                    VarStatus::AtLower
                };
                if !self.upper[slack].is_finite() {
                    self.status[slack] = VarStatus::AtLower;
                }
                if !self.lower[slack].is_finite() && self.status[slack] == VarStatus::AtLower {
                    self.status[slack] = VarStatus::AtUpper;
                }
                need_phase_one = true;
                art
            };
            self.basis.push(chosen);
            self.slot_of[chosen] = row;
            self.status[chosen] = VarStatus::Basic;
        }
        self.refactorize()?;
        // slack residuals may sit slightly outside relaxed bounds
        self.recompute_xb();
        Ok(need_phase_one)
    }

    fn refactorize(&mut self) -> Result<()> {
        let basis = &self.basis;
        let csc = &self.csc;
        let n_real = self.n_real;
        let art_sign = &self.art_sign;
        self.lu = LuFactors::factorize(self.m, |slot| {
            let var = basis[slot];
            if var < n_real {
                let range = csc.ptr[var]..csc.ptr[var + 1];
                ColumnEntries::Sparse(&csc.idx[range.clone()], &csc.val[range])
            } else {
                ColumnEntries::Unit(var - n_real, art_sign[var - n_real])
            }
        })?;
        self.etas.clear();
        self.stats.refactorizations += 1;
        Ok(())
    }

    /// Recomputes the basic values from the bounds of every nonbasic
    /// variable (used after refactorization or bound edits).
    pub(crate) fn recompute_xb(&mut self) {
        let mut rhs_work = core::mem::take(&mut self.rhs_work);
        rhs_work.copy_from_slice(&self.rhs);
        for var in 0..self.cost.len() {
            if self.status[var] == VarStatus::Basic {
                continue;
            }
            let x = self.nonbasic_value(var);
            if x != 0.0 {
                match self.column(var) {
                    ColumnEntries::Sparse(idx, val) => {
                        for (&r, &v) in idx.iter().zip(val) {
                            rhs_work[r] -= v * x;
                        }
                    }
                    ColumnEntries::Unit(r, v) => rhs_work[r] -= v * x,
                }
            }
        }
        self.lu.solve(&rhs_work, &mut self.xb, &mut self.scratch);
        self.rhs_work = rhs_work;
        self.etas.apply_forward(&mut self.xb);
    }

    /// `w = B^-1 A_var`; fills `self.w` and its nonzero pattern.
    fn ftran(&mut self, var: usize) {
        let mut rhs_work = core::mem::take(&mut self.rhs_work);
        for v in rhs_work.iter_mut() {
            *v = 0.0;
        }
        match self.column(var) {
            ColumnEntries::Sparse(idx, val) => {
                for (&r, &v) in idx.iter().zip(val) {
                    rhs_work[r] = v;
                }
            }
            ColumnEntries::Unit(r, v) => rhs_work[r] = v,
        }
        self.lu.solve(&rhs_work, &mut self.w, &mut self.scratch);
        self.rhs_work = rhs_work;
        self.etas.apply_forward(&mut self.w);
        self.w_pattern.clear();
        for i in 0..self.m {
            if self.w[i].abs() > PIVOT_SKIP {
                self.w_pattern.push(i);
            } else {
                self.w[i] = 0.0;
            }
        }
    }

    /// `z = B^-T c_B` (dual values by row); fills `self.z`.
    fn btran_costs(&mut self) {
        for slot in 0..self.m {
            self.rhs_work[slot] = self.cost[self.basis[slot]];
        }
        let mut rhs_work = core::mem::take(&mut self.rhs_work);
        self.etas.apply_transposed(&mut rhs_work);
        self.lu.solve_transposed(&rhs_work, &mut self.z, &mut self.scratch);
        self.rhs_work = rhs_work;
    }

    /// `rho = B^-T e_slot` (by row); fills `self.z_row`.
    fn btran_unit(&mut self, slot: usize) {
        for i in 0..self.m {
            self.rhs_work[i] = 0.0;
        }
        self.rhs_work[slot] = 1.0;
        let mut rhs_work = core::mem::take(&mut self.rhs_work);
        self.etas.apply_transposed(&mut rhs_work);
        self.lu.solve_transposed(&rhs_work, &mut self.z_row, &mut self.scratch);
        self.rhs_work = rhs_work;
    }

    fn reduced_cost(&self, var: usize) -> f64 {
        self.cost[var] - self.col_dot(var, &self.z)
    }

    #[inline]
    fn is_fixed(&self, var: usize) -> bool {
        self.lower[var] == self.upper[var]
    }

    /// Dantzig (or Bland) pricing. Returns `(var, direction)` where the
    /// direction is +1 when the variable increases off its bound.
    fn price(&mut self) -> Option<(usize, f64)> {
        self.btran_costs();
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = OPT_TOL;
        for var in 0..self.cost.len() {
            if self.status[var] == VarStatus::Basic || self.is_fixed(var) {
                continue;
            }
            let d = self.reduced_cost(var);
            let (score, dir) = match self.status[var] {
                VarStatus::AtLower => (-d, 1.0),
                VarStatus::AtUpper => (d, -1.0),
                VarStatus::Free => (d.abs(), if d > 0.0 { -1.0 } else { 1.0 }),
                VarStatus::Basic => unreachable!(),
            };
            if score > best_score {
                if self.bland {
                    return Some((var, dir));
                }
                best_score = score;
                best = Some((var, dir));
            }
        }
        best
    }

    /// Two-pass ratio test for entering `var` moving in `dir`.
    /// Returns the step and the blocking slot (`None` for a bound flip), or
    /// `Err(())` when the ray is unbounded.
    fn ratio_test(&self, var: usize, dir: f64) -> core::result::Result<(f64, Option<(usize, bool)>), ()> {
        let span = self.upper[var] - self.lower[var];
        let mut limit = span; // may be infinite
        for &i in &self.w_pattern {
            let drop = dir * self.w[i];
            let bv = self.basis[i];
            let ratio = if drop > PIVOT_SKIP {
                if self.lower[bv].is_finite() {
                    (self.xb[i] - self.lower[bv] + FEAS_TOL) / drop
                } else {
                    continue;
                }
            } else if drop < -PIVOT_SKIP {
                if self.upper[bv].is_finite() {
                    (self.xb[i] - self.upper[bv] - FEAS_TOL) / drop
                } else {
                    continue;
                }
            } else {
                continue;
            };
            if ratio < limit {
                limit = ratio;
            }
        }
        if limit.is_infinite() {
            return Err(());
        }
        // a basic variable already past its relaxed bound still blocks at a
        // zero-length step
        let limit = limit.max(0.0);

        // second pass: among blockers within the relaxed limit choose the
        // largest pivot element for stability (Bland: lowest variable index)
        let mut chosen: Option<(usize, bool, f64, f64)> = None; // slot, to_upper, strict ratio, |pivot|
        for &i in &self.w_pattern {
            let drop = dir * self.w[i];
            let bv = self.basis[i];
            let (strict, to_upper) = if drop > PIVOT_SKIP {
                if !self.lower[bv].is_finite() {
                    continue;
                }
                ((self.xb[i] - self.lower[bv]) / drop, false)
            } else if drop < -PIVOT_SKIP {
                if !self.upper[bv].is_finite() {
                    continue;
                }
                ((self.xb[i] - self.upper[bv]) / drop, true)
            } else {
                continue;
            };
            if strict > limit {
                continue;
            }
            let mag = self.w[i].abs();
            let better = match &chosen {
                None => true,
                Some((slot, _, _, best_mag)) => {
                    if self.bland {
                        // Bland wants the lowest eligible index, but pivots
                        // below the quality floor corrupt the basis; prefer
                        // any usable pivot over a tiny one
                        if (mag >= PIVOT_GOOD) != (*best_mag >= PIVOT_GOOD) {
                            mag >= PIVOT_GOOD
                        } else {
                            self.basis[i] < self.basis[*slot]
                        }
                    } else {
                        mag > *best_mag + 1e-12
                            || (mag > *best_mag - 1e-12 && self.basis[i] < self.basis[*slot])
                    }
                }
            };
            if better {
                chosen = Some((i, to_upper, strict, mag));
            }
        }

        match chosen {
            Some((slot, to_upper, strict, _)) if span > strict => {
                Ok((strict.max(0.0), Some((slot, to_upper))))
            }
            _ if span.is_finite() => Ok((span, None)),
            Some((slot, to_upper, strict, _)) => Ok((strict.max(0.0), Some((slot, to_upper)))),
            None => Err(()),
        }
    }

    fn apply_step(&mut self, var: usize, dir: f64, theta: f64, blocking: Option<(usize, bool)>) -> Result<()> {
        for &i in &self.w_pattern {
            self.xb[i] -= theta * dir * self.w[i];
        }
        match blocking {
            None => {
                // bound flip
                self.status[var] = match self.status[var] {
                    VarStatus::AtLower => VarStatus::AtUpper,
                    VarStatus::AtUpper => VarStatus::AtLower,
                    other => other,
                };
                Ok(())
            }
            Some((slot, to_upper)) => {
                let leaving = self.basis[slot];
                let entering_value = self.nonbasic_value(var) + dir * theta;
                self.status[leaving] = if to_upper { VarStatus::AtUpper } else { VarStatus::AtLower };
                self.slot_of[leaving] = NO_SLOT;
                if leaving >= self.n_real {
                    // artificials never come back
                    self.lower[leaving] = 0.0;
                    self.upper[leaving] = 0.0;
                    self.status[leaving] = VarStatus::AtLower;
                }
                self.basis[slot] = var;
                self.slot_of[var] = slot;
                self.status[var] = VarStatus::Basic;
                self.xb[slot] = entering_value;
                if self.etas.len() + 1 >= REFACTOR_EVERY {
                    self.refactorize()?;
                    self.recompute_xb();
                } else {
                    self.etas.push(slot, &self.w, &self.w_pattern);
                }
                Ok(())
            }
        }
    }

    fn note_progress(&mut self, theta: f64) {
        if theta > 1e-9 {
            self.stall = 0;
            if self.bland && self.objective() < self.bland_entry_obj - 1e-9 {
                self.bland = false;
            }
        } else {
            self.stall += 1;
            if self.stall > STALL_LIMIT && !self.bland {
                self.bland = true;
                self.bland_entry_obj = self.objective();
            }
        }
    }

    /// Deterministic anti-degeneracy shift: each cost moves by a tiny
    /// index-keyed amount, breaking the ties that cause long stall runs. The
    /// true costs come back via `restore_costs`.
    fn perturb_costs(&mut self) {
        if self.saved_costs.is_some() {
            return;
        }
        self.saved_costs = Some(self.cost.clone());
        for (j, c) in self.cost.iter_mut().enumerate() {
            let key = (j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let noise = (key >> 11) as f64 / (1u64 << 53) as f64; // in [0, 1)
            *c += (1e-7 + 1e-6 * noise) * (1.0 + c.abs());
        }
        self.bland = false;
        self.stall = 0;
    }

    /// Undoes `perturb_costs`; returns true when a perturbation was active.
    fn restore_costs(&mut self) -> bool {
        match self.saved_costs.take() {
            Some(costs) => {
                self.cost = costs;
                self.bland = false;
                self.stall = 0;
                true
            }
            None => false,
        }
    }

    fn iteration_cap(&self) -> usize {
        20_000 + 60 * (self.m + self.n_real)
    }

    /// Primal simplex on the current costs until optimality. In phase one,
    /// `stop_at_zero` ends the loop as soon as no artificial carries value,
    /// skipping the degenerate tail of the artificial objective.
    fn run_primal(&mut self, stop_at_zero: bool) -> Result<LpOutcome> {
        self.bland = false;
        self.stall = 0;
        let cap = self.iteration_cap();
        for it in 0..cap {
            if it % 2000 == 0 && std::env::var("SNDH_DIAG").is_ok() {
                eprintln!(
                    "  primal it={it} obj={:.6} stall={} bland={} perturbed={} etas={}",
                    self.objective(),
                    self.stall,
                    self.bland,
                    self.saved_costs.is_some(),
                    self.etas.len(),
                );
            }
            if stop_at_zero && self.phase_one_infeasibility() <= 1e-10 {
                self.restore_costs();
                return Ok(LpOutcome::Optimal);
            }
            let Some((var, dir)) = self.price() else {
                if self.restore_costs() {
                    continue; // reprice against the true costs
                }
                return Ok(LpOutcome::Optimal);
            };
            self.ftran(var);
            match self.ratio_test(var, dir) {
                Ok((theta, blocking)) => {
                    self.apply_step(var, dir, theta, blocking)?;
                    self.note_progress(theta);
                    self.stats.primal_iterations += 1;
                    if self.stall > PERTURB_LIMIT {
                        self.perturb_costs();
                    }
                }
                Err(()) => {
                    if self.restore_costs() {
                        continue;
                    }
                    return Ok(LpOutcome::Unbounded);
                }
            }
        }
        self.restore_costs();
        Err(Error::Internal("primal simplex exceeded its iteration cap"))
    }

    fn phase_one_infeasibility(&self) -> f64 {
        self.basis
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >= self.n_real)
            .map(|(slot, _)| self.xb[slot].max(0.0))
            .sum()
    }

    /// Full two-phase primal solve from a fresh basis.
    pub(crate) fn solve_from_scratch(&mut self) -> Result<LpOutcome> {
        let needs_artificials = self.init_basis()?;
        if needs_artificials {
            let saved: Vec<f64> = self.cost.clone();
            for c in self.cost.iter_mut() {
                *c = 0.0;
            }
            for row in 0..self.m {
                self.cost[self.n_real + row] = 1.0;
            }
            let outcome = self.run_primal(true)?;
            if outcome == LpOutcome::Unbounded {
                return Err(Error::Internal("phase one cannot be unbounded"));
            }
            let infeasibility = self.phase_one_infeasibility();
            self.cost = saved;
            for row in 0..self.m {
                self.lower[self.n_real + row] = 0.0;
                self.upper[self.n_real + row] = 0.0;
            }
            if infeasibility > FEAS_TOL {
                return Ok(LpOutcome::Infeasible);
            }
        }
        self.run_primal(false)
    }

    /// Dual simplex: restores primal feasibility after bound changes while
    /// keeping reduced costs feasible. The caller guarantees the incoming
    /// basis was optimal for these costs.
    pub(crate) fn resolve_dual(&mut self) -> Result<LpOutcome> {
        let cap = self.iteration_cap();
        let mut bland = false;
        let mut stall = 0usize;
        for _ in 0..cap {
            // most violated basic variable leaves
            let mut slot = NO_SLOT;
            let mut worst = FEAS_TOL;
            for i in 0..self.m {
                let bv = self.basis[i];
                let below = self.lower[bv] - self.xb[i];
                let above = self.xb[i] - self.upper[bv];
                let viol = below.max(above);
                if viol > worst {
                    worst = viol;
                    slot = i;
                }
            }
            if slot == NO_SLOT {
                return Ok(LpOutcome::Optimal);
            }
            let leaving = self.basis[slot];
            let below = self.xb[slot] < self.lower[leaving];
            // tau: required change direction of xb[slot]
            let tau = if below { 1.0 } else { -1.0 };

            self.btran_costs();
            self.btran_unit(slot);

            let mut entering: Option<(usize, f64, f64)> = None; // var, alpha, ratio
            for var in 0..self.cost.len() {
                if self.status[var] == VarStatus::Basic || self.is_fixed(var) {
                    continue;
                }
                let alpha = self.col_dot(var, &self.z_row);
                if alpha.abs() <= PIVOT_SKIP {
                    continue;
                }
                // moving var by delta changes xb[slot] by -alpha * delta
                let helps = match self.status[var] {
                    VarStatus::AtLower => -alpha * tau > 0.0,
                    VarStatus::AtUpper => alpha * tau > 0.0,
                    VarStatus::Free => true,
                    VarStatus::Basic => unreachable!(),
                };
                if !helps {
                    continue;
                }
                let d = self.cost[var] - self.col_dot(var, &self.z);
                let ratio = (d / alpha).abs();
                let better = match &entering {
                    None => true,
                    Some((cur, cur_alpha, cur_ratio)) => {
                        if bland {
                            var < *cur
                        } else {
                            ratio < cur_ratio - OPT_TOL
                                || (ratio < cur_ratio + OPT_TOL
                                    && (alpha.abs() > cur_alpha.abs() + 1e-12
                                        || (alpha.abs() > cur_alpha.abs() - 1e-12 && var < *cur)))
                        }
                    }
                };
                if better {
                    entering = Some((var, alpha, ratio));
                }
            }
            let Some((var, _alpha, _)) = entering else {
                return Ok(LpOutcome::Infeasible);
            };

            self.ftran(var);
            let w_slot = self.w[slot];
            if w_slot.abs() <= PIVOT_SKIP {
                // numerical disagreement between the row and column views
                self.refactorize()?;
                self.recompute_xb();
                continue;
            }
            let target = if below { self.lower[leaving] } else { self.upper[leaving] };
            // entering moves by sigma*theta with xb[slot] -> target
            let sigma = match self.status[var] {
                VarStatus::AtLower => 1.0,
                VarStatus::AtUpper => -1.0,
                VarStatus::Free => {
                    if (self.xb[slot] - target) / w_slot > 0.0 {
                        1.0
                    } else {
                        -1.0
                    }
                }
                VarStatus::Basic => unreachable!(),
            };
            let theta = (self.xb[slot] - target) / (sigma * w_slot);
            if theta < -FEAS_TOL {
                // wrong-signed step indicates stale numerics: rebuild
                self.refactorize()?;
                self.recompute_xb();
                continue;
            }
            let theta = theta.max(0.0);
            for &i in &self.w_pattern {
                self.xb[i] -= theta * sigma * self.w[i];
            }
            let entering_value = self.nonbasic_value(var) + sigma * theta;
            self.status[leaving] = if below { VarStatus::AtLower } else { VarStatus::AtUpper };
            self.slot_of[leaving] = NO_SLOT;
            if leaving >= self.n_real {
                self.lower[leaving] = 0.0;
                self.upper[leaving] = 0.0;
                self.status[leaving] = VarStatus::AtLower;
            }
            self.basis[slot] = var;
            self.slot_of[var] = slot;
            self.status[var] = VarStatus::Basic;
            self.xb[slot] = entering_value;
            if self.etas.len() + 1 >= REFACTOR_EVERY {
                self.refactorize()?;
                self.recompute_xb();
            } else {
                self.etas.push(slot, &self.w, &self.w_pattern);
            }
            self.stats.dual_iterations += 1;
            if theta > 1e-9 {
                stall = 0;
                bland = false;
            } else {
                stall += 1;
                if stall > STALL_LIMIT {
                    bland = true;
                }
            }
        }
        Err(Error::Internal("dual simplex exceeded its iteration cap"))
    }
}
