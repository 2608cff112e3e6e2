//! Linear/mixed-binary program description and solver results.


use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

/// Why a solve stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    /// Branch and bound reached the requested relative gap.
    GapReached,
    /// Node or time limit hit; the incumbent (if any) is returned.
    LimitReached,
}

/// A minimization program over bounded continuous and binary variables with
/// a sparse row-major constraint matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    costs: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    kind: Vec<VarKind>,
    row_sense: Vec<RowSense>,
    rhs: Vec<f64>,
    /// (row, col, coefficient) triples; at most one entry per (row, col).
    entries: Vec<(usize, usize, f64)>,
    /// Constant added to every reported objective value.
    objective_offset: f64,
}

impl LinearProgram {
    /// Starts a program minimizing `costs` over variables defaulting to
    /// continuous with bounds `[0, +inf)`.
    pub fn minimize(costs: Vec<f64>) -> Self {
        let n = costs.len();
        LinearProgram {
            costs,
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
            kind: vec![VarKind::Continuous; n],
            row_sense: Vec::new(),
            rhs: Vec::new(),
            entries: Vec::new(),
            objective_offset: 0.0,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.costs.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn cost(&self, var: usize) -> f64 {
        self.costs[var]
    }

    pub fn bounds(&self, var: usize) -> (f64, f64) {
        (self.lower[var], self.upper[var])
    }

    pub fn kind(&self, var: usize) -> VarKind {
        self.kind[var]
    }

    pub fn row_sense(&self, row: usize) -> RowSense {
        self.row_sense[row]
    }

    pub fn rhs(&self, row: usize) -> f64 {
        self.rhs[row]
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn objective_offset(&self) -> f64 {
        self.objective_offset
    }

    pub fn set_objective_offset(&mut self, offset: f64) {
        self.objective_offset = offset;
    }

    pub fn set_cost(&mut self, var: usize, cost: f64) {
        self.costs[var] = cost;
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn set_binary(&mut self, var: usize) {
        self.kind[var] = VarKind::Binary;
        self.lower[var] = 0.0;
        self.upper[var] = 1.0;
    }

    /// Appends a continuous variable and returns its column index.
    pub fn push_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.costs.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.kind.push(VarKind::Continuous);
        self.costs.len() - 1
    }

    /// Appends a row; `coeffs` are (column, coefficient) pairs. Returns the
    /// row index.
    pub fn add_row(&mut self, sense: RowSense, rhs: f64, coeffs: &[(usize, f64)]) -> usize {
        let row = self.rhs.len();
        self.row_sense.push(sense);
        self.rhs.push(rhs);
        for &(col, val) in coeffs {
            if val != 0.0 {
                self.entries.push((row, col, val));
            }
        }
        row
    }

    pub fn binary_vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.kind
            .iter()
            .enumerate()
            .filter(|(_, k)| **k == VarKind::Binary)
            .map(|(v, _)| v)
    }

    pub fn num_binary(&self) -> usize {
        self.kind.iter().filter(|k| **k == VarKind::Binary).count()
    }

    /// A copy with every binary variable relaxed to continuous on `[0, 1]`.
    pub fn relaxed(&self) -> LinearProgram {
        let mut lp = self.clone();
        for k in &mut lp.kind {
            *k = VarKind::Continuous;
        }
        lp
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.costs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("objective costs must be finite"));
        }
        for v in 0..n {
            if self.lower[v] > self.upper[v] {
                return Err(Error::InvalidArgument("variable has crossed bounds"));
            }
            if self.kind[v] == VarKind::Binary && (self.lower[v] < 0.0 || self.upper[v] > 1.0) {
                return Err(Error::InvalidArgument("binary variable bounds must lie in [0, 1]"));
            }
        }
        if self.rhs.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidArgument("row right-hand sides must be finite"));
        }
        let mut seen: Vec<(usize, usize)> = Vec::with_capacity(self.entries.len());
        for &(row, col, val) in &self.entries {
            if row >= self.num_rows() || col >= n {
                return Err(Error::InvalidArgument("matrix entry out of range"));
            }
            if !val.is_finite() {
                return Err(Error::InvalidArgument("matrix coefficients must be finite"));
            }
            seen.push((row, col));
        }
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate (row, col) matrix entry"));
        }
        Ok(())
    }

    /// Residual-checked evaluation: objective at `x` plus the largest row and
    /// bound violation, used by tests and the solution certifier.
    pub fn check_point(&self, x: &[f64]) -> (f64, f64) {
        let mut activity = vec![0.0; self.num_rows()];
        for &(row, col, val) in &self.entries {
            activity[row] += val * x[col];
        }
        let mut violation = 0.0_f64;
        for row in 0..self.num_rows() {
            let diff = activity[row] - self.rhs[row];
            let v = match self.row_sense[row] {
                RowSense::Le => diff,
                RowSense::Ge => -diff,
                RowSense::Eq => diff.abs(),
            };
            violation = violation.max(v);
        }
        for v in 0..self.num_vars() {
            violation = violation.max(self.lower[v] - x[v]).max(x[v] - self.upper[v]);
        }
        let objective: f64 =
            self.objective_offset + x.iter().zip(&self.costs).map(|(xi, ci)| xi * ci).sum::<f64>();
        (objective, violation)
    }

    /// Renders the program in CPLEX LP text format for external cross-checks.
    pub fn to_lp_format(&self) -> String {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.num_rows()];
        for &(row, col, val) in &self.entries {
            rows[row].push((col, val));
        }
        for row in &mut rows {
            row.sort_unstable_by_key(|(col, _)| *col);
        }
        let mut out = String::new();
        out.push_str("Minimize\n obj:");
        for (v, c) in self.costs.iter().enumerate() {
            if *c != 0.0 {
                let _ = write!(out, " {} {} x{}", if *c < 0.0 { "-" } else { "+" }, c.abs(), v);
            }
        }
        out.push_str("\nSubject To\n");
        for (r, row) in rows.iter().enumerate() {
            let _ = write!(out, " c{r}:");
            for (col, val) in row {
                let _ = write!(out, " {} {} x{}", if *val < 0.0 { "-" } else { "+" }, val.abs(), col);
            }
            let op = match self.row_sense[r] {
                RowSense::Le => "<=",
                RowSense::Eq => "=",
                RowSense::Ge => ">=",
            };
            let _ = writeln!(out, " {op} {}", self.rhs[r]);
        }
        out.push_str("Bounds\n");
        for v in 0..self.num_vars() {
            let (lo, up) = (self.lower[v], self.upper[v]);
            if up.is_infinite() {
                let _ = writeln!(out, " x{v} >= {lo}");
            } else {
                let _ = writeln!(out, " {lo} <= x{v} <= {up}");
            }
        }
        let binaries: Vec<usize> = self.binary_vars().collect();
        if !binaries.is_empty() {
            out.push_str("Binaries\n");
            for v in binaries {
                let _ = write!(out, " x{v}");
            }
            out.push('\n');
        }
        out.push_str("End\n");
        out
    }
}

/// Outcome of an LP or MILP solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub status: Status,
    /// Primal values per variable; empty when no feasible point was found.
    pub primal: Vec<f64>,
    /// Objective including the program's constant offset. Meaningless unless
    /// `status` carries a primal point.
    pub objective: f64,
    /// Final relative MILP gap; zero for plain LP solves.
    pub gap: f64,
    /// Branch-and-bound nodes processed (zero for plain LP solves).
    pub nodes_explored: usize,
}

impl Solution {
    pub fn is_feasible(&self) -> bool {
        matches!(self.status, Status::Optimal | Status::GapReached)
            || (self.status == Status::LimitReached && !self.primal.is_empty())
    }

    pub(crate) fn without_point(status: Status) -> Solution {
        Solution { status, primal: Vec::new(), objective: f64::INFINITY, gap: f64::INFINITY, nodes_explored: 0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_and_validation() {
        let mut lp = LinearProgram::minimize(vec![1.0, -1.0]);
        lp.set_binary(1);
        lp.add_row(RowSense::Le, 1.0, &[(0, 1.0), (1, 1.0)]);
        lp.validate().unwrap();
        assert_eq!(lp.num_vars(), 2);
        assert_eq!(lp.num_rows(), 1);
        assert_eq!(lp.bounds(1), (0.0, 1.0));

        let mut dup = lp.clone();
        dup.add_row(RowSense::Eq, 0.0, &[(0, 1.0)]);
        dup.validate().unwrap();
        let bad = {
            let mut b = lp.clone();
            b.add_row(RowSense::Le, 0.0, &[(0, 1.0), (0, 2.0)]);
            b
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn relaxation_drops_integrality() {
        let mut lp = LinearProgram::minimize(vec![1.0]);
        lp.set_binary(0);
        let relaxed = lp.relaxed();
        assert_eq!(relaxed.kind(0), VarKind::Continuous);
        assert_eq!(relaxed.bounds(0), (0.0, 1.0));
        assert_eq!(relaxed.num_binary(), 0);
    }

    #[test]
    fn check_point_reports_violations() {
        let mut lp = LinearProgram::minimize(vec![2.0]);
        lp.add_row(RowSense::Ge, 3.0, &[(0, 1.0)]);
        let (obj, viol) = lp.check_point(&[3.0]);
        assert_eq!(obj, 6.0);
        assert!(viol <= 0.0);
        let (_, viol) = lp.check_point(&[2.0]);
        assert!((viol - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lp_format_mentions_sections() {
        let mut lp = LinearProgram::minimize(vec![1.0, 1.0]);
        lp.set_binary(0);
        lp.add_row(RowSense::Le, 2.0, &[(0, 1.0), (1, 1.0)]);
        let text = lp.to_lp_format();
        for section in ["Minimize", "Subject To", "Bounds", "Binaries", "End"] {
            assert!(text.contains(section), "missing {section} in:\n{text}");
        }
    }
}
