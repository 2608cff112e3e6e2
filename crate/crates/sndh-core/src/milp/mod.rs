//! Exact LP and mixed-binary solver.
//!
//! [`solve_lp`] runs a two-phase bounded-variable revised simplex;
//! [`solve_milp`] wraps it in best-first branch and bound over the binary
//! variables with warm-started dual-simplex node re-solves. Infeasibility and
//! unboundedness are solver outcomes ([`Status`]), never errors.

mod branch;
mod lp;
mod lu;
mod simplex;

pub use branch::{solve_lp, solve_milp, MilpOptions, INT_TOL};
pub use lp::{LinearProgram, RowSense, Solution, Status, VarKind};
