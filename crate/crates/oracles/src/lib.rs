//! Brute-force oracles used by the test suites.
//!
//! Everything here is deliberately naive: exhaustive enumeration over binary
//! assignments, basic-solution enumeration for LPs, and exhaustive partition
//! search for clustering. None of it shares code with the solvers it checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sndh_core::milp::{LinearProgram, RowSense};
use sndh_core::network::Instance;

/// Outcome of an enumeration oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleResult {
    Optimal { objective: f64, point: Vec<f64> },
    Infeasible,
}

const FEAS: f64 = 1e-9;

fn row_activities(lp: &LinearProgram, x: &[f64]) -> Vec<f64> {
    let mut activity = vec![0.0; lp.num_rows()];
    for &(row, col, val) in lp.entries() {
        activity[row] += val * x[col];
    }
    activity
}

fn feasible(lp: &LinearProgram, x: &[f64], tol: f64) -> bool {
    let activity = row_activities(lp, x);
    for row in 0..lp.num_rows() {
        let diff = activity[row] - lp.rhs(row);
        let ok = match lp.row_sense(row) {
            RowSense::Le => diff <= tol,
            RowSense::Ge => diff >= -tol,
            RowSense::Eq => diff.abs() <= tol,
        };
        if !ok {
            return false;
        }
    }
    for v in 0..lp.num_vars() {
        let (lo, up) = lp.bounds(v);
        if x[v] < lo - tol || x[v] > up + tol {
            return false;
        }
    }
    true
}

fn objective(lp: &LinearProgram, x: &[f64]) -> f64 {
    lp.objective_offset() + (0..lp.num_vars()).map(|v| lp.cost(v) * x[v]).sum::<f64>()
}

/// Exhaustive optimum of a pure binary program (every variable binary).
/// Panics if a variable is continuous or there are more than 24 binaries.
pub fn enumerate_binary_optimum(lp: &LinearProgram) -> OracleResult {
    let n = lp.num_vars();
    assert_eq!(lp.num_binary(), n, "oracle needs a pure binary program");
    assert!(n <= 24, "2^n enumeration limited to small n");
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut x = vec![0.0; n];
    for mask in 0u32..(1 << n) {
        for (v, xv) in x.iter_mut().enumerate() {
            *xv = ((mask >> v) & 1) as f64;
        }
        // fixed binaries still have to honor their tightened bounds
        if !feasible(lp, &x, FEAS) {
            continue;
        }
        let obj = objective(lp, &x);
        if best.as_ref().map_or(true, |(b, _)| obj < *b) {
            best = Some((obj, x.clone()));
        }
    }
    match best {
        Some((objective, point)) => OracleResult::Optimal { objective, point },
        None => OracleResult::Infeasible,
    }
}

fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> bool {
    for k in 0..n {
        let mut piv = k;
        for r in k + 1..n {
            if a[r * n + k].abs() > a[piv * n + k].abs() {
                piv = r;
            }
        }
        if a[piv * n + k].abs() < 1e-10 {
            return false;
        }
        if piv != k {
            for c in 0..n {
                a.swap(k * n + c, piv * n + c);
            }
            b.swap(k, piv);
        }
        for r in k + 1..n {
            let f = a[r * n + k] / a[k * n + k];
            if f != 0.0 {
                for c in k..n {
                    a[r * n + c] -= f * a[k * n + c];
                }
                b[r] -= f * b[k];
            }
        }
    }
    for k in (0..n).rev() {
        let mut acc = b[k];
        for c in k + 1..n {
            acc -= a[k * n + c] * b[c];
        }
        b[k] = acc / a[k * n + k];
    }
    true
}

/// Optimum of an LP whose variables all have finite bounds, found by
/// enumerating every basic solution of the slack-augmented system with every
/// lower/upper resting pattern for the nonbasic structural variables.
///
/// Finite bounds make the feasible region bounded, so if it is nonempty the
/// optimum sits at one of these candidates.
pub fn enumerate_lp_optimum(lp: &LinearProgram) -> OracleResult {
    let n = lp.num_vars();
    let m = lp.num_rows();
    for v in 0..n {
        let (lo, up) = lp.bounds(v);
        assert!(lo.is_finite() && up.is_finite(), "oracle needs finite bounds");
    }
    assert!(n + m <= 16, "basis enumeration limited to small programs");

    // dense column copies of [A | I]
    let total = n + m;
    let mut cols = vec![vec![0.0; m]; total];
    for &(row, col, val) in lp.entries() {
        cols[col][row] += val;
    }
    for row in 0..m {
        cols[n + row][row] = 1.0;
    }
    let slack_bounds: Vec<(f64, f64)> = (0..m)
        .map(|row| match lp.row_sense(row) {
            RowSense::Le => (0.0, f64::INFINITY),
            RowSense::Ge => (f64::NEG_INFINITY, 0.0),
            RowSense::Eq => (0.0, 0.0),
        })
        .collect();

    let mut best: Option<(f64, Vec<f64>)> = None;

    // iterate subsets of columns of size m as the basis
    let mut basis: Vec<usize> = (0..m).collect();
    loop {
        // nonbasic structural variables get every bound pattern
        let nonbasic: Vec<usize> = (0..total).filter(|c| !basis.contains(c)).collect();
        let free_struct: Vec<usize> = nonbasic.iter().copied().filter(|&c| c < n).collect();
        for pattern in 0u32..(1 << free_struct.len()) {
            let mut x = vec![0.0; total];
            for (bit, &c) in free_struct.iter().enumerate() {
                let (lo, up) = lp.bounds(c);
                x[c] = if (pattern >> bit) & 1 == 1 { up } else { lo };
            }
            // nonbasic slacks rest at their finite bound (0 in every case)
            let mut rhs: Vec<f64> = (0..m).map(|r| lp.rhs(r)).collect();
            for &c in &nonbasic {
                if x[c] != 0.0 {
                    for r in 0..m {
                        rhs[r] -= cols[c][r] * x[c];
                    }
                }
            }
            let mut mat = vec![0.0; m * m];
            for (j, &c) in basis.iter().enumerate() {
                for r in 0..m {
                    mat[r * m + j] = cols[c][r];
                }
            }
            if !solve_dense(&mut mat, &mut rhs, m) {
                continue;
            }
            let mut ok = true;
            for (j, &c) in basis.iter().enumerate() {
                let (lo, up) = if c < n { lp.bounds(c) } else { slack_bounds[c - n] };
                if rhs[j] < lo - FEAS || rhs[j] > up + FEAS {
                    ok = false;
                    break;
                }
                x[c] = rhs[j];
            }
            if !ok {
                continue;
            }
            let candidate = &x[..n];
            if !feasible(lp, candidate, 1e-7) {
                continue;
            }
            let obj = objective(lp, candidate);
            if best.as_ref().map_or(true, |(b, _)| obj < *b - 1e-12) {
                best = Some((obj, candidate.to_vec()));
            }
        }

        if !next_combination(&mut basis, total) {
            break;
        }
    }

    match best {
        Some((objective, point)) => OracleResult::Optimal { objective, point },
        None => OracleResult::Infeasible,
    }
}

/// Advances to the next m-combination of `0..total` in lexicographic order.
fn next_combination(basis: &mut [usize], total: usize) -> bool {
    let m = basis.len();
    let mut i = m;
    while i > 0 {
        i -= 1;
        if basis[i] < total - m + i {
            basis[i] += 1;
            for j in i + 1..m {
                basis[j] = basis[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Best within-cluster sum of squares over every 2-partition of the points.
pub fn best_two_partition_wcss(points: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let n = points.len();
    assert!(n >= 2 && n <= 16);
    let dim = points[0].len();
    let mut best = (f64::INFINITY, vec![0; n]);
    for mask in 1u32..(1 << (n - 1)) {
        // point 0 always in cluster 0 to kill the symmetry
        let assignment: Vec<usize> = (0..n)
            .map(|i| if i == 0 { 0 } else { ((mask >> (i - 1)) & 1) as usize })
            .collect();
        let mut wcss = 0.0;
        for cluster in 0..2 {
            let members: Vec<&Vec<f64>> =
                points.iter().zip(&assignment).filter(|(_, a)| **a == cluster).map(|(p, _)| p).collect();
            if members.is_empty() {
                continue;
            }
            let mut center = vec![0.0; dim];
            for p in &members {
                for (c, v) in center.iter_mut().zip(p.iter()) {
                    *c += v;
                }
            }
            for c in center.iter_mut() {
                *c /= members.len() as f64;
            }
            for p in &members {
                wcss += p.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
            }
        }
        if wcss < best.0 {
            best = (wcss, assignment);
        }
    }
    best
}

/// Random 0/1 design satisfying the design-balance equations, built as a
/// union of arc-disjoint cycles that each step one period forward through
/// the full horizon (every node-period on such a cycle gains one arrival and
/// one departure, so balance holds by construction).
pub fn random_balanced_design(inst: &Instance, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = inst.num_terminals;
    let horizon = inst.horizon;
    let mut design = vec![0.0; inst.num_arcs()];
    let cycles = rng.random_range(1..=4);
    'cycles: for _ in 0..cycles {
        let start_terminal = rng.random_range(0..n);
        let start_period = rng.random_range(0..horizon);
        let mut path = Vec::with_capacity(horizon);
        let mut at = start_terminal;
        for step in 0..horizon {
            let next = if step + 1 == horizon { start_terminal } else { rng.random_range(0..n) };
            let arrival = (start_period + step + 1) % horizon;
            let arc = inst.arc_index(at, next, arrival);
            if design[arc] == 1.0 || path.contains(&arc) {
                continue 'cycles; // arcs must stay disjoint; skip this cycle
            }
            path.push(arc);
            at = next;
        }
        for arc in path {
            design[arc] = 1.0;
        }
    }
    design
}

/// Seeded random pure-binary program. Roughly four in five draws are
/// anchored at a random binary point so they are guaranteed feasible.
pub fn random_binary_program(seed: u64, max_vars: usize, max_rows: usize) -> LinearProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(3..=max_vars);
    let rows = rng.random_range(2..=max_rows);
    let mut lp = LinearProgram::minimize((0..n).map(|_| rng.random_range(-10..=10) as f64).collect());
    for v in 0..n {
        lp.set_binary(v);
    }
    let anchor: Vec<f64> = (0..n).map(|_| rng.random_range(0..=1) as f64).collect();
    let anchored = rng.random_range(0..5) > 0;
    for _ in 0..rows {
        let coeffs: Vec<(usize, f64)> = (0..n)
            .filter_map(|v| {
                let c = rng.random_range(-5..=5);
                (c != 0).then_some((v, c as f64))
            })
            .collect();
        let activity: f64 = coeffs.iter().map(|&(v, c)| c * anchor[v]).sum();
        let sense = match rng.random_range(0..3) {
            0 => RowSense::Le,
            1 => RowSense::Ge,
            _ => RowSense::Eq,
        };
        let rhs = if anchored {
            match sense {
                RowSense::Le => activity + rng.random_range(0..=3) as f64,
                RowSense::Ge => activity - rng.random_range(0..=3) as f64,
                RowSense::Eq => activity,
            }
        } else {
            rng.random_range(-6..=6) as f64
        };
        lp.add_row(sense, rhs, &coeffs);
    }
    lp
}

/// Seeded random LP with finite bounds on every variable (so the
/// basic-solution oracle applies). Anchored at an interior point, which makes
/// most draws feasible.
pub fn random_lp(seed: u64, max_vars: usize, max_rows: usize) -> LinearProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_vars);
    let rows = rng.random_range(1..=max_rows);
    let mut lp = LinearProgram::minimize((0..n).map(|_| rng.random_range(-10..=10) as f64).collect());
    let mut anchor = Vec::with_capacity(n);
    for v in 0..n {
        let up = rng.random_range(1..=10) as f64;
        lp.set_bounds(v, 0.0, up);
        anchor.push(rng.random::<f64>() * up);
    }
    for _ in 0..rows {
        let coeffs: Vec<(usize, f64)> = (0..n)
            .filter_map(|v| {
                let c = rng.random_range(-5..=5);
                (c != 0).then_some((v, c as f64))
            })
            .collect();
        let activity: f64 = coeffs.iter().map(|&(v, c)| c * anchor[v]).sum();
        let sense = match rng.random_range(0..4) {
            0 => RowSense::Ge,
            1 => RowSense::Eq,
            _ => RowSense::Le,
        };
        let rhs = match sense {
            RowSense::Le => activity + rng.random::<f64>() * 3.0,
            RowSense::Ge => activity - rng.random::<f64>() * 3.0,
            RowSense::Eq => activity,
        };
        lp.add_row(sense, rhs, &coeffs);
    }
    lp
}
