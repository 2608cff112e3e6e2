//! Randomized equivalence tests: the simplex/branch-and-bound engine against
//! exhaustive enumeration.

use sndh_core::clock::NoClock;
use sndh_core::milp::{solve_lp, solve_milp, MilpOptions, Status};
use sndh_oracles::{
    enumerate_binary_optimum, enumerate_lp_optimum, random_binary_program, random_lp, OracleResult,
};

#[test]
fn milp_matches_exhaustive_enumeration() {
    let mut checked_feasible = 0;
    for seed in 0..100u64 {
        let lp = random_binary_program(seed, 12, 20);
        let oracle = enumerate_binary_optimum(&lp);
        let sol = solve_milp(&lp, &MilpOptions::default(), &NoClock).unwrap();
        match oracle {
            OracleResult::Optimal { objective, .. } => {
                assert!(
                    sol.status == Status::Optimal,
                    "seed {seed}: solver status {:?} but oracle found {objective}",
                    sol.status
                );
                assert!(
                    (sol.objective - objective).abs() < 1e-6,
                    "seed {seed}: solver {} vs oracle {objective}",
                    sol.objective
                );
                checked_feasible += 1;
            }
            OracleResult::Infeasible => {
                assert_eq!(sol.status, Status::Infeasible, "seed {seed}");
            }
        }
    }
    assert!(checked_feasible >= 60, "too few feasible draws: {checked_feasible}");
}

#[test]
fn lp_matches_basic_solution_enumeration() {
    let mut seed = 0u64;
    let mut checked = 0;
    while checked < 20 {
        let lp = random_lp(seed, 7, 5);
        seed += 1;
        let oracle = enumerate_lp_optimum(&lp);
        let sol = solve_lp(&lp).unwrap();
        match oracle {
            OracleResult::Optimal { objective, .. } => {
                assert_eq!(sol.status, Status::Optimal, "seed {}", seed - 1);
                assert!(
                    (sol.objective - objective).abs() < 1e-6,
                    "seed {}: solver {} vs oracle {objective}",
                    seed - 1,
                    sol.objective
                );
                checked += 1;
            }
            OracleResult::Infeasible => {
                assert_eq!(sol.status, Status::Infeasible, "seed {}", seed - 1);
            }
        }
    }
}

#[test]
fn milp_solutions_certify_their_own_feasibility() {
    for seed in 100..140u64 {
        let lp = random_binary_program(seed, 10, 12);
        let sol = solve_milp(&lp, &MilpOptions::default(), &NoClock).unwrap();
        if sol.is_feasible() {
            let (obj, violation) = lp.check_point(&sol.primal);
            assert!(violation <= 1e-7, "seed {seed}: violation {violation}");
            assert!((obj - sol.objective).abs() < 1e-9);
            for v in lp.binary_vars() {
                let x = sol.primal[v];
                assert!(x.min((1.0 - x).abs()) < 1e-6, "seed {seed}: fractional binary {x}");
            }
        }
    }
}

#[test]
fn loose_gap_never_beats_the_exact_optimum() {
    for seed in 200..230u64 {
        let lp = random_binary_program(seed, 10, 10);
        let exact = solve_milp(&lp, &MilpOptions::default(), &NoClock).unwrap();
        let loose = solve_milp(
            &lp,
            &MilpOptions { rel_gap: 0.05, ..Default::default() },
            &NoClock,
        )
        .unwrap();
        if exact.status == Status::Optimal {
            assert!(loose.is_feasible(), "seed {seed}");
            assert!(loose.objective >= exact.objective - 1e-9, "seed {seed}");
            // a 5% gap bound actually holds relative to the true optimum
            let slack = 0.05 * exact.objective.abs().max(1e-10);
            assert!(loose.objective <= exact.objective + slack + 1e-9, "seed {seed}");
        } else {
            assert_eq!(loose.status, Status::Infeasible, "seed {seed}");
        }
    }
}
