use sndh_core::bundling::kmeans_fit;
use sndh_core::clock::NoClock;
use sndh_core::formulation::build_bundle_lp;
use sndh_core::generate::{generate_instance, InstanceParams};
use sndh_core::milp::{solve_milp, MilpOptions};
use sndh_core::scenarios::generate_scenario_set;
use sndh::derive_seed;

fn main() {
    let master = 2024u64;
    let inst = generate_instance(
        &InstanceParams { num_terminals: 6, horizon: 4, num_commodities: 6, ..InstanceParams::default() },
        derive_seed(master, 0),
    )
    .unwrap();
    let scens = generate_scenario_set(&inst, 48, 5.0, 11.0, 8.0, derive_seed(master, 1000), false).unwrap();
    let bundles = kmeans_fit(&scens, 5, derive_seed(master, 2000 + 48)).unwrap();
    println!("bundle sizes: {:?}", bundles.bundles.iter().map(|b| b.len()).collect::<Vec<_>>());
    for b in 0..bundles.num_bundles() {
        let q: Vec<f64> = bundles.bundles[b].iter().map(|&s| bundles.reweighted_prob[s]).collect();
        let (lp, _) = build_bundle_lp(&inst, &scens, &bundles.bundles[b], &q, bundles.bundle_prob[b]).unwrap();
        println!("bundle {b}: {} rows, {} cols, {} nnz", lp.num_rows(), lp.num_vars(), lp.entries().len());
        let t = std::time::Instant::now();
        match solve_milp(&lp, &MilpOptions { rel_gap: 0.05, ..Default::default() }, &NoClock) {
            Ok(sol) => println!(
                "  -> {:?} obj {:.4} nodes {} gap {:.4} in {:.2}s",
                sol.status, sol.objective, sol.nodes_explored, sol.gap, t.elapsed().as_secs_f64()
            ),
            Err(e) => println!("  -> ERROR {e} after {:.2}s", t.elapsed().as_secs_f64()),
        }
    }
}
