use sndh_core::bundling::kmeans_fit;
use sndh_core::formulation::build_bundle_lp;
use sndh_core::generate::{generate_instance, InstanceParams};
use sndh_core::milp::solve_lp;
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
    let b = 2; // smallest bundle
    let q: Vec<f64> = bundles.bundles[b].iter().map(|&s| bundles.reweighted_prob[s]).collect();
    let (lp, _) = build_bundle_lp(&inst, &scens, &bundles.bundles[b], &q, bundles.bundle_prob[b]).unwrap();
    eprintln!("bundle {b}: {} rows, {} cols", lp.num_rows(), lp.num_vars());
    let t = std::time::Instant::now();
    match solve_lp(&lp.relaxed()) {
        Ok(sol) => eprintln!("LP -> {:?} obj {:.4} in {:.2}s", sol.status, sol.objective, t.elapsed().as_secs_f64()),
        Err(e) => eprintln!("LP -> ERROR {e} after {:.2}s", t.elapsed().as_secs_f64()),
    }
}
