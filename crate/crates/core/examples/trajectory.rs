//! Prints a compact summary of a reduction trajectory.
//!
//!   cargo run --release --example trajectory -p ladder-core -- su2 15

use ladder_core::{
    deepest_stable_dim, observe, run_reduction, setup, CouplingSet, ReductionConfig, Representation,
};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let representation = match args.get(1).map(String::as_str) {
        Some("so4") => Representation::So4,
        _ => Representation::Su2,
    };
    let jt: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(15.0);
    let couplings = CouplingSet::new(jt, 5.0, 3.0).unwrap();
    let (basis, ham) = setup(representation, 6, &couplings).unwrap();
    let start = std::time::Instant::now();
    let traj = run_reduction(&ham, &basis, jt, &ReductionConfig::default()).unwrap();
    let obs = observe(&traj, 6, 1e-2).unwrap();
    eprintln!(
        "{:?} J_t={jt}: {} steps in {:.1?}, {:?}",
        representation,
        traj.steps.len(),
        start.elapsed(),
        traj.termination
    );
    for (step, o) in traj.steps.iter().zip(&obs) {
        if o.dim % 10 == 0 || o.dim < 20 {
            println!(
                "n={:4} g={:10.5} p={:8.4?} s={:.4} rel={:4} drop={:.2e} {:?}",
                o.dim,
                step.g_after,
                o.deviations,
                o.entropy,
                o.relevant,
                step.dropped_amplitude.unwrap_or(0.0),
                step.root_status
            );
        }
    }
    println!("deepest stable (1%): {:?}", deepest_stable_dim(&obs, 1.0));
}
