//! Full digitized evolution on a 5-vertex instance: schedule, snapshots,
//! unitarity budget, and the final measurement statistics.
//!
//!     cargo run --release --example run_evolution

use qaflow::basis_index_to_bitstring;
use qaflow::evolve::{run_evolution, success_probability, Schedule};
use qaflow::graph::{brute_force_optimum, cut_value_of_index, presets};

fn main() -> qaflow::Result<()> {
    let g = presets::n5_deg2();
    let oracle = brute_force_optimum(&g)?;
    // Paper-style digitization: K = 240 steps over T = 50 with mixer
    // scale 5; record a snapshot every other step.
    let sched = Schedule::with_params(240, 50.0, 5.0, 2)?;
    println!(
        "running K = {}, T = {}, dt = {}, {} snapshots",
        sched.k(),
        sched.t(),
        sched.dt(),
        sched.snapshot_steps().len()
    );

    let result = run_evolution(&g, &sched)?;
    println!("state/matrix consistency: {:.3e}", result.state_consistency_residual);
    println!("reunitarizations triggered: {}", result.reunitarizations.len());

    // Every snapshot carries the eigenphases of the cumulative unitary at
    // its interpolation point.
    let first = result.snapshots.first().unwrap();
    let last = result.snapshots.last().unwrap();
    println!(
        "first snapshot s = {}: phase range [{:.4}, {:.4}]",
        first.s,
        first.phases.first().unwrap(),
        first.phases.last().unwrap()
    );
    println!(
        "last  snapshot s = {}: phase range [{:.4}, {:.4}]",
        last.s,
        last.phases.first().unwrap(),
        last.phases.last().unwrap()
    );

    // Top measurement outcomes.
    let mut by_prob: Vec<(usize, f64)> =
        result.outcome_distribution.iter().cloned().enumerate().collect();
    by_prob.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    println!("\ntop outcomes:");
    for &(b, p) in by_prob.iter().take(4) {
        println!(
            "  {}  p = {:.6}  cut = {}",
            basis_index_to_bitstring(b, g.n()),
            p,
            cut_value_of_index(&g, b)
        );
    }

    let p = success_probability(&result, &oracle);
    println!("\nP_succ (mass on the {} optimal cuts) = {:.6}", oracle.degeneracy, p);
    assert!(p > 0.95);
    Ok(())
}
