//! Depth sweep: rerun one instance at several digitization depths K and
//! compare the summary rows. The headline effect: refining K leaves the
//! crowding scale essentially unchanged.
//!
//!     cargo run --release --example sweep_depths

use qaflow::report::{run_sweep, summary_table, GraphSource, RunConfig};
use qaflow::graph::presets;

fn main() -> qaflow::Result<()> {
    let g = presets::n5_deg2();
    let out = std::env::temp_dir().join("qaflow_sweep_example");
    let mut base = RunConfig::new(GraphSource::Inline(g.to_edge_list_text()), 240, &out);
    base.snapshot_stride = 2;

    let ks = [160, 240, 500];
    let summaries = run_sweep(&base, &ks)?;
    print!("{}", summary_table(&summaries));

    let medians: Vec<f64> = summaries.iter().map(|s| s.median_dtheta_min).collect();
    let (lo, hi) = (
        medians.iter().cloned().fold(f64::INFINITY, f64::min),
        medians.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    println!("\nmedian Δθ_min spread across K: {:.6} .. {:.6} (ratio {:.2})", lo, hi, hi / lo);
    assert!(hi / lo < 2.0, "refining K should not change the crowding scale");
    println!("artifacts per depth under {}", out.display());
    Ok(())
}
