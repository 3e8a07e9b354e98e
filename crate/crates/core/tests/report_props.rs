//! File-format and orchestration properties: stable CSV/JSON emission,
//! cross-file consistency, config layering, and CLI behavior (including
//! byte-identical reruns).

use qaflow::report::{
    run_experiment, run_pipeline, run_sweep, GraphSource, PartialConfig, RunConfig, RunSummary,
};
use qaflow::evolve::Schedule;
use qaflow::graph::{presets, GraphInstance};
use qaflow::tracking::{cycle_decomposition, PermutationResult};
use std::fs;
use std::path::Path;
use std::process::Command;

fn n5_inline() -> GraphSource {
    GraphSource::Inline(presets::n5_deg2().to_edge_list_text())
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn emitted_files_are_complete_and_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(n5_inline(), 80, dir.path());
    cfg.snapshot_stride = 4;
    let summary = run_experiment(&cfg).unwrap();

    for name in ["phases.csv", "crowding.csv", "histogram.csv", "permutation.json", "summary.json"]
    {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    // No samples.csv without shots.
    assert!(!dir.path().join("samples.csv").exists());

    let sched = Schedule::with_params(80, 50.0, 5.0, 4).unwrap();
    let snapshot_count = sched.snapshot_steps().len();

    let crowding = csv_rows(&read(&dir.path().join("crowding.csv")));
    assert_eq!(crowding[0], ["s", "dtheta_min"]);
    assert_eq!(crowding.len() - 1, snapshot_count, "one crowding row per snapshot");
    // Cross-file: the file's max equals the summary max, bit for bit.
    let file_max = crowding[1..]
        .iter()
        .map(|row| row[1].parse::<f64>().unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(file_max, summary.max_dtheta_min);

    let phases = csv_rows(&read(&dir.path().join("phases.csv")));
    assert_eq!(phases[0], ["s", "band_index", "theta"]);
    assert_eq!(phases.len() - 1, snapshot_count * 32, "bands x snapshots");

    let histogram = csv_rows(&read(&dir.path().join("histogram.csv")));
    assert_eq!(histogram[0], ["bitstring", "probability", "cut_value", "is_optimal"]);
    assert_eq!(histogram.len() - 1, 32);
    let total: f64 = histogram[1..].iter().map(|r| r[1].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9, "histogram mass {total}");
    // Cross-file: optimal-row mass equals p_succ exactly (same values,
    // same ascending-index summation order).
    let optimal_mass: f64 = histogram[1..]
        .iter()
        .filter(|r| r[3] == "true")
        .map(|r| r[1].parse::<f64>().unwrap())
        .sum();
    assert_eq!(optimal_mass, summary.p_succ);

    // summary.json round-trips into the exact same struct.
    let parsed: RunSummary = serde_json::from_str(&read(&dir.path().join("summary.json"))).unwrap();
    assert_eq!(parsed, summary);

    // permutation.json agrees with the summary's cycle count.
    let perm: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("permutation.json"))).unwrap();
    assert_eq!(
        perm["nontrivial_cycle_count"].as_u64().unwrap() as usize,
        summary.nontrivial_cycle_count
    );
    let pi: Vec<usize> =
        perm["pi"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap() as usize).collect();
    assert!(qaflow::tracking::is_permutation(&pi));
    assert_eq!(perm["step_min_overlaps"].as_array().unwrap().len(), snapshot_count - 1);
}

#[test]
fn csv_dialect_is_plain_comma_lf() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(n5_inline(), 20, dir.path());
    cfg.snapshot_stride = 5;
    run_experiment(&cfg).unwrap();
    for name in ["phases.csv", "crowding.csv", "histogram.csv"] {
        let bytes = fs::read(dir.path().join(name)).unwrap();
        assert!(!bytes.contains(&b'\r'), "{name} has CR");
        assert!(!bytes.contains(&b'"'), "{name} has quoting");
        assert_eq!(*bytes.last().unwrap(), b'\n', "{name} missing trailing LF");
        let text = String::from_utf8(bytes).unwrap();
        let commas: Vec<usize> =
            text.lines().map(|l| l.matches(',').count()).collect();
        assert!(commas.windows(2).all(|w| w[0] == w[1]), "{name} ragged rows");
    }
}

#[test]
fn fixed_permutation_serializes_to_expected_cycles() {
    // Serialization shape for a fixed permutation.
    let pi = vec![1usize, 0, 2, 3];
    let cycles = cycle_decomposition(&pi);
    assert_eq!(cycles, vec![vec![0, 1], vec![2], vec![3]]);
    let result = PermutationResult {
        pi: pi.clone(),
        cycles: cycles.clone(),
        nontrivial_cycle_count: cycles.iter().filter(|c| c.len() >= 2).count(),
    };
    assert_eq!(result.nontrivial_cycle_count, 1);
    let json = serde_json::to_value(&result).unwrap();
    assert_eq!(json["cycles"], serde_json::json!([[0, 1], [2], [3]]));
    assert_eq!(json["nontrivial_cycle_count"], 1);
}

#[test]
fn k2_experiment_matches_oracle_row() {
    let dir = tempfile::tempdir().unwrap();
    let source = GraphSource::Inline("n 2\n0 1\n".into());
    let mut cfg = RunConfig::new(source, 160, dir.path());
    cfg.snapshot_stride = 8;
    let summary = run_experiment(&cfg).unwrap();
    assert_eq!((summary.n, summary.edge_count, summary.k), (2, 1, 160));
    assert_eq!((summary.c_star, summary.degeneracy), (1, 2));
    assert!(summary.p_succ >= 0.95);
    assert!(summary.median_dtheta_min <= summary.max_dtheta_min);
}

#[test]
fn empty_graph_pipeline_completes_with_unit_success() {
    let g = GraphInstance::new(2, vec![]).unwrap();
    let sched = Schedule::with_params(40, 50.0, 5.0, 2).unwrap();
    let art = run_pipeline(&g, &sched).unwrap();
    // Every outcome is optimal on the edgeless graph.
    assert_eq!(art.oracle.c_star, 0);
    assert_eq!(art.oracle.degeneracy, 4);
    assert!((art.summary.p_succ - 1.0).abs() < 1e-12);
    // The mixer-only flow keeps exact degeneracies; the gauge-robust
    // diagnostics must still be present and coherent.
    assert!(qaflow::tracking::is_permutation(&art.permutation.pi));
    for cluster in &art.terminal_clusters {
        assert!(cluster.slots.len() >= 2);
        assert_eq!(cluster.initial_slots.len(), cluster.slots.len());
    }
}

#[test]
fn sampled_histograms_are_seeded_and_normalized() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(n5_inline(), 20, dir.path().join("a"));
    cfg.snapshot_stride = 5;
    cfg.shots = Some(4000);
    cfg.seed = Some(11);
    run_experiment(&cfg).unwrap();
    let rows = csv_rows(&read(&dir.path().join("a/samples.csv")));
    assert_eq!(rows[0], ["bitstring", "count"]);
    let total: u64 = rows[1..].iter().map(|r| r[1].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 4000);

    // Same seed reproduces the file; a different seed moves counts.
    let mut cfg_b = cfg.clone();
    cfg_b.out_dir = dir.path().join("b");
    run_experiment(&cfg_b).unwrap();
    assert_eq!(
        fs::read(dir.path().join("a/samples.csv")).unwrap(),
        fs::read(dir.path().join("b/samples.csv")).unwrap()
    );
    let mut cfg_c = cfg.clone();
    cfg_c.out_dir = dir.path().join("c");
    cfg_c.seed = Some(12);
    run_experiment(&cfg_c).unwrap();
    assert_ne!(
        fs::read(dir.path().join("a/samples.csv")).unwrap(),
        fs::read(dir.path().join("c/samples.csv")).unwrap()
    );
}

#[test]
fn sweep_writes_per_depth_directories_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let mut base = RunConfig::new(n5_inline(), 999, dir.path());
    base.snapshot_stride = 6;
    let summaries = run_sweep(&base, &[24, 36]).unwrap();
    assert_eq!(summaries.len(), 2);
    assert_eq!(summaries[0].k, 24);
    assert_eq!(summaries[1].k, 36);
    assert!(dir.path().join("k24/summary.json").exists());
    assert!(dir.path().join("k36/summary.json").exists());
}

// ═══════════════════════════════════════════════════════════════════
//  CLI behavior
// ═══════════════════════════════════════════════════════════════════

fn qaflow() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qaflow"))
}

fn instance_path(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("instances").join(name)
}

#[test]
fn cli_solve_reports_the_oracle() {
    let out = qaflow()
        .args(["solve", "--graph"])
        .arg(instance_path("n5_deg2.txt"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("c_star = 5"), "{text}");
    assert!(text.contains("degeneracy = 2"), "{text}");
    assert!(text.contains("optimal = 00111"), "{text}");
}

#[test]
fn cli_evolve_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let status = qaflow()
            .args(["evolve", "--k", "40", "--stride", "2", "--shots", "500", "--seed", "3"])
            .arg("--graph")
            .arg(instance_path("n5_deg2.txt"))
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    for name in
        ["phases.csv", "crowding.csv", "histogram.csv", "permutation.json", "summary.json", "samples.csv"]
    {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name} differs between identical runs"
        );
    }
}

#[test]
fn cli_flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    fs::write(
        &cfg_path,
        format!(
            "graph = {}\nk = 40\nstride = 2\nout = {}\n",
            instance_path("n5_deg2.txt").display(),
            dir.path().join("from_config").display()
        ),
    )
    .unwrap();
    let status = qaflow()
        .args(["evolve", "--config"])
        .arg(&cfg_path)
        .args(["--k", "20"])
        .status()
        .unwrap();
    assert!(status.success());
    let summary: RunSummary =
        serde_json::from_str(&read(&dir.path().join("from_config/summary.json"))).unwrap();
    assert_eq!(summary.k, 20, "flag must override the config file");
}

#[test]
fn cli_sweep_prints_one_row_per_depth() {
    let dir = tempfile::tempdir().unwrap();
    let out = qaflow()
        .args(["sweep", "--sweep", "16,24", "--stride", "4"])
        .arg("--graph")
        .arg(instance_path("n5_deg2.txt"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let data_rows =
        text.lines().filter(|l| l.trim_start().starts_with(['1', '2'])).count();
    assert_eq!(data_rows, 2, "{text}");
    assert!(dir.path().join("k16/crowding.csv").exists());
    assert!(dir.path().join("k24/crowding.csv").exists());
}

#[test]
fn cli_errors_are_stage_tagged_and_nonzero() {
    let out = qaflow().args(["evolve", "--graph", "/nonexistent/g.txt"]).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("qaflow:"), "{err}");
    assert!(err.contains("graph"), "stage tag missing: {err}");

    let out = qaflow().args(["evolve"]).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("graph is required"), "{err}");

    let out = qaflow().args(["sweep", "--graph", "x.txt"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn partial_config_layering_matches_spec_order() {
    // defaults < config file < flags, field by field.
    let file = PartialConfig::from_text("k = 100\nt = 25\nseed = 9\n").unwrap();
    let flags = PartialConfig { t: Some(75.0), ..Default::default() };
    let merged = file.overlaid(flags);
    assert_eq!(merged.k, Some(100));
    assert_eq!(merged.t, Some(75.0));
    assert_eq!(merged.seed, Some(9));
}
