//! Experiment orchestration, run-level summaries, and artifact emission.
//!
//! `run_experiment` drives the full pipeline (oracle → evolution → spectral
//! series → band tracking → permutation) from a [`RunConfig`] and writes
//! every diagnostic to stable CSV/JSON files; `run_sweep` repeats it over
//! several depths K concurrently, one output directory per run.
//!
//! Serialization rules (byte-stable reproducibility):
//! - floats are written with the shortest representation that parses back
//!   to the same value (Rust's default `Display`, serde_json's writer),
//! - CSV is comma-separated, LF line endings, one header row, no quoting
//!   (every field is numeric or a fixed token),
//! - JSON objects keep struct field order.

use crate::error::{Error, Result, StageContext};
use crate::evolve::{evolve_with, ReunitarizationEvent, Schedule};
use crate::graph::{brute_force_optimum, cut_value_of_index, CutOracleResult, GraphInstance};
use crate::spectral::{
    delta_theta_min, eigendecompose_colmajor, CrowdingAccumulator, CrowdingSeries,
    DEGENERACY_CLUSTER_TOL,
};
use crate::tracking::{
    end_to_end_permutation, manifold_sub_permutation, terminal_clusters, BandTrack, BandTracker,
    ContinuityBreach, ManifoldSubPermutation, PermutationResult, TerminalCluster,
    MANIFOLD_PROJECTION_THRESHOLD,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Default total evolution time.
pub const DEFAULT_T: f64 = 50.0;
/// Default digitization depth.
pub const DEFAULT_K: usize = 240;
/// Default output directory for the CLI.
pub const DEFAULT_OUT: &str = "qaflow-out";

// ═══════════════════════════════════════════════════════════════════
//  Configuration
// ═══════════════════════════════════════════════════════════════════

/// Where the instance comes from: an edge-list file or inline text in the
/// same format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSource {
    Path(PathBuf),
    Inline(String),
}

impl GraphSource {
    /// Read and parse the instance.
    pub fn load(&self) -> Result<GraphInstance> {
        match self {
            GraphSource::Path(p) => {
                let text = fs::read_to_string(p).map_err(|e| Error::io(p.clone(), e))?;
                GraphInstance::parse_edge_list(&text)
            }
            GraphSource::Inline(text) => GraphInstance::parse_edge_list(text),
        }
    }
}

/// Full description of one experiment run.
///
/// Invariants: K ≥ 1, T > 0, stride ≥ 1 (checked by [`RunConfig::validate`]).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub graph: GraphSource,
    pub k: usize,
    pub t: f64,
    pub mixer_scale: f64,
    pub snapshot_stride: usize,
    pub out_dir: PathBuf,
    /// When set, also emit a sampled histogram with this many shots.
    pub shots: Option<u64>,
    /// Sampling seed; defaults to 0 when shots are requested without one.
    pub seed: Option<u64>,
}

impl RunConfig {
    /// Config with the bundled defaults: T = 50, mixer scale = 5, stride 1.
    pub fn new(graph: GraphSource, k: usize, out_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            graph,
            k,
            t: DEFAULT_T,
            mixer_scale: Schedule::DEFAULT_MIXER_SCALE,
            snapshot_stride: 1,
            out_dir: out_dir.into(),
            shots: None,
            seed: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        // Schedule construction re-checks K/T/stride; surface those as
        // config errors plus the shots constraint.
        self.schedule().map_err(|e| Error::Config(e.to_string()))?;
        if self.shots == Some(0) {
            return Err(Error::Config("shots must be at least 1 when given".into()));
        }
        Ok(())
    }

    pub fn schedule(&self) -> Result<Schedule> {
        Schedule::with_params(self.k, self.t, self.mixer_scale, self.snapshot_stride)
    }
}

/// Partially specified configuration used for layering: defaults, then a
/// config file, then CLI flags, each layer overriding the previous one
/// field-by-field.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartialConfig {
    pub graph: Option<PathBuf>,
    pub k: Option<usize>,
    pub t: Option<f64>,
    pub mixer_scale: Option<f64>,
    pub stride: Option<usize>,
    pub out: Option<PathBuf>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub sweep: Option<Vec<usize>>,
}

impl PartialConfig {
    /// Parse `key = value` lines. `#` starts a comment; blank lines are
    /// skipped; later assignments to the same key win. Unknown keys are
    /// errors (typo safety). Accepted keys: graph, k, t, mixer_scale,
    /// stride, out, shots, seed, sweep (hyphens allowed in place of
    /// underscores).
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = PartialConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {line_no}: expected \"key = value\", found {line:?}"))
            })?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            if value.is_empty() {
                return Err(Error::Config(format!("line {line_no}: empty value for {key:?}")));
            }
            let parse_err = |what: &str| {
                Error::Config(format!("line {line_no}: {key} must be {what}, found {value:?}"))
            };
            match key.as_str() {
                "graph" => cfg.graph = Some(PathBuf::from(value)),
                "k" => cfg.k = Some(value.parse().map_err(|_| parse_err("a positive integer"))?),
                "t" => cfg.t = Some(value.parse().map_err(|_| parse_err("a number"))?),
                "mixer_scale" => {
                    cfg.mixer_scale = Some(value.parse().map_err(|_| parse_err("a number"))?)
                }
                "stride" => {
                    cfg.stride = Some(value.parse().map_err(|_| parse_err("a positive integer"))?)
                }
                "out" => cfg.out = Some(PathBuf::from(value)),
                "shots" => {
                    cfg.shots = Some(value.parse().map_err(|_| parse_err("a positive integer"))?)
                }
                "seed" => {
                    cfg.seed = Some(value.parse().map_err(|_| parse_err("a non-negative integer"))?)
                }
                "sweep" => cfg.sweep = Some(parse_sweep_list(value)?),
                _ => {
                    return Err(Error::Config(format!("line {line_no}: unknown key {key:?}")));
                }
            }
        }
        Ok(cfg)
    }

    /// Read and parse a config file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path.to_path_buf(), e))?;
        Self::from_text(&text)
    }

    /// Layer `over` on top of `self`: every field set in `over` wins.
    pub fn overlaid(self, over: PartialConfig) -> PartialConfig {
        PartialConfig {
            graph: over.graph.or(self.graph),
            k: over.k.or(self.k),
            t: over.t.or(self.t),
            mixer_scale: over.mixer_scale.or(self.mixer_scale),
            stride: over.stride.or(self.stride),
            out: over.out.or(self.out),
            shots: over.shots.or(self.shots),
            seed: over.seed.or(self.seed),
            sweep: over.sweep.or(self.sweep),
        }
    }

    /// Resolve to a full [`RunConfig`], filling unset fields with defaults.
    /// The graph path is the only field without a default.
    pub fn resolve(&self) -> Result<RunConfig> {
        let graph = self.graph.clone().ok_or_else(|| {
            Error::Config("a graph is required (--graph PATH or graph = PATH)".into())
        })?;
        let cfg = RunConfig {
            graph: GraphSource::Path(graph),
            k: self.k.unwrap_or(DEFAULT_K),
            t: self.t.unwrap_or(DEFAULT_T),
            mixer_scale: self.mixer_scale.unwrap_or(Schedule::DEFAULT_MIXER_SCALE),
            snapshot_stride: self.stride.unwrap_or(1),
            out_dir: self.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            shots: self.shots,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parse a comma-separated list of depths, e.g. "160,240,500".
pub fn parse_sweep_list(text: &str) -> Result<Vec<usize>> {
    let ks: Vec<usize> = text
        .split(',')
        .map(|tok| {
            tok.trim().parse().map_err(|_| {
                Error::Config(format!("sweep entry {:?} is not a positive integer", tok.trim()))
            })
        })
        .collect::<Result<_>>()?;
    if ks.is_empty() || ks.contains(&0) {
        return Err(Error::Config("sweep needs positive depths K1,K2,...".into()));
    }
    Ok(ks)
}

// ═══════════════════════════════════════════════════════════════════
//  Pipeline
// ═══════════════════════════════════════════════════════════════════

/// Table-style run summary: one row of the headline diagnostics.
///
/// Invariants: p_succ ∈ [0, 1]; median ≤ max; c_star and degeneracy come
/// straight from the brute-force oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub n: usize,
    pub edge_count: usize,
    pub k: usize,
    pub c_star: u32,
    pub degeneracy: usize,
    pub p_succ: f64,
    pub median_dtheta_min: f64,
    pub max_dtheta_min: f64,
    pub nontrivial_cycle_count: usize,
}

/// Everything the pipeline produces for one run.
#[derive(Debug, Clone)]
pub struct ExperimentArtifacts {
    pub graph: GraphInstance,
    pub oracle: CutOracleResult,
    pub summary: RunSummary,
    pub crowding: CrowdingSeries,
    pub track: BandTrack,
    pub permutation: PermutationResult,
    pub terminal_clusters: Vec<TerminalCluster>,
    pub manifold: ManifoldSubPermutation,
    /// Exact outcome probability per basis index.
    pub distribution: Vec<f64>,
    pub state_consistency_residual: f64,
    pub reunitarizations: Vec<ReunitarizationEvent>,
}

/// Run oracle → evolution → spectral series → tracking → permutation on an
/// already-loaded instance. Holds one dense matrix plus one eigenvector
/// matrix live at a time.
pub fn run_pipeline(g: &GraphInstance, sched: &Schedule) -> Result<ExperimentArtifacts> {
    let oracle = brute_force_optimum(g).stage("oracle")?;

    let mut crowding_acc = CrowdingAccumulator::new();
    let mut tracker: Option<BandTracker> = None;
    let core = evolve_with(g, sched, |ctx| {
        let snap =
            eigendecompose_colmajor(ctx.unitary.col_major_slice(), ctx.unitary.dimension(), ctx.s)
                .stage("spectral")?;
        crowding_acc.push(snap.s, delta_theta_min(&snap).stage("spectral")?);
        match tracker.as_mut() {
            Some(tr) => tr.push(snap).stage("tracking")?,
            None => tracker = Some(BandTracker::new(snap)),
        }
        Ok(())
    })
    .stage("evolve")?;

    let crowding = crowding_acc.finish().stage("spectral")?;
    let (track, final_snap) =
        tracker.expect("at least one snapshot is always recorded").finish();
    let permutation = end_to_end_permutation(&track);
    let clusters =
        terminal_clusters(&track.final_phases, &permutation.pi, DEGENERACY_CLUSTER_TOL);
    let manifold = manifold_sub_permutation(
        &final_snap,
        &oracle.optimal_indices(),
        &permutation.pi,
        MANIFOLD_PROJECTION_THRESHOLD,
    );
    drop(final_snap);

    let distribution: Vec<f64> = core.final_state.iter().map(|z| z.norm_sqr()).collect();
    let p_succ: f64 = oracle.optimal_indices().into_iter().map(|b| distribution[b]).sum();

    let summary = RunSummary {
        n: g.n(),
        edge_count: g.edges().len(),
        k: sched.k(),
        c_star: oracle.c_star,
        degeneracy: oracle.degeneracy,
        p_succ,
        median_dtheta_min: crowding.summary_median,
        max_dtheta_min: crowding.summary_max,
        nontrivial_cycle_count: permutation.nontrivial_cycle_count,
    };

    Ok(ExperimentArtifacts {
        graph: g.clone(),
        oracle,
        summary,
        crowding,
        track,
        permutation,
        terminal_clusters: clusters,
        manifold,
        distribution,
        state_consistency_residual: core.state_consistency_residual,
        reunitarizations: core.reunitarizations,
    })
}

/// Run a configured experiment end-to-end and write all output files.
pub fn run_experiment(cfg: &RunConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let g = cfg.graph.load().stage("graph")?;
    let sched = cfg.schedule().stage("schedule")?;
    let art = run_pipeline(&g, &sched)?;
    emit_outputs(&art, &cfg.out_dir).stage("report")?;
    if let Some(shots) = cfg.shots {
        emit_samples(&art, shots, cfg.seed.unwrap_or(0), &cfg.out_dir).stage("report")?;
    }
    Ok(art.summary)
}

/// Run one experiment per depth K concurrently. Each run writes into
/// `<out_dir>/k<K>/`; summaries return in the order of `ks`.
pub fn run_sweep(base: &RunConfig, ks: &[usize]) -> Result<Vec<RunSummary>> {
    let results: Vec<Result<RunSummary>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ks
            .iter()
            .map(|&k| {
                let mut cfg = base.clone();
                scope.spawn(move || {
                    cfg.k = k;
                    cfg.out_dir = cfg.out_dir.join(format!("k{k}"));
                    run_experiment(&cfg)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    results.into_iter().collect()
}

// ═══════════════════════════════════════════════════════════════════
//  Emission
// ═══════════════════════════════════════════════════════════════════

/// Shape of permutation.json.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PermutationReport {
    /// Per consecutive snapshot pair: minimum overlap along the chosen
    /// assignment.
    pub step_min_overlaps: Vec<f64>,
    /// End-to-end permutation as an index array.
    pub pi: Vec<usize>,
    /// Disjoint cycles (fixed points as singletons).
    pub cycles: Vec<Vec<usize>>,
    pub nontrivial_cycle_count: usize,
    /// Steps where greedy matching disagreed with the optimal assignment.
    pub greedy_disagreements: Vec<GreedyDisagreement>,
    pub continuity_breaches: Vec<ContinuityBreach>,
    /// Degenerate terminal phase clusters with the initial slots mapped
    /// into them (gauge-robust membership sets).
    pub terminal_clusters: Vec<TerminalCluster>,
    /// Bands terminating in the solution manifold (often empty).
    pub solution_manifold: ManifoldSubPermutation,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GreedyDisagreement {
    pub step: usize,
    pub optimal_total: f64,
    pub greedy_total: f64,
}

/// Write phases.csv, crowding.csv, histogram.csv, permutation.json, and
/// summary.json into `out_dir` (created if missing). Returns the paths
/// written.
pub fn emit_outputs(art: &ExperimentArtifacts, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir.to_path_buf(), e))?;
    let mut written = Vec::new();

    // phases.csv: tracked ordering; band_index is the thread label, so a
    // fixed band_index follows one continuous trajectory.
    let mut phases = String::from("s,band_index,theta\n");
    for (snap_idx, &s) in art.track.snapshot_s.iter().enumerate() {
        for band in 0..art.track.band_count {
            let theta = art.track.trajectories[(band, snap_idx)];
            let _ = writeln!(phases, "{s},{band},{theta}");
        }
    }
    written.push(write_file(out_dir.join("phases.csv"), &phases)?);

    let mut crowding = String::from("s,dtheta_min\n");
    for &(s, d) in &art.crowding.points {
        let _ = writeln!(crowding, "{s},{d}");
    }
    written.push(write_file(out_dir.join("crowding.csv"), &crowding)?);

    let mut histogram = String::from("bitstring,probability,cut_value,is_optimal\n");
    for (b, &p) in art.distribution.iter().enumerate() {
        let z = crate::basis_index_to_bitstring(b, art.graph.n());
        let c = cut_value_of_index(&art.graph, b);
        let opt = if c == art.oracle.c_star { "true" } else { "false" };
        let _ = writeln!(histogram, "{z},{p},{c},{opt}");
    }
    written.push(write_file(out_dir.join("histogram.csv"), &histogram)?);

    let report = PermutationReport {
        step_min_overlaps: art.track.step_min_overlaps.clone(),
        pi: art.permutation.pi.clone(),
        cycles: art.permutation.cycles.clone(),
        nontrivial_cycle_count: art.permutation.nontrivial_cycle_count,
        greedy_disagreements: art
            .track
            .greedy_disagreements
            .iter()
            .map(|&(step, optimal_total, greedy_total)| GreedyDisagreement {
                step,
                optimal_total,
                greedy_total,
            })
            .collect(),
        continuity_breaches: art.track.continuity_breaches.clone(),
        terminal_clusters: art.terminal_clusters.clone(),
        solution_manifold: art.manifold.clone(),
    };
    written.push(write_file(out_dir.join("permutation.json"), &to_json(&report)?)?);
    written.push(write_file(out_dir.join("summary.json"), &to_json(&art.summary)?)?);
    Ok(written)
}

/// Draw a deterministic shot histogram (inverse-CDF under ChaCha8) and
/// write samples.csv (bitstring, count; counts sum to `shots`).
pub fn emit_samples(
    art: &ExperimentArtifacts,
    shots: u64,
    seed: u64,
    out_dir: &Path,
) -> Result<PathBuf> {
    let counts = sample_counts(&art.distribution, shots, seed);
    let mut text = String::from("bitstring,count\n");
    for (b, &c) in counts.iter().enumerate() {
        let z = crate::basis_index_to_bitstring(b, art.graph.n());
        let _ = writeln!(text, "{z},{c}");
    }
    write_file(out_dir.join("samples.csv"), &text)
}

/// Multinomial sampling of basis indices by inverse CDF; deterministic for
/// a fixed seed.
pub fn sample_counts(distribution: &[f64], shots: u64, seed: u64) -> Vec<u64> {
    let mut cumulative = Vec::with_capacity(distribution.len());
    let mut acc = 0.0;
    for &p in distribution {
        acc += p;
        cumulative.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; distribution.len()];
    for _ in 0..shots {
        let u: f64 = rng.gen();
        let idx = cumulative.partition_point(|&c| c <= u).min(distribution.len() - 1);
        counts[idx] += 1;
    }
    counts
}

fn write_file(path: PathBuf, text: &str) -> Result<PathBuf> {
    fs::write(&path, text).map_err(|e| Error::io(path.clone(), e))?;
    Ok(path)
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Fixed-width table of summary rows for terminal output.
pub fn summary_table(rows: &[RunSummary]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>6} {:>4} {:>5} {:>5} {:>4} {:>10} {:>15} {:>15} {:>5}",
        "K", "n", "|E|", "C*", "deg", "p_succ", "median_dtheta", "max_dtheta", "ncyc"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:>6} {:>4} {:>5} {:>5} {:>4} {:>10.6} {:>15.6e} {:>15.6e} {:>5}",
            r.k,
            r.n,
            r.edge_count,
            r.c_star,
            r.degeneracy,
            r.p_succ,
            r.median_dtheta_min,
            r.max_dtheta_min,
            r.nontrivial_cycle_count
        );
    }
    out
}

/// Human-readable oracle report for the `solve` subcommand.
pub fn oracle_report(g: &GraphInstance, oracle: &CutOracleResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "n = {}", g.n());
    let _ = writeln!(out, "edges = {}", g.edges().len());
    let _ = writeln!(out, "c_star = {}", oracle.c_star);
    let _ = writeln!(out, "degeneracy = {}", oracle.degeneracy);
    for z in &oracle.optimal_set {
        let _ = writeln!(out, "optimal = {z}");
    }
    out
}
