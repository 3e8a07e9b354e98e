//! Thin CLI over the library pipeline: `solve` (oracle only), `evolve`
//! (full run with file outputs), `sweep` (several depths K, one table).
//! All heavy lifting lives in `qaflow::report`.

use clap::{Args, Parser, Subcommand};
use qaflow::graph::brute_force_optimum;
use qaflow::report::{
    oracle_report, parse_sweep_list, run_experiment, run_sweep, summary_table, GraphSource,
    PartialConfig,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qaflow",
    version,
    about = "Digitized adiabatic MaxCut simulator with spectral-flow diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance exactly: optimum, degeneracy, optimal set
    Solve(CommonArgs),
    /// Run the full pipeline and write CSV/JSON diagnostics
    Evolve(CommonArgs),
    /// Run several depths K concurrently; one summary table
    Sweep(CommonArgs),
}

/// Flags mirror the run-config fields; a config file provides the same
/// keys (`key = value`), with flags taking precedence.
#[derive(Args)]
struct CommonArgs {
    /// Edge-list file ("n <count>" header, one "i j" pair per line)
    #[arg(long, value_name = "PATH")]
    graph: Option<PathBuf>,
    /// Config file with key = value lines; flags override it
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Digitization depth K
    #[arg(long, value_name = "INT")]
    k: Option<usize>,
    /// Total evolution time T
    #[arg(long, value_name = "REAL")]
    t: Option<f64>,
    /// Mixer rotation-angle multiplier
    #[arg(long, value_name = "REAL")]
    mixer_scale: Option<f64>,
    /// Record a snapshot every this many steps (1 = every step)
    #[arg(long, value_name = "INT")]
    stride: Option<usize>,
    /// Output directory for CSV/JSON artifacts
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Also write a sampled histogram with this many shots
    #[arg(long, value_name = "INT")]
    shots: Option<u64>,
    /// RNG seed for shot sampling
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,
    /// Comma-separated depths for the sweep subcommand, e.g. 160,240,500
    #[arg(long, value_name = "K1,K2,...")]
    sweep: Option<String>,
}

impl CommonArgs {
    /// Layer config-file values under the flags.
    fn merged(&self) -> qaflow::Result<PartialConfig> {
        let from_flags = PartialConfig {
            graph: self.graph.clone(),
            k: self.k,
            t: self.t,
            mixer_scale: self.mixer_scale,
            stride: self.stride,
            out: self.out.clone(),
            shots: self.shots,
            seed: self.seed,
            sweep: self.sweep.as_deref().map(parse_sweep_list).transpose()?,
        };
        Ok(match &self.config {
            Some(path) => PartialConfig::from_file(path)?.overlaid(from_flags),
            None => from_flags,
        })
    }
}

fn run(cli: Cli) -> qaflow::Result<()> {
    match cli.cmd {
        Cmd::Solve(args) => {
            let merged = args.merged()?;
            let graph = merged.graph.ok_or_else(|| {
                qaflow::Error::Config("a graph is required (--graph PATH or graph = PATH)".into())
            })?;
            let g = GraphSource::Path(graph).load()?;
            let oracle = brute_force_optimum(&g)?;
            print!("{}", oracle_report(&g, &oracle));
        }
        Cmd::Evolve(args) => {
            let cfg = args.merged()?.resolve()?;
            let summary = run_experiment(&cfg)?;
            print!("{}", summary_table(std::slice::from_ref(&summary)));
            println!("wrote {}", cfg.out_dir.display());
        }
        Cmd::Sweep(args) => {
            let merged = args.merged()?;
            let ks = merged.sweep.clone().ok_or_else(|| {
                qaflow::Error::Config("sweep requires --sweep K1,K2,... (or sweep = ...)".into())
            })?;
            let base = merged.resolve()?;
            let summaries = run_sweep(&base, &ks)?;
            print!("{}", summary_table(&summaries));
            println!("wrote {}", base.out_dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qaflow: {e}");
            ExitCode::FAILURE
        }
    }
}
