//! Simulator and spectral-flow diagnostics for digitized adiabatic MaxCut evolutions.
//!
//! A digitized adiabatic protocol alternates short mixer and cost evolutions
//! along a linear interpolation schedule. This crate simulates that protocol
//! exactly on small graphs and analyzes the *cumulative* evolution operator
//! U(0→s_k), the ordered product of all step unitaries up to step k:
//!
//! - **graph**: MaxCut instances, edge-list parsing, and an exact brute-force
//!   oracle for the optimal cut value, its degeneracy, and the optimal set.
//! - **hamiltonian**: cost diagonal, mixer and cost-phase layers, and the
//!   per-step unitary under fixed rotation-gate conventions, with an
//!   O(n·2^n) structured state application path.
//! - **evolve**: the linear schedule, the cumulative-unitary evolution loop,
//!   snapshot recording, and final measurement statistics.
//! - **spectral**: eigenphases θ ∈ (−π, π] and eigenvectors of each recorded
//!   cumulative unitary, and the congestion diagnostic Δθ_min(s) with
//!   circular wrap-around.
//! - **tracking**: eigenvector-overlap band tracking across snapshots, the
//!   end-to-end band permutation, and its cycle decomposition.
//! - **report**: experiment orchestration, Table-style run summaries, and
//!   stable CSV/JSON artifact emission.
//!
//! # Conventions (fixed repo-wide)
//!
//! - **Bit convention**: bit i of a cut bitstring corresponds to qubit i, and
//!   the basis index is b = Σ_i z_i·2^i (little-endian). Rendered bitstrings
//!   place bit i at character position i, so basis index 1 on two qubits
//!   renders as "10" (qubit 0 set). All modules share this convention.
//! - **Eigenphase branch**: phases live in the half-open interval (−π, π];
//!   a phase at exactly −π is reported as +π.
//! - **Gate conventions**: an X-rotation by φ is
//!   [[cos(φ/2), −i·sin(φ/2)], [−i·sin(φ/2), cos(φ/2)]]; the two-qubit ZZ
//!   phase gate with angle φ multiplies basis state b by
//!   e^{−i(φ/2)·σ_i(b)σ_j(b)} with σ(b) = ±1 the spin of the relevant bit.
//!   Each step applies mixer rotations first, then cost phases.
//!
//! # Quick start
//!
//! ```
//! use qaflow::graph::GraphInstance;
//! use qaflow::evolve::{run_evolution, success_probability, Schedule};
//!
//! let g = GraphInstance::parse_edge_list("n 2\n0 1\n").unwrap();
//! let oracle = qaflow::graph::brute_force_optimum(&g).unwrap();
//! let sched = Schedule::new(160, 50.0).unwrap();
//! let result = run_evolution(&g, &sched).unwrap();
//! let p = success_probability(&result, &oracle);
//! assert!(p > 0.99);
//! ```
//!
//! Runnable walkthroughs live in `examples/`: `solve_instance`,
//! `run_evolution`, `crowding_curve`, `track_bands`, and `sweep_depths`.
//! The `qaflow` binary exposes the same pipeline as a CLI with `solve`,
//! `evolve`, and `sweep` subcommands.

// Force linkage of the BLAS/LAPACK provider.
extern crate blas_src;
extern crate openblas_src;

pub mod error;
pub mod graph;
pub mod hamiltonian;
pub mod evolve;
pub mod spectral;
pub mod assignment;
pub mod tracking;
pub mod report;

pub use error::{Error, Result};

/// Largest vertex count accepted by default (2^12 = 4096-dimensional dense
/// simulation is the practical ceiling for the dense pipeline).
pub const DEFAULT_MAX_VERTICES: usize = 12;

/// Render a basis index as a bitstring under the repo-wide convention:
/// character position i holds bit i (qubit i), so index 1 on two qubits
/// renders as "10".
pub fn basis_index_to_bitstring(b: usize, n: usize) -> String {
    (0..n).map(|i| if (b >> i) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Parse a bitstring under the repo-wide convention (inverse of
/// [`basis_index_to_bitstring`]).
///
/// Errors if the string contains characters other than '0'/'1'.
pub fn bitstring_to_basis_index(z: &str) -> Result<usize> {
    let mut b = 0usize;
    for (i, c) in z.chars().enumerate() {
        match c {
            '0' => {}
            '1' => b |= 1 << i,
            other => {
                return Err(Error::Bitstring(format!(
                    "invalid character {other:?} at position {i}"
                )))
            }
        }
    }
    Ok(b)
}
