//! Cost and mixer layers and the per-step digitized unitary.
//!
//! One digitized step applies an X-rotation by `mixer_scale·β` to every
//! qubit, then a ZZ phase gate with angle `−2γ` across every edge. Gate
//! conventions (fixed repo-wide):
//!
//! - X-rotation by φ: [[cos(φ/2), −i·sin(φ/2)], [−i·sin(φ/2), cos(φ/2)]].
//! - ZZ phase gate with angle φ on edge (i, j): multiplies basis state b by
//!   e^{−i(φ/2)·σ_i(b)σ_j(b)}, where σ(b) = 1 − 2·bit = ±1.
//!
//! Composed over all edges at angle −2γ, the cost layer is the diagonal
//! e^{+iγ·Σ_{(i,j)} σ_i(b)σ_j(b)}; with m edges and cut count c(b), the
//! spin sum equals m − 2·c(b), so a step costs one table lookup per
//! amplitude plus n butterfly sweeps: O(n·2^n) per state vector. Dense
//! 2^n×2^n matrices are materialized only by the explicit constructors
//! below; the evolution loop uses the structured path.

use crate::error::Result;
use crate::graph::{cut_value_of_index, GraphInstance};
use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;

/// Dense complex matrix of one digitized layer or step.
/// Invariant: unitary to tolerance ‖U†U − I‖_max ≤ 1e-10.
pub type StepUnitary = Array2<Complex64>;

// ═══════════════════════════════════════════════════════════════════
//  Cost diagonal
// ═══════════════════════════════════════════════════════════════════

/// Diagonal of the cost Hamiltonian: entry at basis index b is the cut
/// value of the bitstring z(b).
///
/// Invariants: all entries are non-negative integers ≤ |edges|; the maximum
/// entry equals the brute-force c_star and its multiplicity equals the
/// solution degeneracy.
#[derive(Debug, Clone, PartialEq)]
pub struct CostDiagonal {
    /// values[b] = cut value of z(b), as reals.
    pub values: Vec<f64>,
}

/// Cut value per basis index, as integers (the engine behind
/// [`cost_diagonal`] and the cost-phase table).
pub fn cut_counts(g: &GraphInstance) -> Vec<u32> {
    (0..g.dimension()).map(|b| cut_value_of_index(g, b)).collect()
}

/// Build the cost diagonal for a graph.
pub fn cost_diagonal(g: &GraphInstance) -> CostDiagonal {
    CostDiagonal { values: cut_counts(g).into_iter().map(f64::from).collect() }
}

// ═══════════════════════════════════════════════════════════════════
//  Structured O(n·2^n) step application
// ═══════════════════════════════════════════════════════════════════

/// Per-graph machinery for applying digitized steps to state vectors in
/// O(n·2^n) without materializing matrices.
#[derive(Debug, Clone)]
pub struct StepApplier {
    n: usize,
    dim: usize,
    edge_count: usize,
    cut_counts: Vec<u32>,
}

impl StepApplier {
    pub fn new(g: &GraphInstance) -> Self {
        StepApplier {
            n: g.n(),
            dim: g.dimension(),
            edge_count: g.edges().len(),
            cut_counts: cut_counts(g),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Apply the mixer layer (X-rotation by `angle` on every qubit)
    /// in place: n butterfly sweeps.
    pub fn apply_mixer(&self, state: &mut [Complex64], angle: f64) {
        debug_assert_eq!(state.len(), self.dim);
        let c = (angle / 2.0).cos();
        let s = (angle / 2.0).sin();
        for q in 0..self.n {
            let half = 1usize << q;
            let mut base = 0;
            while base < self.dim {
                for b in base..base + half {
                    let x0 = state[b];
                    let x1 = state[b + half];
                    // [[c, -i s], [-i s, c]] acting on (x0, x1).
                    state[b] = Complex64::new(c * x0.re + s * x1.im, c * x0.im - s * x1.re);
                    state[b + half] =
                        Complex64::new(s * x0.im + c * x1.re, -s * x0.re + c * x1.im);
                }
                base += half << 1;
            }
        }
    }

    /// Apply the composed cost-phase layer in place: multiply amplitude b
    /// by e^{iγ·(m − 2·cut(b))}.
    pub fn apply_cost_phase(&self, state: &mut [Complex64], gamma: f64) {
        debug_assert_eq!(state.len(), self.dim);
        let table = self.phase_table(gamma);
        for (x, &c) in state.iter_mut().zip(&self.cut_counts) {
            *x *= table[c as usize];
        }
    }

    /// Apply one full step (mixer by `mixer_scale·beta`, then cost phases
    /// by `gamma`) in place.
    pub fn apply_step(&self, state: &mut [Complex64], beta: f64, gamma: f64, mixer_scale: f64) {
        self.apply_mixer(state, mixer_scale * beta);
        self.apply_cost_phase(state, gamma);
    }

    /// Phase lookup table indexed by cut count: table[c] = e^{iγ·(m − 2c)}.
    fn phase_table(&self, gamma: f64) -> Vec<Complex64> {
        (0..=self.edge_count)
            .map(|c| {
                let zz = self.edge_count as f64 - 2.0 * c as f64;
                Complex64::from_polar(1.0, gamma * zz)
            })
            .collect()
    }
}

// ═══════════════════════════════════════════════════════════════════
//  Dense layer constructors
// ═══════════════════════════════════════════════════════════════════

/// Dense mixer layer: the n-fold tensor product of the single-qubit
/// X-rotation by `angle`. Built by explicit Kronecker products, so it is an
/// independent cross-check of the butterfly path.
///
/// # Example
///
/// ```
/// use qaflow::hamiltonian::mixer_layer;
/// let u = mixer_layer(1, 0.0);
/// assert!((u[(0, 0)].re - 1.0).abs() < 1e-15);
/// ```
pub fn mixer_layer(n: usize, angle: f64) -> StepUnitary {
    let c = (angle / 2.0).cos();
    let s = (angle / 2.0).sin();
    let rx = ndarray::arr2(&[
        [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
        [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
    ]);
    let mut u = Array2::from_elem((1, 1), Complex64::new(1.0, 0.0));
    for _ in 0..n {
        u = kron(&rx, &u);
    }
    u
}

/// Dense composed cost-phase layer: diagonal with entry
/// e^{iγ·(m − 2·cut(b))} at basis index b.
pub fn cost_phase_layer(g: &GraphInstance, gamma: f64) -> StepUnitary {
    let m = g.edges().len() as f64;
    let dim = g.dimension();
    let mut u = Array2::zeros((dim, dim));
    for b in 0..dim {
        let zz = m - 2.0 * f64::from(cut_value_of_index(g, b));
        u[(b, b)] = Complex64::from_polar(1.0, gamma * zz);
    }
    u
}

/// Dense per-step unitary: cost phases applied after the mixer in circuit
/// order, i.e. the cost matrix multiplied on the left of the mixer matrix.
/// Since the cost layer is diagonal, this scales row b of the mixer by the
/// cost phase of b.
pub fn step_unitary(g: &GraphInstance, beta: f64, gamma: f64, mixer_scale: f64) -> StepUnitary {
    let mut u = mixer_layer(g.n(), mixer_scale * beta);
    let m = g.edges().len() as f64;
    for b in 0..g.dimension() {
        let zz = m - 2.0 * f64::from(cut_value_of_index(g, b));
        let phase = Complex64::from_polar(1.0, gamma * zz);
        for x in u.row_mut(b) {
            *x *= phase;
        }
    }
    u
}

/// Max-norm of U†U − I.
pub fn unitarity_residual(u: &ArrayView2<Complex64>) -> f64 {
    let uh = u.mapv(|z| z.conj());
    let prod = uh.t().dot(u);
    let dim = prod.nrows();
    let mut worst = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let target = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

/// Kronecker product a ⊗ b.
fn kron(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Validate that a freshly constructed step is unitary to tolerance.
/// Exposed for callers that build matrices with unusual parameters.
pub fn check_step_unitarity(u: &StepUnitary) -> Result<()> {
    let r = unitarity_residual(&u.view());
    if r > 1e-10 {
        return Err(crate::error::Error::Dimension(format!(
            "step unitarity residual {r:.3e} exceeds 1e-10"
        )));
    }
    Ok(())
}
