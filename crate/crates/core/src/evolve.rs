//! The digitized evolution loop: cumulative unitary, snapshots, statistics.
//!
//! The schedule is linear: s_ℓ = ℓ/K for ℓ = 1..K, β_ℓ = (1 − s_ℓ)·Δt,
//! γ_ℓ = s_ℓ·Δt with Δt = T/K. The cumulative unitary U_ℓ = S_ℓ·U_{ℓ−1}
//! (U_0 = I) is maintained densely; every recorded step yields a spectral
//! snapshot. The state vector is propagated incrementally alongside and
//! cross-checked against U_K·ψ0 at the end.
//!
//! Storage note: the cumulative matrix is held transposed in row-major
//! layout, so each logical column of U is a contiguous row of the buffer.
//! Butterfly sweeps then run on contiguous memory, and the same buffer is
//! directly the column-major image of U that LAPACK expects.

use crate::error::{Error, Result};
use crate::graph::{CutOracleResult, GraphInstance};
use crate::hamiltonian::{unitarity_residual, StepApplier};
use crate::spectral::{eigendecompose_colmajor, SpectralSnapshot};
use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;

// ═══════════════════════════════════════════════════════════════════
//  Schedule
// ═══════════════════════════════════════════════════════════════════

/// Digitization parameters: step count K, total time T, mixer scale, and
/// the snapshot stride.
///
/// Invariants: s_ℓ = ℓ/K ∈ (0, 1] with s_K = 1 exactly; β_ℓ ≥ 0, γ_ℓ ≥ 0,
/// and β_K = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    k: usize,
    t: f64,
    mixer_scale: f64,
    snapshot_stride: usize,
}

impl Schedule {
    /// Default mixer scale used throughout the bundled experiments.
    pub const DEFAULT_MIXER_SCALE: f64 = 5.0;

    /// Build a schedule with the default mixer scale (5) and default
    /// stride (`max(1, ⌊K/100⌋)`, roughly 100 snapshots).
    pub fn new(k: usize, t: f64) -> Result<Self> {
        Self::with_params(k, t, Self::DEFAULT_MIXER_SCALE, Self::default_stride(k))
    }

    /// Build a schedule with explicit mixer scale and stride.
    pub fn with_params(k: usize, t: f64, mixer_scale: f64, snapshot_stride: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Schedule("step count K must be positive".into()));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Schedule(format!("total time T must be positive, got {t}")));
        }
        if !mixer_scale.is_finite() {
            return Err(Error::Schedule(format!("mixer scale must be finite, got {mixer_scale}")));
        }
        if snapshot_stride == 0 {
            return Err(Error::Schedule("snapshot stride must be positive".into()));
        }
        Ok(Schedule { k, t, mixer_scale, snapshot_stride })
    }

    /// Default stride giving about one hundred snapshots.
    pub fn default_stride(k: usize) -> usize {
        (k / 100).max(1)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn mixer_scale(&self) -> f64 {
        self.mixer_scale
    }

    pub fn snapshot_stride(&self) -> usize {
        self.snapshot_stride
    }

    /// Step duration Δt = T/K.
    pub fn dt(&self) -> f64 {
        self.t / self.k as f64
    }

    /// Schedule parameters at step ℓ ∈ 1..=K: (s, β, γ) with s = ℓ/K,
    /// β = (1 − s)·Δt, γ = s·Δt.
    ///
    /// # Example
    ///
    /// ```
    /// use qaflow::evolve::Schedule;
    /// let sched = Schedule::new(160, 50.0).unwrap();
    /// let (s, beta, gamma) = sched.params(160).unwrap();
    /// assert_eq!((s, beta), (1.0, 0.0));
    /// assert!((gamma - 0.3125).abs() < 1e-15);
    /// ```
    pub fn params(&self, l: usize) -> Result<(f64, f64, f64)> {
        if l == 0 || l > self.k {
            return Err(Error::Schedule(format!(
                "step index {l} outside 1..={}",
                self.k
            )));
        }
        let s = l as f64 / self.k as f64;
        let dt = self.dt();
        Ok((s, (1.0 - s) * dt, s * dt))
    }

    /// Ordered step indices at which snapshots are recorded:
    /// every stride-th step starting at ℓ = 1, plus always ℓ = K.
    pub fn snapshot_steps(&self) -> Vec<usize> {
        let mut steps: Vec<usize> = (1..=self.k).step_by(self.snapshot_stride).collect();
        if *steps.last().unwrap() != self.k {
            steps.push(self.k);
        }
        steps
    }
}

// ═══════════════════════════════════════════════════════════════════
//  Cumulative unitary storage
// ═══════════════════════════════════════════════════════════════════

/// Dense cumulative unitary, stored transposed (row j of the internal
/// buffer is logical column j of U). The raw buffer is therefore exactly
/// the column-major image of U.
#[derive(Debug, Clone)]
pub struct CumulativeUnitary {
    ut: Array2<Complex64>,
}

impl CumulativeUnitary {
    pub fn identity(dim: usize) -> Self {
        let mut ut = Array2::zeros((dim, dim));
        for i in 0..dim {
            ut[(i, i)] = Complex64::new(1.0, 0.0);
        }
        CumulativeUnitary { ut }
    }

    pub fn dimension(&self) -> usize {
        self.ut.nrows()
    }

    /// Logical view of U (a transposed view of the internal buffer).
    pub fn view(&self) -> ArrayView2<'_, Complex64> {
        self.ut.t()
    }

    /// Column-major buffer of U (contiguous; column j at offset j·dim).
    pub fn col_major_slice(&self) -> &[Complex64] {
        self.ut.as_slice().expect("buffer is contiguous row-major")
    }

    /// Apply one digitized step to every column of U in place.
    pub fn apply_step(&mut self, applier: &StepApplier, beta: f64, gamma: f64, mixer_scale: f64) {
        for mut col in self.ut.outer_iter_mut() {
            let slice = col.as_slice_mut().expect("rows are contiguous");
            applier.apply_step(slice, beta, gamma, mixer_scale);
        }
    }

    /// Max-norm unitarity residual ‖U†U − I‖_max. Computed on the
    /// transposed buffer, which has the same residual as U.
    pub fn residual(&self) -> f64 {
        unitarity_residual(&self.ut.view())
    }

    /// Any non-finite entry present.
    pub fn has_non_finite(&self) -> bool {
        self.ut.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
    }

    /// Modified Gram-Schmidt re-orthonormalization of the columns of U.
    /// Used only when the monitored residual exceeds its budget.
    pub fn reunitarize(&mut self) {
        let dim = self.dimension();
        for j in 0..dim {
            let (done, mut rest) = self.ut.view_mut().split_at(ndarray::Axis(0), j);
            let col_j = rest.row_mut(0);
            let col_j = col_j.into_slice().expect("rows are contiguous");
            for i in 0..j {
                let prev = done.row(i);
                let prev = prev.to_slice().expect("rows are contiguous");
                let overlap: Complex64 =
                    prev.iter().zip(col_j.iter()).map(|(p, x)| p.conj() * x).sum();
                for (x, p) in col_j.iter_mut().zip(prev.iter()) {
                    *x -= overlap * p;
                }
            }
            let norm: f64 = col_j.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            for x in col_j.iter_mut() {
                *x /= norm;
            }
        }
    }

    /// U · ψ for a state vector ψ.
    pub fn apply_to_state(&self, state: &[Complex64]) -> Vec<Complex64> {
        let dim = self.dimension();
        debug_assert_eq!(state.len(), dim);
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        // out = Σ_j ψ_j · column_j(U); columns are contiguous rows of ut.
        for (j, col) in self.ut.outer_iter().enumerate() {
            let col = col.to_slice().expect("rows are contiguous");
            let amp = state[j];
            for (o, c) in out.iter_mut().zip(col) {
                *o += amp * c;
            }
        }
        out
    }
}

// ═══════════════════════════════════════════════════════════════════
//  Evolution loop
// ═══════════════════════════════════════════════════════════════════

/// Budget on the monitored cumulative unitarity residual; exceeding it
/// triggers re-orthonormalization (recorded, not fatal).
pub const UNITARITY_BUDGET: f64 = 1e-9;

/// One recorded re-orthonormalization.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ReunitarizationEvent {
    pub step: usize,
    pub residual_before: f64,
    pub residual_after: f64,
}

/// Context handed to the snapshot callback of [`evolve_with`].
pub struct StepContext<'a> {
    /// Step index ℓ ∈ 1..=K.
    pub step: usize,
    /// Interpolation parameter s = ℓ/K.
    pub s: f64,
    /// The cumulative unitary U(0→s), immutable for the duration of the call.
    pub unitary: &'a CumulativeUnitary,
    /// Monitored unitarity residual at this snapshot.
    pub residual: f64,
}

/// Core results of an evolution run (snapshot handling left to the caller).
#[derive(Debug, Clone)]
pub struct EvolutionCore {
    /// ψ(1) = U_K · ψ0, propagated incrementally.
    pub final_state: Vec<Complex64>,
    /// ‖ψ(1) − U_K·ψ0‖₂ between the incremental state and the matrix path.
    pub state_consistency_residual: f64,
    /// Re-orthonormalizations triggered by the residual monitor.
    pub reunitarizations: Vec<ReunitarizationEvent>,
}

/// Full evolution result with materialized spectral snapshots.
///
/// Invariants: outcome probabilities sum to 1 within 1e-10; the final state
/// has unit norm within 1e-10.
#[derive(Debug, Clone)]
pub struct EvolutionResult {
    /// One spectral snapshot per recorded step, in step order.
    pub snapshots: Vec<SpectralSnapshot>,
    pub final_state: Vec<Complex64>,
    /// Probability per basis index: |amplitude|².
    pub outcome_distribution: Vec<f64>,
    pub state_consistency_residual: f64,
    pub reunitarizations: Vec<ReunitarizationEvent>,
}

/// The uniform superposition ψ0 with every amplitude 2^{−n/2}.
pub fn initial_state(n: usize) -> Vec<Complex64> {
    let dim = 1usize << n;
    let amp = (dim as f64).sqrt().recip();
    vec![Complex64::new(amp, 0.0); dim]
}

/// Run the digitized evolution, invoking `on_snapshot` at every recorded
/// step (every stride-th step, always including ℓ=1 and ℓ=K) while keeping
/// only one dense matrix live. The callback borrows the cumulative unitary
/// and may eigendecompose, copy, or stream from it.
pub fn evolve_with<F>(g: &GraphInstance, sched: &Schedule, mut on_snapshot: F) -> Result<EvolutionCore>
where
    F: FnMut(StepContext<'_>) -> Result<()>,
{
    let applier = StepApplier::new(g);
    let dim = g.dimension();
    let mut u = CumulativeUnitary::identity(dim);
    let mut state = initial_state(g.n());
    let mut reunitarizations = Vec::new();

    let record: std::collections::BTreeSet<usize> = sched.snapshot_steps().into_iter().collect();
    for l in 1..=sched.k() {
        let (s, beta, gamma) = sched.params(l)?;
        u.apply_step(&applier, beta, gamma, sched.mixer_scale());
        applier.apply_step(&mut state, beta, gamma, sched.mixer_scale());
        if !record.contains(&l) {
            continue;
        }
        if u.has_non_finite() || state.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(l));
        }
        let mut residual = u.residual();
        if residual > UNITARITY_BUDGET {
            let before = residual;
            u.reunitarize();
            residual = u.residual();
            reunitarizations.push(ReunitarizationEvent {
                step: l,
                residual_before: before,
                residual_after: residual,
            });
        }
        on_snapshot(StepContext { step: l, s, unitary: &u, residual })?;
    }

    // Cross-check the incremental state against the matrix path.
    let from_matrix = u.apply_to_state(&initial_state(g.n()));
    let state_consistency_residual = state
        .iter()
        .zip(&from_matrix)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();

    Ok(EvolutionCore { final_state: state, state_consistency_residual, reunitarizations })
}

/// Run the evolution and materialize every recorded snapshot (eigenphases
/// and eigenvectors of the cumulative unitary), the final state, and the
/// exact outcome distribution.
pub fn run_evolution(g: &GraphInstance, sched: &Schedule) -> Result<EvolutionResult> {
    let mut snapshots = Vec::with_capacity(sched.snapshot_steps().len());
    let core = evolve_with(g, sched, |ctx| {
        let snap =
            eigendecompose_colmajor(ctx.unitary.col_major_slice(), ctx.unitary.dimension(), ctx.s)?;
        snapshots.push(snap);
        Ok(())
    })?;
    let outcome_distribution: Vec<f64> = core.final_state.iter().map(|z| z.norm_sqr()).collect();
    Ok(EvolutionResult {
        snapshots,
        final_state: core.final_state,
        outcome_distribution,
        state_consistency_residual: core.state_consistency_residual,
        reunitarizations: core.reunitarizations,
    })
}

/// Probability mass of the outcome distribution on the oracle's optimal
/// set.
pub fn success_probability(res: &EvolutionResult, oracle: &CutOracleResult) -> f64 {
    oracle
        .optimal_indices()
        .into_iter()
        .map(|b| res.outcome_distribution[b])
        .sum()
}
