//! Band tracking across snapshots and the end-to-end band permutation.
//!
//! Eigenphase bands are threaded through the interpolation by maximizing
//! eigenvector overlap between consecutive snapshots: the overlap matrix
//! O_ij = |⟨v_i^(k), v_j^(k+1)⟩| feeds an optimal linear assignment, which
//! guarantees a bijection even through avoided crossings. Composing the
//! per-step assignments and re-expressing the result between the
//! phase-sorted orderings of the first and last snapshot yields the
//! end-to-end permutation π; its cycles of length ≥ 2 are the operational
//! signature of global band reordering.
//!
//! Tracking confidence: the minimum overlap along each step's assignment is
//! recorded. Low values flag steps where band character dispersed across
//! several eigenvectors and the threading is gauge-sensitive; cycle counts
//! should be read together with this diagnostic.

use crate::assignment::{assignment_total, greedy_max_assignment, max_total_assignment};
use crate::error::{Error, Result};
use crate::spectral::SpectralSnapshot;
use ndarray::Array2;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default projection threshold for membership in the solution manifold:
/// squared projection of a final eigenvector onto the span of the optimal
/// basis states.
pub const MANIFOLD_PROJECTION_THRESHOLD: f64 = 0.9;

// ═══════════════════════════════════════════════════════════════════
//  Overlap and assignment
// ═══════════════════════════════════════════════════════════════════

/// Overlap matrix between two snapshots: entry (i, j) is the modulus of
/// the inner product of unit eigenvectors, |⟨v_i^a, v_j^b⟩| ∈ [0, 1].
/// Row sums of squared entries equal 1 (the columns of b form an
/// orthonormal basis). Errors on dimension mismatch.
pub fn overlap_matrix(a: &SpectralSnapshot, b: &SpectralSnapshot) -> Result<Array2<f64>> {
    if a.dimension() != b.dimension() {
        return Err(Error::Dimension(format!(
            "snapshot dimensions differ: {} vs {}",
            a.dimension(),
            b.dimension()
        )));
    }
    // Rows of conj(Aᵀ) are conjugated eigenvectors of a; multiplying by the
    // eigenvector columns of b lands the Gram matrix on one BLAS gemm.
    let conj_at = a.vectors.t().mapv(|z| z.conj());
    let gram = conj_at.dot(&b.vectors);
    Ok(gram.mapv(|z| z.norm()))
}

/// Bijective band assignment maximizing total overlap (optimal linear
/// assignment). Guarantees a permutation even through avoided crossings.
///
/// # Example
///
/// ```
/// use ndarray::arr2;
/// use qaflow::tracking::assign_bands;
/// // Greedy would pair (0,0) for 0.9 + 0.1 = 1.0; the optimum crosses
/// // over for 0.8 + 0.8 = 1.6.
/// let perm = assign_bands(&arr2(&[[0.9, 0.8], [0.8, 0.1]])).unwrap();
/// assert_eq!(perm, vec![1, 0]);
/// ```
pub fn assign_bands(overlaps: &Array2<f64>) -> Result<Vec<usize>> {
    let (rows, cols) = overlaps.dim();
    if rows != cols {
        return Err(Error::Dimension(format!(
            "overlap matrix is {rows}x{cols}, expected square"
        )));
    }
    Ok(max_total_assignment(overlaps))
}

// ═══════════════════════════════════════════════════════════════════
//  Tracking
// ═══════════════════════════════════════════════════════════════════

/// A trajectory phase jump larger than the continuity threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuityBreach {
    /// Band (thread) index.
    pub band: usize,
    /// Index of the consecutive snapshot pair (0-based).
    pub step: usize,
    /// Circular phase distance observed.
    pub jump: f64,
}

/// Continuously tracked bands: trajectories, per-step assignments, and
/// confidence diagnostics.
///
/// Invariants: each per-step assignment is a bijection; trajectory phases
/// are continuous in the tracked sense, with jumps beyond the configured
/// threshold recorded (not fatal) in `continuity_breaches`.
#[derive(Debug, Clone)]
pub struct BandTrack {
    /// Number of tracked bands (= 2^n when tracking all bands).
    pub band_count: usize,
    /// Interpolation parameter per snapshot.
    pub snapshot_s: Vec<f64>,
    /// Entry (band, snapshot) is the tracked phase of that band.
    pub trajectories: Array2<f64>,
    /// Per consecutive snapshot pair: assignment mapping columns of
    /// snapshot k to columns of snapshot k+1.
    pub assignments: Vec<Vec<usize>>,
    /// Per pair: minimum overlap along the chosen assignment (tracking
    /// confidence).
    pub step_min_overlaps: Vec<f64>,
    /// Pair indices where row-greedy matching disagrees with the optimal
    /// assignment, with the two total overlaps (optimal, greedy).
    pub greedy_disagreements: Vec<(usize, f64, f64)>,
    /// Recorded continuity violations.
    pub continuity_breaches: Vec<ContinuityBreach>,
    /// Circular-jump threshold used for breach recording.
    pub continuity_threshold: f64,
    /// Phases of the first snapshot, in column order.
    pub first_phases: Vec<f64>,
    /// Phases of the last snapshot, in column order.
    pub final_phases: Vec<f64>,
}

/// Streaming tracker: consumes snapshots one at a time, holding only the
/// most recent eigenvector matrix.
#[derive(Debug)]
pub struct BandTracker {
    prev: SpectralSnapshot,
    positions: Vec<usize>,
    snapshot_s: Vec<f64>,
    trajectories: Vec<Vec<f64>>,
    assignments: Vec<Vec<usize>>,
    step_min_overlaps: Vec<f64>,
    greedy_disagreements: Vec<(usize, f64, f64)>,
    continuity_breaches: Vec<ContinuityBreach>,
    continuity_threshold: f64,
    first_phases: Vec<f64>,
}

/// Default continuity threshold: ten times the mean circular spacing
/// 2π/band_count.
pub fn default_continuity_threshold(band_count: usize) -> f64 {
    10.0 * 2.0 * PI / band_count as f64
}

impl BandTracker {
    pub fn new(first: SpectralSnapshot) -> Self {
        let thr = default_continuity_threshold(first.dimension());
        Self::with_continuity_threshold(first, thr)
    }

    pub fn with_continuity_threshold(first: SpectralSnapshot, threshold: f64) -> Self {
        let d = first.dimension();
        BandTracker {
            positions: (0..d).collect(),
            snapshot_s: vec![first.s],
            trajectories: first.phases.iter().map(|&p| vec![p]).collect(),
            assignments: Vec::new(),
            step_min_overlaps: Vec::new(),
            greedy_disagreements: Vec::new(),
            continuity_breaches: Vec::new(),
            continuity_threshold: threshold,
            first_phases: first.phases.clone(),
            prev: first,
        }
    }

    /// Advance the tracking by one snapshot.
    pub fn push(&mut self, snap: SpectralSnapshot) -> Result<()> {
        let overlaps = overlap_matrix(&self.prev, &snap)?;
        let perm = assign_bands(&overlaps)?;
        let d = perm.len();

        let min_overlap = (0..d)
            .map(|i| overlaps[(i, perm[i])])
            .fold(f64::INFINITY, f64::min);
        self.step_min_overlaps.push(min_overlap);

        let greedy = greedy_max_assignment(&overlaps);
        if greedy != perm {
            self.greedy_disagreements.push((
                self.assignments.len(),
                assignment_total(&overlaps, &perm),
                assignment_total(&overlaps, &greedy),
            ));
        }

        let pair_index = self.assignments.len();
        for (band, pos) in self.positions.iter_mut().enumerate() {
            let next_pos = perm[*pos];
            let prev_phase = self.prev.phases[*pos];
            let next_phase = snap.phases[next_pos];
            let jump = circular_distance(prev_phase, next_phase);
            if jump > self.continuity_threshold {
                self.continuity_breaches.push(ContinuityBreach { band, step: pair_index, jump });
            }
            self.trajectories[band].push(next_phase);
            *pos = next_pos;
        }

        self.assignments.push(perm);
        self.snapshot_s.push(snap.s);
        self.prev = snap;
        Ok(())
    }

    /// Snapshots consumed so far.
    pub fn snapshot_count(&self) -> usize {
        self.snapshot_s.len()
    }

    /// Finish tracking; returns the track and the final snapshot (useful
    /// for solution-manifold analysis without re-decomposing).
    pub fn finish(self) -> (BandTrack, SpectralSnapshot) {
        let bands = self.trajectories.len();
        let snaps = self.snapshot_s.len();
        let mut trajectories = Array2::zeros((bands, snaps));
        for (b, traj) in self.trajectories.iter().enumerate() {
            for (k, &p) in traj.iter().enumerate() {
                trajectories[(b, k)] = p;
            }
        }
        let track = BandTrack {
            band_count: bands,
            snapshot_s: self.snapshot_s,
            trajectories,
            assignments: self.assignments,
            step_min_overlaps: self.step_min_overlaps,
            greedy_disagreements: self.greedy_disagreements,
            continuity_breaches: self.continuity_breaches,
            continuity_threshold: self.continuity_threshold,
            first_phases: self.first_phases,
            final_phases: self.prev.phases.clone(),
        };
        (track, self.prev)
    }
}

/// Track all bands across a snapshot list (≥ 2 snapshots of equal
/// dimension).
pub fn track_bands(snapshots: &[SpectralSnapshot]) -> Result<BandTrack> {
    if snapshots.len() < 2 {
        return Err(Error::Dimension("tracking needs at least 2 snapshots".into()));
    }
    let mut tracker = BandTracker::new(snapshots[0].clone());
    for snap in &snapshots[1..] {
        tracker.push(snap.clone())?;
    }
    Ok(tracker.finish().0)
}

/// Circular distance between two phases in (−π, π].
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let mut d = (a - b).rem_euclid(2.0 * PI);
    if d > PI {
        d = 2.0 * PI - d;
    }
    d
}

// ═══════════════════════════════════════════════════════════════════
//  End-to-end permutation
// ═══════════════════════════════════════════════════════════════════

/// The end-to-end band permutation and its cycle decomposition.
///
/// Invariants: `pi` is a bijection; cycle lengths sum to the band count;
/// `nontrivial_cycle_count == 0` iff `pi` is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationResult {
    /// pi[initial sorted slot] = final sorted slot.
    pub pi: Vec<usize>,
    /// Disjoint cycles covering every slot (fixed points as singletons),
    /// each starting at its smallest member, ordered by first member.
    pub cycles: Vec<Vec<usize>>,
    /// Number of cycles of length ≥ 2.
    pub nontrivial_cycle_count: usize,
}

/// Compose the per-step assignments into σ (first-snapshot column to
/// last-snapshot column), re-express between the phase-sorted rank
/// orderings of the endpoint snapshots, and decompose into cycles:
/// pi = rank_final ∘ σ ∘ rank_initial⁻¹.
pub fn end_to_end_permutation(track: &BandTrack) -> PermutationResult {
    let d = track.band_count;
    let mut sigma: Vec<usize> = (0..d).collect();
    for step in &track.assignments {
        for pos in sigma.iter_mut() {
            *pos = step[*pos];
        }
    }
    let rank_initial = phase_ranks(&track.first_phases);
    let rank_final = phase_ranks(&track.final_phases);
    let mut inv_rank_initial = vec![0usize; d];
    for (col, &slot) in rank_initial.iter().enumerate() {
        inv_rank_initial[slot] = col;
    }
    let pi: Vec<usize> = (0..d).map(|slot| rank_final[sigma[inv_rank_initial[slot]]]).collect();
    debug_assert!(is_permutation(&pi));
    let cycles = cycle_decomposition(&pi);
    let nontrivial_cycle_count = cycles.iter().filter(|c| c.len() >= 2).count();
    PermutationResult { pi, cycles, nontrivial_cycle_count }
}

/// rank[col] = sorted slot of phases[col] (stable in column order).
fn phase_ranks(phases: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..phases.len()).collect();
    order.sort_by(|&i, &j| phases[i].partial_cmp(&phases[j]).unwrap().then(i.cmp(&j)));
    let mut rank = vec![0usize; phases.len()];
    for (slot, &col) in order.iter().enumerate() {
        rank[col] = slot;
    }
    rank
}

/// Disjoint-cycle decomposition covering all elements; fixed points appear
/// as singletons. Each cycle starts at its smallest member; cycles are
/// ordered by first member.
pub fn cycle_decomposition(pi: &[usize]) -> Vec<Vec<usize>> {
    let n = pi.len();
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            cycle.push(j);
            j = pi[j];
        }
        cycles.push(cycle);
    }
    cycles
}

/// Whether `p` is a bijection on 0..p.len().
pub fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &j in p {
        if j >= p.len() || seen[j] {
            return false;
        }
        seen[j] = true;
    }
    true
}

// ═══════════════════════════════════════════════════════════════════
//  Gauge-robust diagnostics at the terminal snapshot
// ═══════════════════════════════════════════════════════════════════

/// A cluster of degenerate final eigenphases together with the initial
/// sorted slots that π maps into it. The membership set is gauge-robust
/// even though column identity inside the cluster is not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerminalCluster {
    /// Final sorted slots forming the cluster.
    pub slots: Vec<usize>,
    /// Representative phase (first member).
    pub phase: f64,
    /// Initial sorted slots mapped into the cluster by π.
    pub initial_slots: Vec<usize>,
}

/// Find degenerate clusters (size ≥ 2) among the final phases at the given
/// circular tolerance, merged across the ±π wrap, and report which initial
/// slots π sends into each.
pub fn terminal_clusters(final_phases: &[f64], pi: &[usize], tol: f64) -> Vec<TerminalCluster> {
    let d = final_phases.len();
    if d == 0 {
        return Vec::new();
    }
    let mut sorted: Vec<f64> = final_phases.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut groups: Vec<Vec<usize>> = vec![vec![0]];
    for j in 1..d {
        if sorted[j] - sorted[j - 1] < tol {
            groups.last_mut().unwrap().push(j);
        } else {
            groups.push(vec![j]);
        }
    }
    if groups.len() > 1 && sorted[0] + 2.0 * PI - sorted[d - 1] < tol {
        let first = groups.remove(0);
        groups.last_mut().unwrap().extend(first);
    }
    groups
        .into_iter()
        .filter(|g| g.len() >= 2)
        .map(|slots| {
            let slot_set: std::collections::HashSet<usize> = slots.iter().copied().collect();
            let initial_slots: Vec<usize> =
                (0..d).filter(|&b| slot_set.contains(&pi[b])).collect();
            TerminalCluster { phase: sorted[slots[0]], slots, initial_slots }
        })
        .collect()
}

/// Sub-permutation restricted to the bands terminating in the solution
/// manifold: final columns whose squared projection onto the span of the
/// optimal basis states reaches the threshold, and the (initial slot →
/// final slot) pairs of π landing there. Often empty for deep digitized
/// circuits, whose terminal eigenvectors hybridize far from basis states.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifoldSubPermutation {
    /// Final sorted slots inside the manifold.
    pub final_slots: Vec<usize>,
    /// (initial slot, final slot) pairs of π restricted to the manifold.
    pub mapping: Vec<(usize, usize)>,
}

/// Identify solution-manifold membership of the final snapshot's columns
/// and restrict π to the bands landing there.
pub fn manifold_sub_permutation(
    final_snap: &SpectralSnapshot,
    optimal_indices: &[usize],
    pi: &[usize],
    min_projection: f64,
) -> ManifoldSubPermutation {
    let d = final_snap.dimension();
    let rank_final = phase_ranks(&final_snap.phases);
    let mut final_slots = Vec::new();
    for col in 0..d {
        let v = final_snap.vectors.column(col);
        let proj: f64 = optimal_indices.iter().map(|&b| v[b].norm_sqr()).sum();
        if proj >= min_projection {
            final_slots.push(rank_final[col]);
        }
    }
    final_slots.sort_unstable();
    let slot_set: std::collections::HashSet<usize> = final_slots.iter().copied().collect();
    let mapping: Vec<(usize, usize)> = (0..d)
        .filter(|&b| slot_set.contains(&pi[b]))
        .map(|b| (b, pi[b]))
        .collect();
    ManifoldSubPermutation { final_slots, mapping }
}

// ═══════════════════════════════════════════════════════════════════
//  Refinement comparison
// ═══════════════════════════════════════════════════════════════════

/// Outcome of comparing the end-to-end permutation at two snapshot
/// refinements of the same run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementComparison {
    pub agree: bool,
    /// All per-step minimum assignment overlaps of both tracks exceed 0.5.
    pub confident: bool,
    /// Minimum assignment confidence observed across both tracks.
    pub min_confidence: f64,
}

/// Compare two tracks of the same evolution at different strides. The pass
/// criterion for refinement robustness is agreement whenever both tracks
/// are confident; a disagreement with low confidence is reported, not
/// fatal.
pub fn compare_refinements(a: &BandTrack, b: &BandTrack) -> RefinementComparison {
    let pa = end_to_end_permutation(a);
    let pb = end_to_end_permutation(b);
    let min_a = a.step_min_overlaps.iter().copied().fold(f64::INFINITY, f64::min);
    let min_b = b.step_min_overlaps.iter().copied().fold(f64::INFINITY, f64::min);
    let min_confidence = min_a.min(min_b);
    RefinementComparison {
        agree: pa.pi == pb.pi,
        confident: min_confidence > 0.5,
        min_confidence,
    }
}
