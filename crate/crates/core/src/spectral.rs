//! Eigenphases, eigenvectors, and the congestion diagnostic Δθ_min.
//!
//! A cumulative unitary is normal, so its Schur form is diagonal: a complex
//! Schur reduction (LAPACK `zgees`) returns unitary Q whose columns are
//! orthonormal eigenvectors and a triangular T whose diagonal carries the
//! eigenvalues e^{iθ}. Phases are taken in the half-open interval (−π, π]
//! (a value at exactly −π is reported as +π) and sorted ascending.
//!
//! Δθ_min is the minimum circular spacing of the sorted phase multiset,
//! including the wrap-around gap θ_0 + 2π − θ_last. With 2^n phases on the
//! circle it is pigeonhole-bounded by 2π/2^n.

use crate::error::{Error, Result};
use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Circular distance below which two eigenphases are treated as one
/// degenerate cluster during re-orthonormalization. Far below physically
/// observed gaps yet far above roundoff.
pub const DEGENERACY_CLUSTER_TOL: f64 = 1e-10;

// ═══════════════════════════════════════════════════════════════════
//  Snapshot type
// ═══════════════════════════════════════════════════════════════════

/// Eigenphases and eigenvectors of one cumulative unitary U(0→s).
///
/// Invariants:
/// - `phases` are sorted ascending, each strictly within (−π, π];
/// - column j of `vectors` is a unit eigenvector for `phases[j]` with
///   reconstruction residual ‖U·v_j − e^{iθ_j}·v_j‖₂ ≤ 1e-8;
/// - columns are pairwise orthonormal within 1e-8.
#[derive(Debug, Clone)]
pub struct SpectralSnapshot {
    /// Interpolation parameter s ∈ (0, 1].
    pub s: f64,
    /// Sorted eigenphases.
    pub phases: Vec<f64>,
    /// Eigenvector matrix; column j belongs to phases[j]. Stored transposed
    /// internally (each eigenvector contiguous); use column views normally.
    pub vectors: Array2<Complex64>,
}

impl SpectralSnapshot {
    /// Band count (Hilbert-space dimension).
    pub fn dimension(&self) -> usize {
        self.phases.len()
    }
}

// ═══════════════════════════════════════════════════════════════════
//  Eigendecomposition (complex Schur on a normal matrix)
// ═══════════════════════════════════════════════════════════════════

/// Eigendecompose a unitary given as a column-major buffer (column j at
/// offset j·dim). This is the hot path used by the evolution loop; the
/// caller is responsible for having monitored unitarity.
pub fn eigendecompose_colmajor(buf: &[Complex64], dim: usize, s: f64) -> Result<SpectralSnapshot> {
    assert_eq!(buf.len(), dim * dim, "buffer length must be dim^2");
    let mut a = buf.to_vec();
    let (w, q) = zgees(&mut a, dim)?;

    // Map eigenvalues to phases in (−π, π], with −π folded to +π.
    let mut order: Vec<usize> = (0..dim).collect();
    let phases_raw: Vec<f64> = w
        .iter()
        .map(|z| {
            let theta = z.arg();
            if theta <= -PI {
                theta + 2.0 * PI
            } else {
                theta
            }
        })
        .collect();
    order.sort_by(|&i, &j| {
        phases_raw[i].partial_cmp(&phases_raw[j]).unwrap().then(i.cmp(&j))
    });
    let phases: Vec<f64> = order.iter().map(|&i| phases_raw[i]).collect();

    // Rows of `vt` are eigenvectors (q is column-major Q, so interpreting
    // its buffer row-major transposes it). Select rows in sorted order,
    // then expose the logical transpose so columns are eigenvectors.
    let vt = Array2::from_shape_vec((dim, dim), q).expect("square buffer");
    let mut sorted_vt = Array2::zeros((dim, dim));
    for (slot, &src) in order.iter().enumerate() {
        sorted_vt.row_mut(slot).assign(&vt.row(src));
    }
    let mut snap = SpectralSnapshot { s, phases, vectors: sorted_vt.reversed_axes() };
    reorthonormalize_degenerate_clusters(&mut snap);
    Ok(snap)
}

/// Full eigendecomposition of a dense unitary, labeled with the
/// interpolation parameter `s` of the snapshot.
///
/// Errors on non-square input, on input whose unitarity residual exceeds
/// 1e-9, and on LAPACK convergence failure.
///
/// # Example
///
/// ```
/// use ndarray::Array2;
/// use num_complex::Complex64;
/// use qaflow::spectral::eigendecompose_unitary;
///
/// let eye: Array2<Complex64> = Array2::eye(4);
/// let snap = eigendecompose_unitary(&eye.view(), 1.0).unwrap();
/// assert!(snap.phases.iter().all(|&t| t.abs() < 1e-12));
/// ```
pub fn eigendecompose_unitary(u: &ArrayView2<Complex64>, s: f64) -> Result<SpectralSnapshot> {
    let (rows, cols) = u.dim();
    if rows != cols {
        return Err(Error::Dimension(format!("matrix is {rows}x{cols}, expected square")));
    }
    let residual = crate::hamiltonian::unitarity_residual(u);
    if residual > 1e-9 {
        return Err(Error::NonUnitary(residual));
    }
    let mut buf = Vec::with_capacity(rows * rows);
    for j in 0..cols {
        for i in 0..rows {
            buf.push(u[(i, j)]);
        }
    }
    eigendecompose_colmajor(&buf, rows, s)
}

/// Re-orthonormalize eigenvector columns inside numerically degenerate
/// phase clusters (circular distance below [`DEGENERACY_CLUSTER_TOL`]),
/// merging the wrap-around cluster across ±π. Within-cluster gauge is
/// arbitrary; this pass only enforces orthonormality.
fn reorthonormalize_degenerate_clusters(snap: &mut SpectralSnapshot) {
    let dim = snap.dimension();
    if dim < 2 {
        return;
    }
    // Group adjacent sorted phases, then merge first and last groups if the
    // wrap-around gap is also inside the tolerance.
    let mut clusters: Vec<Vec<usize>> = vec![vec![0]];
    for j in 1..dim {
        if snap.phases[j] - snap.phases[j - 1] < DEGENERACY_CLUSTER_TOL {
            clusters.last_mut().unwrap().push(j);
        } else {
            clusters.push(vec![j]);
        }
    }
    if clusters.len() > 1 {
        let wrap = snap.phases[0] + 2.0 * PI - snap.phases[dim - 1];
        if wrap < DEGENERACY_CLUSTER_TOL {
            let first = clusters.remove(0);
            clusters.last_mut().unwrap().extend(first);
        }
    }
    for cluster in clusters.iter().filter(|c| c.len() >= 2) {
        // Modified Gram-Schmidt over the cluster's columns.
        for (pos, &j) in cluster.iter().enumerate() {
            for &i in &cluster[..pos] {
                let overlap: Complex64 = {
                    let vi = snap.vectors.column(i);
                    let vj = snap.vectors.column(j);
                    vi.iter().zip(vj.iter()).map(|(a, b)| a.conj() * b).sum()
                };
                let vi = snap.vectors.column(i).to_owned();
                let mut vj = snap.vectors.column_mut(j);
                for (x, p) in vj.iter_mut().zip(vi.iter()) {
                    *x -= overlap * p;
                }
            }
            let norm: f64 = snap.vectors.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for x in snap.vectors.column_mut(j).iter_mut() {
                *x /= norm;
            }
        }
    }
}

/// Raw zgees call on a column-major buffer. Returns (eigenvalues, Schur
/// vectors as a column-major buffer). The input buffer is overwritten with
/// the triangular factor.
fn zgees(a: &mut [Complex64], dim: usize) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    use std::os::raw::c_char;
    let n = dim as i32;
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    let mut vs = vec![Complex64::new(0.0, 0.0); dim * dim];
    let mut sdim = 0i32;
    let mut info = 0i32;
    let mut rwork = vec![0.0f64; dim];
    let jobvs = b"V".as_ptr() as *const c_char;
    let sort = b"N".as_ptr() as *const c_char;

    // Workspace query, then the real call.
    let mut work = vec![Complex64::new(0.0, 0.0); 1];
    let query = -1i32;
    unsafe {
        lapack_sys::zgees_(
            jobvs,
            sort,
            None,
            &n,
            a.as_mut_ptr() as *mut _,
            &n,
            &mut sdim,
            w.as_mut_ptr() as *mut _,
            vs.as_mut_ptr() as *mut _,
            &n,
            work.as_mut_ptr() as *mut _,
            &query,
            rwork.as_mut_ptr(),
            std::ptr::null_mut(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eigendecomposition(info));
    }
    let lwork = work[0].re as i32;
    let mut work = vec![Complex64::new(0.0, 0.0); lwork.max(1) as usize];
    unsafe {
        lapack_sys::zgees_(
            jobvs,
            sort,
            None,
            &n,
            a.as_mut_ptr() as *mut _,
            &n,
            &mut sdim,
            w.as_mut_ptr() as *mut _,
            vs.as_mut_ptr() as *mut _,
            &n,
            work.as_mut_ptr() as *mut _,
            &lwork,
            rwork.as_mut_ptr(),
            std::ptr::null_mut(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eigendecomposition(info));
    }
    Ok((w, vs))
}

// ═══════════════════════════════════════════════════════════════════
//  Diagnostics on snapshots
// ═══════════════════════════════════════════════════════════════════

/// Minimum circular gap of an ascending-sorted phase multiset, including
/// the wrap-around gap. Errors with fewer than 2 phases.
pub fn circular_min_gap(sorted_phases: &[f64]) -> Result<f64> {
    if sorted_phases.len() < 2 {
        return Err(Error::Dimension("Δθ_min needs at least 2 phases".into()));
    }
    debug_assert!(sorted_phases.windows(2).all(|w| w[0] <= w[1]), "phases must be sorted");
    let mut min = sorted_phases[0] + 2.0 * PI - sorted_phases[sorted_phases.len() - 1];
    for pair in sorted_phases.windows(2) {
        min = min.min(pair[1] - pair[0]);
    }
    Ok(min)
}

/// Δθ_min of a snapshot.
///
/// # Example
///
/// ```
/// use qaflow::spectral::circular_min_gap;
/// use std::f64::consts::PI;
/// // Gaps are π/2, π, and wrap π/2.
/// let gap = circular_min_gap(&[-PI / 2.0, 0.0, PI]).unwrap();
/// assert!((gap - PI / 2.0).abs() < 1e-15);
/// ```
pub fn delta_theta_min(snap: &SpectralSnapshot) -> Result<f64> {
    circular_min_gap(&snap.phases)
}

/// A Δθ_min(s) series with its run-level summary statistics.
///
/// Invariant: every point lies in [0, 2π/2^n] by the pigeonhole bound.
#[derive(Debug, Clone, PartialEq)]
pub struct CrowdingSeries {
    /// (s, Δθ_min) pairs in ascending s.
    pub points: Vec<(f64, f64)>,
    /// Median over all points; an even count averages the central two.
    pub summary_median: f64,
    /// Maximum over all points.
    pub summary_max: f64,
}

/// Incremental builder for a [`CrowdingSeries`]; lets the streaming
/// pipeline aggregate without retaining snapshots.
#[derive(Debug, Default)]
pub struct CrowdingAccumulator {
    points: Vec<(f64, f64)>,
}

impl CrowdingAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, s: f64, dtheta_min: f64) {
        self.points.push((s, dtheta_min));
    }

    pub fn finish(self) -> Result<CrowdingSeries> {
        if self.points.is_empty() {
            return Err(Error::Dimension("crowding series needs at least one snapshot".into()));
        }
        let mut vals: Vec<f64> = self.points.iter().map(|&(_, d)| d).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mid = vals.len() / 2;
        let summary_median = if vals.len() % 2 == 1 {
            vals[mid]
        } else {
            0.5 * (vals[mid - 1] + vals[mid])
        };
        let summary_max = *vals.last().unwrap();
        Ok(CrowdingSeries { points: self.points, summary_median, summary_max })
    }
}

/// Compute the Δθ_min series over a snapshot list with summary statistics.
pub fn crowding_series(snapshots: &[SpectralSnapshot]) -> Result<CrowdingSeries> {
    let mut acc = CrowdingAccumulator::new();
    for snap in snapshots {
        acc.push(snap.s, delta_theta_min(snap)?);
    }
    acc.finish()
}

// ═══════════════════════════════════════════════════════════════════
//  Residual checks (used by tests and the acceptance suite)
// ═══════════════════════════════════════════════════════════════════

/// Max over columns of ‖U·v_j − e^{iθ_j}·v_j‖₂ for a snapshot of U.
pub fn reconstruction_residual(u: &ArrayView2<Complex64>, snap: &SpectralSnapshot) -> f64 {
    let dim = snap.dimension();
    let mut worst = 0.0f64;
    for j in 0..dim {
        let v = snap.vectors.column(j);
        let lambda = Complex64::from_polar(1.0, snap.phases[j]);
        let mut err = 0.0f64;
        for i in 0..dim {
            let mut uv = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                uv += u[(i, k)] * v[k];
            }
            err += (uv - lambda * v[i]).norm_sqr();
        }
        worst = worst.max(err.sqrt());
    }
    worst
}

/// Max-norm of V†V − I over the snapshot's eigenvector columns.
pub fn orthonormality_residual(snap: &SpectralSnapshot) -> f64 {
    let vt = snap.vectors.t();
    let conj_vt = vt.mapv(|z| z.conj());
    let gram = conj_vt.dot(&vt.t());
    let dim = snap.dimension();
    let mut worst = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}
