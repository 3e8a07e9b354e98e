//! Property suite for the spectral layer: circular-gap identities under
//! random phase sets, and eigendecomposition residuals on random unitaries
//! assembled from step circuits.

use ndarray::Array2;
use num_complex::Complex64;
use proptest::prelude::*;
use qaflow::graph::GraphInstance;
use qaflow::hamiltonian::step_unitary;
use qaflow::spectral::{
    circular_min_gap, eigendecompose_unitary, orthonormality_residual, reconstruction_residual,
};
use std::f64::consts::PI;

/// Wrap into (−π, π].
fn wrap(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    if t <= -PI {
        t += 2.0 * PI;
    }
    t
}

fn sorted_phases(raw: Vec<f64>) -> Vec<f64> {
    let mut phases: Vec<f64> = raw.into_iter().map(wrap).collect();
    phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
    phases
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    /// The circular gaps of any phase multiset tile the circle: they sum
    /// to exactly 2π.
    #[test]
    fn circular_gaps_sum_to_two_pi(raw in prop::collection::vec(-10.0f64..10.0, 2..64)) {
        let phases = sorted_phases(raw);
        let mut total = phases[0] + 2.0 * PI - phases[phases.len() - 1];
        for w in phases.windows(2) {
            total += w[1] - w[0];
        }
        prop_assert!((total - 2.0 * PI).abs() < 1e-10);
        // And the minimum gap never exceeds the mean gap.
        let min = circular_min_gap(&phases).unwrap();
        prop_assert!(min <= 2.0 * PI / phases.len() as f64 + 1e-12);
    }

    /// Δθ_min is invariant under a global phase rotation (multiplying the
    /// unitary by e^{iδ} shifts every eigenphase by δ).
    #[test]
    fn min_gap_invariant_under_global_rotation(
        raw in prop::collection::vec(-10.0f64..10.0, 2..64),
        delta in -10.0f64..10.0,
    ) {
        let phases = sorted_phases(raw);
        let rotated = sorted_phases(phases.iter().map(|&t| t + delta).collect());
        let a = circular_min_gap(&phases).unwrap();
        let b = circular_min_gap(&rotated).unwrap();
        prop_assert!((a - b).abs() < 1e-12, "min gap moved: {a} vs {b}");
    }

    /// Gap computation agrees with a brute-force pairwise circular
    /// distance minimum.
    #[test]
    fn min_gap_matches_pairwise_minimum(raw in prop::collection::vec(-10.0f64..10.0, 2..24)) {
        let phases = sorted_phases(raw);
        let fast = circular_min_gap(&phases).unwrap();
        let mut brute = f64::INFINITY;
        for i in 0..phases.len() {
            for j in (i + 1)..phases.len() {
                let mut d = (phases[i] - phases[j]).rem_euclid(2.0 * PI);
                if d > PI {
                    d = 2.0 * PI - d;
                }
                brute = brute.min(d);
            }
        }
        prop_assert!((fast - brute).abs() < 1e-12);
    }
}

/// Deterministic pseudo-random step parameters.
fn lcg(seed: &mut u64) -> f64 {
    *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
}

/// A generic unitary: product of several digitized steps with random
/// parameters on a fixed graph.
fn random_unitary(n: usize, layers: usize, seed: u64) -> Array2<Complex64> {
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let g = GraphInstance::new(n, edges).unwrap();
    let mut seed = seed;
    let mut u: Array2<Complex64> = Array2::eye(1 << n);
    for _ in 0..layers {
        let beta = lcg(&mut seed);
        let gamma = lcg(&mut seed);
        u = step_unitary(&g, beta, gamma, 5.0).dot(&u);
    }
    u
}

#[test]
fn eigendecomposition_residuals_on_random_unitaries() {
    for (n, seed) in [(2usize, 1u64), (3, 2), (3, 3), (4, 4)] {
        let u = random_unitary(n, 12, seed);
        let snap = eigendecompose_unitary(&u.view(), 0.5).unwrap();
        assert!(snap.phases.windows(2).all(|w| w[0] <= w[1]), "phases sorted");
        assert!(snap.phases.iter().all(|&t| -PI < t && t <= PI), "branch");
        let rec = reconstruction_residual(&u.view(), &snap);
        assert!(rec <= 1e-8, "reconstruction residual {rec} (n={n})");
        let orth = orthonormality_residual(&snap);
        assert!(orth <= 1e-9, "orthonormality residual {orth} (n={n})");
    }
}

#[test]
fn eigendecomposition_rejects_non_unitary_input() {
    let double: Array2<Complex64> = Array2::eye(4) * Complex64::new(2.0, 0.0);
    let err = eigendecompose_unitary(&double.view(), 0.5).unwrap_err();
    assert!(matches!(err, qaflow::Error::NonUnitary(_)), "{err}");
    let rect: Array2<Complex64> = Array2::zeros((2, 3));
    assert!(eigendecompose_unitary(&rect.view(), 0.5).is_err());
}

#[test]
fn known_diagonal_spectrum_is_recovered() {
    // diag(e^{iθ}) with θ = −3π/4, −π/4, π/4, 3π/4: phases and basis
    // eigenvectors come back exactly (up to sorting).
    let thetas = [-2.356194490192345, -0.7853981633974483, 0.7853981633974483, 2.356194490192345];
    let mut u: Array2<Complex64> = Array2::zeros((4, 4));
    for (i, &t) in thetas.iter().enumerate() {
        u[(i, i)] = Complex64::from_polar(1.0, t);
    }
    let snap = eigendecompose_unitary(&u.view(), 1.0).unwrap();
    for (a, b) in snap.phases.iter().zip(thetas.iter()) {
        assert!((a - b).abs() < 1e-12);
    }
    let gap = circular_min_gap(&snap.phases).unwrap();
    assert!((gap - PI / 2.0).abs() < 1e-12);
}

#[test]
fn degenerate_cluster_columns_stay_orthonormal() {
    // An exactly degenerate pair: the in-cluster gauge is arbitrary, but
    // the delivered columns must still be orthonormal after the cluster
    // re-orthonormalization pass.
    let mut u: Array2<Complex64> = Array2::zeros((4, 4));
    u[(0, 0)] = Complex64::new(1.0, 0.0);
    u[(1, 1)] = Complex64::new(1.0, 0.0);
    u[(2, 2)] = Complex64::from_polar(1.0, 1.0);
    u[(3, 3)] = Complex64::from_polar(1.0, 2.0);
    let snap = eigendecompose_unitary(&u.view(), 1.0).unwrap();
    assert!(orthonormality_residual(&snap) <= 1e-10);
    assert!((snap.phases[0] - 0.0).abs() < 1e-12);
    assert!((snap.phases[1] - 0.0).abs() < 1e-12);
}
