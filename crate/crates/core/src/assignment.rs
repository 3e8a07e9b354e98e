//! Dense optimal linear assignment (square matrices).
//!
//! Shortest-augmenting-path Hungarian method with row/column potentials,
//! O(n³) time and O(n) extra memory per row insertion. Band tracking uses
//! it to turn an overlap matrix into a bijection maximizing total overlap;
//! a row-greedy matcher is provided as a comparison mode.

use ndarray::Array2;

/// Minimum-total-cost assignment of rows to columns.
/// Returns `perm` with `perm[row] = col`, a bijection.
///
/// Panics on non-square input (callers validate dimensions).
pub fn min_cost_assignment(cost: &Array2<f64>) -> Vec<usize> {
    let (rows, cols) = cost.dim();
    assert_eq!(rows, cols, "assignment needs a square matrix");
    let n = rows;
    if n == 0 {
        return Vec::new();
    }

    // 1-based arrays with column 0 as the virtual start; p[j] = row matched
    // to column j (0 = none).
    let inf = f64::INFINITY;
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(i0 - 1, j - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        // Augment along the recorded path.
        while j0 != 0 {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        }
    }

    let mut perm = vec![0usize; n];
    for j in 1..=n {
        perm[p[j] - 1] = j - 1;
    }
    perm
}

/// Maximum-total-score assignment: negates and delegates to
/// [`min_cost_assignment`].
pub fn max_total_assignment(score: &Array2<f64>) -> Vec<usize> {
    let neg = score.mapv(|x| -x);
    min_cost_assignment(&neg)
}

/// Row-greedy matching: rows in index order each take their best untaken
/// column (ties resolved toward the lower column index). A bijection, but
/// not optimal in general.
pub fn greedy_max_assignment(score: &Array2<f64>) -> Vec<usize> {
    let (rows, cols) = score.dim();
    assert_eq!(rows, cols, "assignment needs a square matrix");
    let n = rows;
    let mut taken = vec![false; n];
    let mut perm = vec![0usize; n];
    for i in 0..n {
        let mut best = None;
        let mut best_score = f64::NEG_INFINITY;
        for j in 0..n {
            if !taken[j] && score[(i, j)] > best_score {
                best_score = score[(i, j)];
                best = Some(j);
            }
        }
        let j = best.expect("some column is always free");
        taken[j] = true;
        perm[i] = j;
    }
    perm
}

/// Total score of an assignment: Σ_i score[i, perm[i]].
pub fn assignment_total(score: &Array2<f64>, perm: &[usize]) -> f64 {
    perm.iter().enumerate().map(|(i, &j)| score[(i, j)]).sum()
}
