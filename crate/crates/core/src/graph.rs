//! MaxCut instances and the exact brute-force cut oracle.
//!
//! A MaxCut instance is an undirected simple graph; a cut assigns each vertex
//! a bit, and its value is the number of edges whose endpoints receive
//! different bits. The oracle enumerates all 2^n assignments, so it is exact
//! and doubles as the ground truth every other module is checked against.
//!
//! Bit convention (repo-wide): bit i of a bitstring corresponds to vertex /
//! qubit i, and the basis index is b = Σ_i z_i·2^i. See the crate docs.

use crate::error::{Error, Result};
use crate::{basis_index_to_bitstring, DEFAULT_MAX_VERTICES};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

// ═══════════════════════════════════════════════════════════════════
//  Instance type and parsing
// ═══════════════════════════════════════════════════════════════════

/// An undirected simple graph defining a MaxCut problem.
///
/// Invariants (enforced by all constructors):
/// - every edge (i, j) satisfies i < j < n,
/// - no duplicate edges, no self-loops,
/// - n is bounded by a configured maximum so the 2^n-dimensional dense
///   simulation stays feasible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphInstance {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl GraphInstance {
    /// Build a validated instance with the default vertex bound
    /// ([`DEFAULT_MAX_VERTICES`]). Edge pairs are normalized to i < j and
    /// sorted; duplicates and self-loops are rejected.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::with_max_vertices(n, edges, DEFAULT_MAX_VERTICES)
    }

    /// Build a validated instance with an explicit vertex bound.
    pub fn with_max_vertices(
        n: usize,
        edges: Vec<(usize, usize)>,
        max_vertices: usize,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Graph("vertex count must be positive".into()));
        }
        if n > max_vertices {
            return Err(Error::Graph(format!(
                "vertex count {n} exceeds the configured maximum {max_vertices}"
            )));
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(Error::Graph(format!("self-loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::Graph(format!(
                    "edge ({a}, {b}) references a vertex outside 0..{n}"
                )));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Graph(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(GraphInstance { n, edges: normalized })
    }

    /// Parse the plain edge-list text format.
    ///
    /// Format: a header line `n <count>` followed by one `i j` pair per
    /// line. `#` starts a comment (whole-line or trailing); blank lines are
    /// ignored. Errors carry the 1-based line number.
    ///
    /// # Example
    ///
    /// ```
    /// use qaflow::graph::GraphInstance;
    /// let g = GraphInstance::parse_edge_list("n 3\n0 1\n1 2\n0 2\n").unwrap();
    /// assert_eq!(g.n(), 3);
    /// assert_eq!(g.edges().len(), 3);
    /// ```
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut edges = Vec::new();
        let mut edge_lines = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            if n.is_none() {
                // First significant line must be the header.
                let tag = parts.next().unwrap_or("");
                let count = parts.next();
                if tag != "n" || count.is_none() || parts.next().is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("expected header \"n <count>\", found {line:?}"),
                    });
                }
                let count: usize = count.unwrap().parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("vertex count {:?} is not a non-negative integer", count.unwrap()),
                })?;
                n = Some(count);
                continue;
            }
            let a = parts.next();
            let b = parts.next();
            if a.is_none() || b.is_none() || parts.next().is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected an edge \"i j\", found {line:?}"),
                });
            }
            let parse_vertex = |tok: &str| -> Result<usize> {
                tok.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("vertex index {tok:?} is not a non-negative integer"),
                })
            };
            edges.push((parse_vertex(a.unwrap())?, parse_vertex(b.unwrap())?));
            edge_lines.push(line_no);
        }
        let n = n.ok_or(Error::Parse { line: 1, msg: "missing header \"n <count>\"".into() })?;

        // Re-run structural validation per edge so errors name the line.
        let mut seen = std::collections::HashSet::new();
        for (&(a, b), &line_no) in edges.iter().zip(&edge_lines) {
            if a == b {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("self-loop at vertex {a}"),
                });
            }
            if a >= n || b >= n {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("edge ({a}, {b}) references a vertex outside 0..{n}"),
                });
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("duplicate edge ({a}, {b})"),
                });
            }
        }
        GraphInstance::new(n, edges)
    }

    /// Vertex count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges, normalized to i < j and sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Hilbert-space dimension 2^n of the dense simulation.
    pub fn dimension(&self) -> usize {
        1 << self.n
    }

    /// Serialize back to the edge-list text format (parse round-trip).
    pub fn to_edge_list_text(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for &(a, b) in &self.edges {
            out.push_str(&format!("{a} {b}\n"));
        }
        out
    }
}

// ═══════════════════════════════════════════════════════════════════
//  Cut evaluation and the brute-force oracle
// ═══════════════════════════════════════════════════════════════════

/// Exact optimum of a MaxCut instance, from exhaustive enumeration.
///
/// Invariants: `degeneracy == optimal_set.len()`, degeneracy is even
/// (bit-complementing an optimal cut yields an optimal cut), and every
/// member of `optimal_set` evaluates to `c_star` under [`cut_value`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutOracleResult {
    /// Maximum cut value.
    pub c_star: u32,
    /// Number of distinct optimal bitstrings.
    pub degeneracy: usize,
    /// All optimal bitstrings, in lexicographic order.
    pub optimal_set: Vec<String>,
}

impl CutOracleResult {
    /// Basis indices of the optimal bitstrings, in ascending numeric order.
    pub fn optimal_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = self
            .optimal_set
            .iter()
            .map(|z| crate::bitstring_to_basis_index(z).expect("oracle emits valid bitstrings"))
            .collect();
        idx.sort_unstable();
        idx
    }
}

/// Cut value of a basis index: the number of edges whose endpoint bits
/// differ in b.
pub fn cut_value_of_index(g: &GraphInstance, b: usize) -> u32 {
    g.edges()
        .iter()
        .map(|&(i, j)| (((b >> i) ^ (b >> j)) & 1) as u32)
        .sum()
}

/// Cut value of an n-bit string under the repo-wide bit convention.
///
/// Errors if the string length differs from the vertex count or contains
/// non-binary characters.
///
/// # Example
///
/// ```
/// use qaflow::graph::{cut_value, GraphInstance};
/// let k2 = GraphInstance::new(2, vec![(0, 1)]).unwrap();
/// assert_eq!(cut_value(&k2, "01").unwrap(), 1);
/// assert_eq!(cut_value(&k2, "00").unwrap(), 0);
/// ```
pub fn cut_value(g: &GraphInstance, z: &str) -> Result<u32> {
    if z.chars().count() != g.n() {
        return Err(Error::Bitstring(format!(
            "bitstring {:?} has {} bits, expected {}",
            z,
            z.chars().count(),
            g.n()
        )));
    }
    let b = crate::bitstring_to_basis_index(z)?;
    Ok(cut_value_of_index(g, b))
}

/// Exhaustively evaluate all 2^n bitstrings and return the maximum cut
/// value, its multiplicity, and the full optimal set in lexicographic
/// order.
///
/// # Example
///
/// ```
/// use qaflow::graph::{brute_force_optimum, GraphInstance};
/// let k2 = GraphInstance::new(2, vec![(0, 1)]).unwrap();
/// let r = brute_force_optimum(&k2).unwrap();
/// assert_eq!(r.c_star, 1);
/// assert_eq!(r.optimal_set, vec!["01", "10"]);
/// ```
pub fn brute_force_optimum(g: &GraphInstance) -> Result<CutOracleResult> {
    let dim = g.dimension();
    let mut c_star = 0u32;
    let mut optimal = Vec::new();
    for b in 0..dim {
        let c = cut_value_of_index(g, b);
        if c > c_star {
            c_star = c;
            optimal.clear();
        }
        if c == c_star {
            optimal.push(b);
        }
    }
    let mut optimal_set: Vec<String> = optimal
        .into_iter()
        .map(|b| basis_index_to_bitstring(b, g.n()))
        .collect();
    optimal_set.sort();
    Ok(CutOracleResult { c_star, degeneracy: optimal_set.len(), optimal_set })
}

// ═══════════════════════════════════════════════════════════════════
//  Instance generation and bundled reference instances
// ═══════════════════════════════════════════════════════════════════

/// Target shape for [`generate_instance`]: vertex count, edge count, and the
/// oracle quadruple to match (optimum optional, degeneracy required).
#[derive(Debug, Clone, Copy)]
pub struct GeneratorTarget {
    pub n: usize,
    pub edge_count: usize,
    /// Required optimum; `None` accepts any.
    pub c_star: Option<u32>,
    /// Required solution degeneracy.
    pub degeneracy: usize,
}

/// Randomly search for a connected instance matching a target
/// (n, |E|, C★, degeneracy) quadruple. Deterministic for a fixed seed.
///
/// Returns an error if no match is found within `max_tries` samples.
pub fn generate_instance(
    target: &GeneratorTarget,
    seed: u64,
    max_tries: usize,
) -> Result<GraphInstance> {
    let all_pairs: Vec<(usize, usize)> = (0..target.n)
        .flat_map(|i| (i + 1..target.n).map(move |j| (i, j)))
        .collect();
    if target.edge_count > all_pairs.len() {
        return Err(Error::Graph(format!(
            "{} edges requested but only {} distinct pairs exist on {} vertices",
            target.edge_count,
            all_pairs.len(),
            target.n
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_tries {
        // Partial Fisher-Yates: the first edge_count entries are a uniform
        // random subset of all pairs.
        let mut pool = all_pairs.clone();
        for k in 0..target.edge_count {
            let pick = rng.gen_range(k..pool.len());
            pool.swap(k, pick);
        }
        pool.truncate(target.edge_count);
        let g = GraphInstance::new(target.n, pool)?;
        if !is_connected(&g) {
            continue;
        }
        let oracle = brute_force_optimum(&g)?;
        if oracle.degeneracy != target.degeneracy {
            continue;
        }
        if let Some(c) = target.c_star {
            if oracle.c_star != c {
                continue;
            }
        }
        return Ok(g);
    }
    Err(Error::Graph(format!(
        "no connected instance matching {target:?} found in {max_tries} tries (seed {seed})"
    )))
}

fn is_connected(g: &GraphInstance) -> bool {
    let n = g.n();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in g.edges() {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Bundled reference instances with controlled solution degeneracy, found by
/// [`generate_instance`]-style search and frozen here. The same edge lists
/// ship as text files under `instances/`.
pub mod presets {
    use super::GraphInstance;

    /// 5 vertices, 6 edges, optimum 5, degeneracy 2.
    pub fn n5_deg2() -> GraphInstance {
        GraphInstance::new(5, vec![(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3)])
            .expect("preset is valid")
    }

    /// 7 vertices, 8 edges, optimum 7, degeneracy 4.
    pub fn n7_deg4() -> GraphInstance {
        GraphInstance::new(
            7,
            vec![(0, 2), (0, 3), (0, 5), (0, 6), (1, 5), (2, 3), (3, 4), (4, 6)],
        )
        .expect("preset is valid")
    }

    /// 10 vertices, 25 edges, optimum 18, degeneracy 4.
    pub fn n10_deg4() -> GraphInstance {
        GraphInstance::new(
            10,
            vec![
                (0, 1), (0, 6), (0, 9), (1, 3), (1, 6), (1, 7), (1, 9), (2, 3),
                (2, 5), (2, 7), (2, 8), (3, 4), (3, 6), (3, 7), (3, 9), (4, 5),
                (4, 6), (4, 7), (4, 9), (5, 6), (5, 7), (6, 7), (6, 8), (6, 9),
                (7, 8),
            ],
        )
        .expect("preset is valid")
    }
}
