//! Distance matrices, similarity-graph construction (k-MST, k-NN),
//! node-degree diagnostics, and edge neighborhoods.
//!
//! Graphs here are undirected and simple; edges are stored as `(i, j)`
//! with `i < j`, sorted lexicographically. All construction is
//! deterministic: ties in edge distances are broken by `(distance, i, j)`
//! so repeated runs on the same input give the same graph.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Distance metric for [`distance_matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    L1,
    L2,
}

/// Dense row-major data matrix: `n` observations of dimension `d`.
#[derive(Debug, Clone)]
pub struct DataMatrix {
    n: usize,
    d: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    /// Builds a data matrix, checking shape and finiteness.
    pub fn new(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 observations, got {n}")));
        }
        if d < 1 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if values.len() != n * d {
            return Err(Error::InvalidInput(format!(
                "expected {n} x {d} = {} values, got {}",
                n * d,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry at row {}, column {}",
                pos / d,
                pos % d
            )));
        }
        Ok(DataMatrix { n, d, values })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidInput("rows have inconsistent lengths".into()));
        }
        Self::new(n, d, rows.into_iter().flatten().collect())
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_cols(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.d..(i + 1) * self.d]
    }

    /// Stacks two matrices with the same column count (pooled sample).
    pub fn vstack(&self, other: &DataMatrix) -> Result<DataMatrix> {
        if self.d != other.d {
            return Err(Error::InvalidInput(format!(
                "cannot pool samples of dimension {} and {}",
                self.d, other.d
            )));
        }
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        DataMatrix::new(self.n + other.n, self.d, values)
    }
}

/// Dense symmetric N x N interpoint distance matrix with zero diagonal.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates an externally supplied matrix: finite, nonnegative,
    /// symmetric, zero diagonal.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 observations, got {n}")));
        }
        if values.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {n} x {n} distance matrix, got {} values",
                values.len()
            )));
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::InvalidInput(format!("nonzero diagonal at index {i}")));
            }
            for j in (i + 1)..n {
                let a = values[i * n + j];
                let b = values[j * n + i];
                if !a.is_finite() || a < 0.0 {
                    return Err(Error::InvalidInput(format!("invalid distance at ({i}, {j}): {a}")));
                }
                if a != b {
                    return Err(Error::InvalidInput(format!(
                        "asymmetric distances at ({i}, {j}): {a} vs {b}"
                    )));
                }
            }
        }
        Ok(DistanceMatrix { n, values })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

/// Computes the dense interpoint distance matrix under the given metric.
///
/// Rows are computed independently (in parallel); the result does not
/// depend on the scheduling.
pub fn distance_matrix(data: &DataMatrix, metric: Metric) -> DistanceMatrix {
    let n = data.n_rows();
    let mut values = vec![0.0; n * n];
    values
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(i, row)| {
            let xi = data.row(i);
            for (j, slot) in row.iter_mut().enumerate() {
                if i == j {
                    continue;
                }
                let xj = data.row(j);
                *slot = match metric {
                    Metric::L1 => xi.iter().zip(xj).map(|(a, b)| (a - b).abs()).sum(),
                    Metric::L2 => xi
                        .iter()
                        .zip(xj)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt(),
                };
            }
        });
    DistanceMatrix { n, values }
}

/// Undirected simple graph on nodes `0..n`, edges stored as `(i, j)`
/// with `i < j`, sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarityGraph {
    n_nodes: usize,
    edges: Vec<(usize, usize)>,
}

impl SimilarityGraph {
    pub fn new(n_nodes: usize, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        for e in edges.iter_mut() {
            if e.0 == e.1 {
                return Err(Error::InvalidInput(format!("self-loop at node {}", e.0)));
            }
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
            if e.1 >= n_nodes {
                return Err(Error::InvalidInput(format!(
                    "edge ({}, {}) references node >= {n_nodes}",
                    e.0, e.1
                )));
            }
        }
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        if edges.len() != before {
            return Err(Error::InvalidInput("duplicate edges".into()));
        }
        Ok(SimilarityGraph { n_nodes, edges })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Node degrees |G_i|.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n_nodes];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    /// Incident edge indices per node.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n_nodes];
        for (e, &(i, j)) in self.edges.iter().enumerate() {
            inc[i].push(e);
            inc[j].push(e);
        }
        inc
    }

    pub fn is_connected(&self) -> bool {
        let mut dsu = DisjointSet::new(self.n_nodes);
        for &(i, j) in &self.edges {
            dsu.union(i, j);
        }
        let root = dsu.find(0);
        (1..self.n_nodes).all(|i| dsu.find(i) == root)
    }
}

/// Union-find with path compression and union by rank.
struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Union of `k` edge-disjoint minimum spanning trees.
///
/// Tree t+1 is the MST of the complete graph with the edges of trees
/// 1..t removed (Kruskal, edges sorted by `(distance, i, j)` so ties
/// are broken deterministically). The result has exactly `k (N - 1)`
/// edges.
pub fn kmst(dist: &DistanceMatrix, k: usize) -> Result<SimilarityGraph> {
    let n = dist.size();
    if k == 0 {
        return Err(Error::InfeasibleK { k, n, reason: "k must be positive".into() });
    }
    // k(N-1) edges must fit in the complete graph's N(N-1)/2.
    if k * (n - 1) > n * (n - 1) / 2 {
        return Err(Error::InfeasibleK {
            k,
            n,
            reason: format!(
                "{k} spanning trees need {} edges but the complete graph has only {}",
                k * (n - 1),
                n * (n - 1) / 2
            ),
        });
    }

    let mut order: Vec<(usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            order.push((i, j));
        }
    }
    order.sort_by(|&(a, b), &(c, d)| {
        dist.get(a, b)
            .total_cmp(&dist.get(c, d))
            .then(a.cmp(&c))
            .then(b.cmp(&d))
    });

    let mut used = vec![false; order.len()];
    let mut trees: Vec<Vec<usize>> = Vec::with_capacity(k);
    for t in 0..k {
        let mut dsu = DisjointSet::new(n);
        let mut tree = Vec::with_capacity(n - 1);
        for (idx, &(i, j)) in order.iter().enumerate() {
            if used[idx] {
                continue;
            }
            if dsu.union(i, j) {
                used[idx] = true;
                tree.push(idx);
                if tree.len() == n - 1 {
                    break;
                }
            }
        }
        while tree.len() != n - 1 {
            // Earlier trees consumed every edge across some cut (an
            // extreme hub makes tree 1 a star, isolating the hub for
            // tree 2), so the successive MST does not exist as
            // defined. Repair by moving a crossing edge out of an
            // earlier tree and patching that tree with its cheapest
            // unused replacement; the result stays a union of k
            // edge-disjoint spanning trees.
            if !exchange_repair(&order, &mut used, &mut trees, &mut tree, t, n) {
                return Err(Error::InfeasibleK {
                    k,
                    n,
                    reason: format!("the remaining edges do not span tree {}", t + 1),
                });
            }
        }
        trees.push(tree);
    }
    let edges = trees.iter().flatten().map(|&idx| order[idx]).collect();
    SimilarityGraph::new(n, edges)
}

/// Tries to grow the stuck partial tree `current` by one edge: move a
/// used edge that crosses `current`'s components out of an earlier
/// tree, and patch that tree with the first unused edge (in sorted
/// order) that reconnects it. Deterministic; returns false when no
/// exchange exists.
fn exchange_repair(
    order: &[(usize, usize)],
    used: &mut [bool],
    trees: &mut [Vec<usize>],
    current: &mut Vec<usize>,
    t: usize,
    n: usize,
) -> bool {
    let mut cur_dsu = DisjointSet::new(n);
    for &idx in current.iter() {
        let (i, j) = order[idx];
        cur_dsu.union(i, j);
    }
    for s in 0..t {
        for pos in 0..trees[s].len() {
            let e_idx = trees[s][pos];
            let (ei, ej) = order[e_idx];
            if cur_dsu.find(ei) == cur_dsu.find(ej) {
                continue;
            }
            // Components of tree s without this edge.
            let mut s_dsu = DisjointSet::new(n);
            for (q, &idx) in trees[s].iter().enumerate() {
                if q != pos {
                    let (i, j) = order[idx];
                    s_dsu.union(i, j);
                }
            }
            let patch = order.iter().enumerate().position(|(idx, &(i, j))| {
                !used[idx] && s_dsu.find(i) != s_dsu.find(j)
            });
            if let Some(f_idx) = patch {
                trees[s][pos] = f_idx;
                used[f_idx] = true;
                current.push(e_idx);
                return true;
            }
        }
    }
    false
}

/// Undirected k-nearest-neighbor graph: edge (i, j) present iff j is
/// among i's k nearest or i is among j's k nearest. Distance ties are
/// broken toward the smaller node index.
pub fn knn_graph(dist: &DistanceMatrix, k: usize) -> Result<SimilarityGraph> {
    let n = dist.size();
    if k == 0 || k >= n {
        return Err(Error::InfeasibleK {
            k,
            n,
            reason: format!("k-NN needs 1 <= k <= {}", n - 1),
        });
    }
    let mut edges = Vec::with_capacity(n * k);
    let mut others: Vec<usize> = Vec::with_capacity(n - 1);
    for i in 0..n {
        others.clear();
        others.extend((0..n).filter(|&j| j != i));
        others.sort_by(|&a, &b| dist.get(i, a).total_cmp(&dist.get(i, b)).then(a.cmp(&b)));
        for &j in &others[..k] {
            edges.push(if i < j { (i, j) } else { (j, i) });
        }
    }
    edges.sort_unstable();
    edges.dedup();
    SimilarityGraph::new(n, edges)
}

/// Degree summary of a similarity graph. `c` counts unordered pairs of
/// edges sharing a node, the quantity that inflates edge-count variances
/// when hubs are present.
#[derive(Debug, Clone, PartialEq)]
pub struct HubReport {
    pub degrees: Vec<usize>,
    pub d_max: usize,
    pub p95_degree: usize,
    pub sum_sq_degrees: u64,
    pub c: u64,
}

/// Computes degrees, max degree, the nearest-rank 95th percentile of
/// the degrees, Σ|G_i|², and C = ½ Σ|G_i|² − |G|.
pub fn hub_report(graph: &SimilarityGraph) -> HubReport {
    let degrees = graph.degrees();
    let d_max = degrees.iter().copied().max().unwrap_or(0);
    let mut sorted = degrees.clone();
    sorted.sort_unstable();
    // Nearest-rank percentile: ceil(0.95 n)-th smallest (1-based).
    let rank = ((0.95 * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    let p95_degree = sorted[rank - 1];
    let sum_sq_degrees: u64 = degrees.iter().map(|&d| (d as u64) * (d as u64)).sum();
    let c = sum_sq_degrees / 2 - graph.n_edges() as u64;
    HubReport { degrees, d_max, p95_degree, sum_sq_degrees, c }
}

/// One-hop and two-hop edge neighborhoods.
///
/// `a[e]` lists the edges sharing a node with edge `e`, including `e`
/// itself; `b[e]` additionally includes every edge sharing a node with
/// some member of `a[e]`. Members are edge indices into
/// `graph.edges()`, sorted ascending.
#[derive(Debug, Clone)]
pub struct EdgeNeighborhoods {
    pub a: Vec<Vec<usize>>,
    pub b: Vec<Vec<usize>>,
}

impl EdgeNeighborhoods {
    pub fn a_size(&self, e: usize) -> usize {
        self.a[e].len()
    }
}

pub fn edge_neighborhoods(graph: &SimilarityGraph) -> EdgeNeighborhoods {
    let m = graph.n_edges();
    let inc = graph.incidence();
    let mut a = Vec::with_capacity(m);
    for (e, &(i, j)) in graph.edges().iter().enumerate() {
        let mut members: Vec<usize> = inc[i].iter().chain(inc[j].iter()).copied().collect();
        members.sort_unstable();
        members.dedup();
        debug_assert!(members.contains(&e));
        a.push(members);
    }
    // B_e = union of A_{e'} over e' in A_e; a stamp vector avoids
    // re-sorting large unions.
    let mut stamp = vec![usize::MAX; m];
    let mut b = Vec::with_capacity(m);
    for e in 0..m {
        let mut members = Vec::new();
        for &e1 in &a[e] {
            for &e2 in &a[e1] {
                if stamp[e2] != e {
                    stamp[e2] = e;
                    members.push(e2);
                }
            }
        }
        members.sort_unstable();
        b.push(members);
    }
    EdgeNeighborhoods { a, b }
}
