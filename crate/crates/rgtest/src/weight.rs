//! Edge weights from node degrees.
//!
//! Weights dampen the influence of hubs: edges touching a high-degree
//! node get a small weight. The built-in functions are
//!
//! * `W1(di, dj) = 1 / max(di, dj)`
//! * `W2(di, dj) = 1 / sqrt(di dj)`
//! * `W3(di, dj) = 2 / (di + dj)`
//!
//! plus the constant weight 1, which recovers the unweighted
//! edge-count statistics. Custom functions must be symmetric and
//! non-increasing in each argument; this is validated on the degree
//! pairs actually realized in the graph (full functional verification
//! is not possible for a black-box closure).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::SimilarityGraph;

/// Relative tolerance used by the well-definedness checks.
pub const WELL_DEFINED_TOL: f64 = 1e-12;

pub type CustomWeightFn = Arc<dyn Fn(usize, usize) -> f64 + Send + Sync>;

/// A weight function of the two endpoint degrees.
#[derive(Clone)]
pub enum WeightFunction {
    /// 1 / max(di, dj)
    W1,
    /// 1 / sqrt(di * dj)
    W2,
    /// 2 / (di + dj)
    W3,
    /// Constant 1 (unweighted statistics).
    One,
    /// User-supplied symmetric, non-increasing evaluator.
    Custom(CustomWeightFn),
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightFunction::W1 => "W1",
            WeightFunction::W2 => "W2",
            WeightFunction::W3 => "W3",
            WeightFunction::One => "One",
            WeightFunction::Custom(_) => "Custom(..)",
        })
    }
}

impl WeightFunction {
    pub fn name(&self) -> &'static str {
        match self {
            WeightFunction::W1 => "w1",
            WeightFunction::W2 => "w2",
            WeightFunction::W3 => "w3",
            WeightFunction::One => "none",
            WeightFunction::Custom(_) => "custom",
        }
    }

    fn eval(&self, di: usize, dj: usize) -> f64 {
        match self {
            WeightFunction::W1 => 1.0 / di.max(dj) as f64,
            WeightFunction::W2 => 1.0 / ((di as f64) * (dj as f64)).sqrt(),
            WeightFunction::W3 => 2.0 / (di + dj) as f64,
            WeightFunction::One => 1.0,
            WeightFunction::Custom(f) => f(di, dj),
        }
    }
}

/// Evaluates a built-in weight function at a single degree pair.
pub fn builtin_weight(kind: &WeightFunction, di: usize, dj: usize) -> Result<f64> {
    if di == 0 {
        return Err(Error::InvalidDegree { value: di as i64 });
    }
    if dj == 0 {
        return Err(Error::InvalidDegree { value: dj as i64 });
    }
    Ok(kind.eval(di, dj))
}

/// A similarity graph with positive edge weights and cached degrees.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    graph: SimilarityGraph,
    weights: Vec<f64>,
    degrees: Vec<usize>,
}

impl WeightedGraph {
    /// Wraps a graph with explicit per-edge weights (e.g. from a
    /// weighted edge-list import).
    pub fn from_weights(graph: SimilarityGraph, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != graph.n_edges() {
            return Err(Error::InvalidInput(format!(
                "{} weights for {} edges",
                weights.len(),
                graph.n_edges()
            )));
        }
        for (e, &w) in weights.iter().enumerate() {
            if !(w > 0.0 && w.is_finite()) {
                let (i, j) = graph.edges()[e];
                return Err(Error::InvalidWeight { i, j, value: w });
            }
        }
        let degrees = graph.degrees();
        Ok(WeightedGraph { graph, weights, degrees })
    }

    pub fn graph(&self) -> &SimilarityGraph {
        &self.graph
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn n_nodes(&self) -> usize {
        self.graph.n_nodes()
    }

    pub fn n_edges(&self) -> usize {
        self.graph.n_edges()
    }

    /// Per-node sums of incident edge weights.
    pub fn node_weight_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.graph.n_nodes()];
        for (e, &(i, j)) in self.graph.edges().iter().enumerate() {
            sums[i] += self.weights[e];
            sums[j] += self.weights[e];
        }
        sums
    }

    /// Rescales every weight by `c > 0` (test statistics are invariant
    /// under this).
    pub fn scaled(&self, c: f64) -> Result<Self> {
        WeightedGraph::from_weights(self.graph.clone(), self.weights.iter().map(|w| w * c).collect())
    }
}

/// Assigns `w_ij = W(d_i, d_j)` to every edge, with degrees computed
/// from the graph itself.
pub fn assign_weights(graph: &SimilarityGraph, spec: &WeightFunction) -> Result<WeightedGraph> {
    let degrees = graph.degrees();
    if let WeightFunction::Custom(f) = spec {
        validate_custom(f, &degrees, graph)?;
    }
    let mut weights = Vec::with_capacity(graph.n_edges());
    for &(i, j) in graph.edges() {
        let w = spec.eval(degrees[i], degrees[j]);
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::InvalidWeight { i, j, value: w });
        }
        weights.push(w);
    }
    Ok(WeightedGraph { graph: graph.clone(), weights, degrees })
}

/// Checks symmetry and (non-strict) monotone decrease of a custom
/// evaluator over the degree values realized in the graph.
fn validate_custom(
    f: &CustomWeightFn,
    degrees: &[usize],
    graph: &SimilarityGraph,
) -> Result<()> {
    let mut realized: Vec<usize> = degrees.iter().copied().filter(|&d| d > 0).collect();
    realized.sort_unstable();
    realized.dedup();
    for &(i, j) in graph.edges() {
        let (a, b) = (degrees[i], degrees[j]);
        let w_ab = f(a, b);
        let w_ba = f(b, a);
        if (w_ab - w_ba).abs() > WELL_DEFINED_TOL * w_ab.abs().max(1.0) {
            return Err(Error::InvalidInput(format!(
                "custom weight is asymmetric at degrees ({a}, {b}): {w_ab} vs {w_ba}"
            )));
        }
    }
    for &c in &realized {
        for pair in realized.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            if f(lo, c) < f(hi, c) - WELL_DEFINED_TOL * f(lo, c).abs().max(1.0) {
                return Err(Error::InvalidInput(format!(
                    "custom weight increases in its argument: W({lo}, {c}) < W({hi}, {c})"
                )));
            }
        }
    }
    Ok(())
}

/// Outcome of the two well-definedness conditions for the standardized
/// statistics. `condition_a` holds when the per-node incident-weight
/// sums are not all equal (Z_diff has positive null variance);
/// `condition_b` holds when `(N-3) S1 - S2 + 2 S3 / (N-1) > 0` (Z_w
/// has positive null variance).
#[derive(Debug, Clone, PartialEq)]
pub struct WellDefinedReport {
    pub condition_a: bool,
    pub condition_b: bool,
    /// max - min of the node weight-sums (the condition_a witness).
    pub node_sum_spread: f64,
    /// Value of (N-3) S1 - S2 + 2 S3 / (N-1) (the condition_b witness).
    pub condition_b_value: f64,
}

impl WellDefinedReport {
    pub fn is_well_defined(&self) -> bool {
        self.condition_a && self.condition_b
    }
}

/// Evaluates both well-definedness conditions for a weighted graph.
/// The sample sizes are validated but do not enter the conditions,
/// which depend on the graph alone.
pub fn well_definedness(gw: &WeightedGraph, n1: usize, n2: usize) -> Result<WellDefinedReport> {
    if n1 + n2 != gw.n_nodes() {
        return Err(Error::InvalidInput(format!(
            "n1 + n2 = {} does not match node count {}",
            n1 + n2,
            gw.n_nodes()
        )));
    }
    if n1 < 2 || n2 < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 observations per sample, got n1 = {n1}, n2 = {n2}"
        )));
    }
    Ok(well_definedness_report(gw))
}

/// Graph-only form of [`well_definedness`] (used when no labels are
/// available, e.g. by the diagnose pipeline).
pub fn well_definedness_report(gw: &WeightedGraph) -> WellDefinedReport {
    let sums = gw.node_weight_sums();
    let max = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = sums.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = max - min;
    let scale = sums.iter().fold(0.0_f64, |a, &b| a.max(b.abs())).max(1.0);
    let condition_a = spread > WELL_DEFINED_TOL * scale;

    let n = gw.n_nodes() as f64;
    let sums_sq: f64 = sums.iter().map(|s| s * s).sum();
    let s1: f64 = gw.weights().iter().map(|w| w * w).sum();
    let s2 = sums_sq - s1;
    let total: f64 = gw.weights().iter().sum();
    let s3 = total * total;
    let value = (n - 3.0) * s1 - s2 + 2.0 * s3 / (n - 1.0);
    let condition_b = value > WELL_DEFINED_TOL * s1;

    WellDefinedReport {
        condition_a,
        condition_b,
        node_sum_spread: spread,
        condition_b_value: value,
    }
}

/// `min(w_ij) * |G|`: the finite-sample proxy for the requirement that
/// weights stay (asymptotically) above 1/|G|. Values well below 1
/// indicate weights small enough to starve the weighted edge-counts.
pub fn lower_bound_ratio(gw: &WeightedGraph) -> f64 {
    if gw.n_edges() == 0 {
        return 0.0;
    }
    let min = gw.weights().iter().copied().fold(f64::INFINITY, f64::min);
    min * gw.n_edges() as f64
}
