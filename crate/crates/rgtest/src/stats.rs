//! Weighted edge-count statistics and their exact permutation-null
//! moments.
//!
//! For a weighted graph and a 0/1 labeling of its nodes, the weighted
//! within-sample edge-counts are
//!
//! ```text
//! R1w = sum of w_ij over edges with both endpoints labeled 0,
//! R2w = sum of w_ij over edges with both endpoints labeled 1.
//! ```
//!
//! Under the permutation null (uniformly random labelings with fixed
//! sample sizes) the means, variances and covariance of (R1w, R2w)
//! have closed forms in the three weight aggregates
//!
//! ```text
//! S1 = sum w_ij^2,   S2 = sum_i s_i^2 - S1,   S3 = (sum w_ij)^2,
//! ```
//!
//! where `s_i` is the incident-weight sum at node i. The standardized
//! scores Z_diff (of R1w - R2w) and Z_w (of q R1w + p R2w, with
//! p = (n1-1)/(N-2), q = 1-p) are uncorrelated under the null, and the
//! quadratic-form statistic decomposes as S_R = Z_diff^2 + Z_w^2. The
//! max-type statistic is M_R = max(Z_w, |Z_diff|). Constant weights
//! reduce everything to the unweighted edge-count statistics S and M.

use crate::error::{Error, Result};
use crate::weight::WeightedGraph;

/// Relative tolerance below which a null variance is declared zero
/// (scaled by the squared total edge weight).
pub const VARIANCE_TOL: f64 = 1e-12;

/// Relative tolerance for the dual-route S_R consistency check.
pub const SR_CONSISTENCY_TOL: f64 = 1e-8;

/// 0/1 sample labels for the pooled observations. Label 0 marks the
/// first sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    labels: Vec<u8>,
    n1: usize,
    n2: usize,
}

impl LabelVector {
    pub fn new(labels: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&g| g > 1) {
            return Err(Error::InvalidInput(format!("labels must be 0 or 1, found {bad}")));
        }
        let n1 = labels.iter().filter(|&&g| g == 0).count();
        let n2 = labels.len() - n1;
        if n1 < 2 || n2 < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 observations per sample, got n1 = {n1}, n2 = {n2}"
            )));
        }
        Ok(LabelVector { labels, n1, n2 })
    }

    /// Labels with the first `n1` observations in sample 0.
    pub fn split(n1: usize, n2: usize) -> Result<Self> {
        let mut labels = vec![0u8; n1];
        labels.extend(std::iter::repeat(1u8).take(n2));
        Self::new(labels)
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    /// Swaps the roles of the two samples.
    pub fn flipped(&self) -> LabelVector {
        LabelVector {
            labels: self.labels.iter().map(|&g| 1 - g).collect(),
            n1: self.n2,
            n2: self.n1,
        }
    }
}

/// The weight aggregates entering every moment formula.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSums {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub total: f64,
    pub node_sums: Vec<f64>,
}

/// Computes S1, S2, S3 and the per-node incident-weight sums.
pub fn weight_sums(gw: &WeightedGraph) -> WeightSums {
    let node_sums = gw.node_weight_sums();
    let s1: f64 = gw.weights().iter().map(|w| w * w).sum();
    let sums_sq: f64 = node_sums.iter().map(|s| s * s).sum();
    let s2 = sums_sq - s1;
    let total: f64 = gw.weights().iter().sum();
    let s3 = total * total;
    WeightSums { s1, s2, s3, total, node_sums }
}

/// Observed edge-counts for one labeling: weighted within-sample sums
/// plus their unweighted counterparts.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedCounts {
    pub r1w: f64,
    pub r2w: f64,
    pub r0: usize,
    pub r1: usize,
    pub r2: usize,
    pub r_diff: f64,
    /// q R1w + p R2w with p = (n1-1)/(N-2).
    pub r_weighted: f64,
}

pub fn observed_counts(gw: &WeightedGraph, labels: &LabelVector) -> Result<ObservedCounts> {
    if labels.len() != gw.n_nodes() {
        return Err(Error::InvalidInput(format!(
            "label vector length {} does not match node count {}",
            labels.len(),
            gw.n_nodes()
        )));
    }
    let g = labels.as_slice();
    let mut r1w = 0.0;
    let mut r2w = 0.0;
    let (mut r0, mut r1, mut r2) = (0usize, 0usize, 0usize);
    for (e, &(i, j)) in gw.graph().edges().iter().enumerate() {
        match (g[i], g[j]) {
            (0, 0) => {
                r1w += gw.weights()[e];
                r1 += 1;
            }
            (1, 1) => {
                r2w += gw.weights()[e];
                r2 += 1;
            }
            _ => r0 += 1,
        }
    }
    let (p, q) = pq(labels.n1(), labels.n2());
    Ok(ObservedCounts {
        r1w,
        r2w,
        r0,
        r1,
        r2,
        r_diff: r1w - r2w,
        r_weighted: q * r1w + p * r2w,
    })
}

fn pq(n1: usize, n2: usize) -> (f64, f64) {
    let n = (n1 + n2) as f64;
    let p = (n1 as f64 - 1.0) / (n - 2.0);
    (p, 1.0 - p)
}

/// Permutation-null moments of the weighted edge-counts.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    pub mu1w: f64,
    pub mu2w: f64,
    pub sigma11: f64,
    pub sigma22: f64,
    pub sigma12: f64,
    pub e_diff: f64,
    pub var_diff: f64,
    pub e_w: f64,
    pub var_w: f64,
    pub p: f64,
    pub q: f64,
    /// Total edge weight, kept for tolerance scaling.
    pub total_weight: f64,
}

/// Closed-form permutation-null moments for samples of sizes
/// `(n1, n2)` on the given weighted graph.
///
/// Errors when N <= 3 (the formulas divide by N-3) or when either
/// standardizing variance is numerically zero; the latter names which
/// degeneracy occurred (flat graph for Z_diff, weighted-sum for Z_w).
pub fn null_moments(gw: &WeightedGraph, n1: usize, n2: usize) -> Result<MomentSet> {
    let n_nodes = gw.n_nodes();
    if n1 + n2 != n_nodes {
        return Err(Error::InvalidInput(format!(
            "n1 + n2 = {} does not match node count {n_nodes}",
            n1 + n2
        )));
    }
    if n1 < 2 || n2 < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 observations per sample, got n1 = {n1}, n2 = {n2}"
        )));
    }
    if n_nodes <= 3 {
        return Err(Error::DegenerateSize { n: n_nodes });
    }

    let ws = weight_sums(gw);
    let (s1, s2, s3, total) = (ws.s1, ws.s2, ws.s3, ws.total);
    let (a, b) = (n1 as f64, n2 as f64);
    let n = a + b;

    let mu1w = total * a * (a - 1.0) / (n * (n - 1.0));
    let mu2w = total * b * (b - 1.0) / (n * (n - 1.0));

    let factor = a * b * (a - 1.0) * (b - 1.0) / (n * (n - 1.0) * (n - 2.0) * (n - 3.0));
    let shared = -s2 + 2.0 * (2.0 * n - 3.0) / (n * (n - 1.0)) * s3;
    let sigma11 = (shared + (n - 3.0) / (b - 1.0) * (s1 + s2) - 4.0 * (n - 3.0) / (n * (b - 1.0)) * s3) * factor;
    let sigma22 = (shared + (n - 3.0) / (a - 1.0) * (s1 + s2) - 4.0 * (n - 3.0) / (n * (a - 1.0)) * s3) * factor;
    let sigma12 = shared * factor;

    let e_diff = total * (a - b) / n;
    let var_diff = ((s1 + s2) - 4.0 / n * s3) * a * b / (n * (n - 1.0));
    let e_w = total * (a - 1.0) * (b - 1.0) / ((n - 1.0) * (n - 2.0));
    let var_w = ((n - 3.0) / (n - 2.0) * s1 - s2 / (n - 2.0) + 2.0 / ((n - 1.0) * (n - 2.0)) * s3)
        * (a * b / (n * (n - 1.0)))
        * ((a - 1.0) * (b - 1.0) / ((n - 2.0) * (n - 3.0)));

    let tol = VARIANCE_TOL * total * total;
    let flat_graph = !(var_diff > tol);
    let weighted_sum = !(var_w > tol);
    if flat_graph || weighted_sum {
        return Err(Error::IllConditioned { flat_graph, weighted_sum });
    }

    let (p, q) = pq(n1, n2);
    Ok(MomentSet {
        mu1w,
        mu2w,
        sigma11,
        sigma22,
        sigma12,
        e_diff,
        var_diff,
        e_w,
        var_w,
        p,
        q,
        total_weight: total,
    })
}

/// Standardized scores of the difference and weighted sum of the
/// within-sample weighted edge-counts.
pub fn z_scores(counts: &ObservedCounts, moments: &MomentSet) -> Result<(f64, f64)> {
    let tol = VARIANCE_TOL * moments.total_weight * moments.total_weight;
    if !(moments.var_diff > tol) || !(moments.var_w > tol) {
        return Err(Error::IllConditioned {
            flat_graph: !(moments.var_diff > tol),
            weighted_sum: !(moments.var_w > tol),
        });
    }
    let z_diff = (counts.r_diff - moments.e_diff) / moments.var_diff.sqrt();
    let z_w = (counts.r_weighted - moments.e_w) / moments.var_w.sqrt();
    Ok((z_diff, z_w))
}

/// The four test-statistic values for one labeling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatValues {
    pub z_diff: f64,
    pub z_w: f64,
    pub s_r: f64,
    pub m_r: f64,
}

/// Computes S_R and M_R from the standardized scores.
///
/// S_R is evaluated both as the 2x2 quadratic form
/// `(R - mu)' (Sigma^w)^-1 (R - mu)` and as `Z_diff^2 + Z_w^2`; a
/// disagreement beyond 1e-8 relative indicates a moment-formula
/// regression and is returned as an error.
pub fn statistics(
    z: (f64, f64),
    moments: &MomentSet,
    counts: &ObservedCounts,
) -> Result<StatValues> {
    let (z_diff, z_w) = z;
    if !z_diff.is_finite() || !z_w.is_finite() {
        return Err(Error::InvalidInput("non-finite standardized score".into()));
    }

    let det = moments.sigma11 * moments.sigma22 - moments.sigma12 * moments.sigma12;
    let scale = (moments.sigma11 * moments.sigma22).abs().max(1e-300);
    if det <= VARIANCE_TOL * scale {
        return Err(Error::IllConditioned { flat_graph: false, weighted_sum: false });
    }
    let d1 = counts.r1w - moments.mu1w;
    let d2 = counts.r2w - moments.mu2w;
    let quadratic =
        (moments.sigma22 * d1 * d1 - 2.0 * moments.sigma12 * d1 * d2 + moments.sigma11 * d2 * d2)
            / det;

    let decomposed = z_diff * z_diff + z_w * z_w;
    if (quadratic - decomposed).abs() > SR_CONSISTENCY_TOL * decomposed.max(1.0) {
        return Err(Error::Inconsistent { quadratic, decomposed });
    }

    Ok(StatValues {
        z_diff,
        z_w,
        s_r: decomposed,
        m_r: z_w.max(z_diff.abs()),
    })
}

/// Convenience pipeline: counts, moments, scores, statistics for one
/// labeled weighted graph.
pub fn evaluate(gw: &WeightedGraph, labels: &LabelVector) -> Result<StatValues> {
    let moments = null_moments(gw, labels.n1(), labels.n2())?;
    evaluate_with_moments(gw, labels, &moments)
}

/// Same as [`evaluate`] but reusing precomputed moments (the moments
/// depend only on the graph and the sample sizes, so permutation loops
/// compute them once).
pub fn evaluate_with_moments(
    gw: &WeightedGraph,
    labels: &LabelVector,
    moments: &MomentSet,
) -> Result<StatValues> {
    let counts = observed_counts(gw, labels)?;
    let z = z_scores(&counts, moments)?;
    statistics(z, moments, &counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SimilarityGraph;
    use crate::weight::{assign_weights, WeightFunction, WeightedGraph};

    fn path4_unit() -> WeightedGraph {
        let g = SimilarityGraph::new(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
        assign_weights(&g, &WeightFunction::One).unwrap()
    }

    fn labels(bits: &[u8]) -> LabelVector {
        LabelVector::new(bits.to_vec()).unwrap()
    }

    #[test]
    fn weight_sums_path3() {
        let g = SimilarityGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let gw = assign_weights(&g, &WeightFunction::One).unwrap();
        let ws = weight_sums(&gw);
        assert_eq!(ws.s1, 2.0);
        assert_eq!(ws.s2, 4.0);
        assert_eq!(ws.s3, 4.0);
    }

    #[test]
    fn weight_sums_star() {
        let g = SimilarityGraph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let gw = assign_weights(&g, &WeightFunction::One).unwrap();
        let ws = weight_sums(&gw);
        assert_eq!((ws.s1, ws.s2, ws.s3), (3.0, 9.0, 9.0));
    }

    #[test]
    fn weight_sums_single_edge() {
        let g = SimilarityGraph::new(2, vec![(0, 1)]).unwrap();
        let gw = WeightedGraph::from_weights(g, vec![2.5]).unwrap();
        let ws = weight_sums(&gw);
        assert_eq!(ws.s1, 6.25);
        assert_eq!(ws.s2, 6.25);
        assert_eq!(ws.s3, 6.25);
    }

    #[test]
    fn observed_counts_path4() {
        let gw = path4_unit();
        let c = observed_counts(&gw, &labels(&[0, 0, 1, 1])).unwrap();
        assert_eq!((c.r1, c.r2, c.r0), (1, 1, 1));
        assert_eq!(c.r_diff, 0.0);
        // p = q = 1/2 at n1 = n2.
        assert_eq!(c.r_weighted, 1.0);
    }

    #[test]
    fn observed_counts_all_in_one_sample_is_rejected() {
        // n2 = 0 violates the label invariant.
        assert!(LabelVector::new(vec![0, 0, 0, 0]).is_err());
        assert!(LabelVector::new(vec![0, 1, 1, 1]).is_err());
    }

    #[test]
    fn observed_counts_every_edge_within_x() {
        // All edges lie among the label-0 nodes: R1w is the full
        // weight total and R2w is zero.
        let g = SimilarityGraph::new(6, vec![(0, 1), (1, 2), (0, 3)]).unwrap();
        let gw = WeightedGraph::from_weights(g, vec![0.5, 1.25, 2.0]).unwrap();
        let c = observed_counts(&gw, &labels(&[0, 0, 0, 0, 1, 1])).unwrap();
        assert_eq!(c.r1w, 3.75);
        assert_eq!(c.r2w, 0.0);
        assert_eq!((c.r1, c.r2, c.r0), (3, 0, 0));
    }

    #[test]
    fn observed_counts_length_mismatch() {
        let gw = path4_unit();
        let l = labels(&[0, 0, 1, 1, 1]);
        assert!(matches!(observed_counts(&gw, &l), Err(Error::InvalidInput(_))));
    }

    // Frozen expected values for the path fixture, from exhaustive
    // enumeration of all C(4,2) = 6 labelings.
    #[test]
    fn path4_moments_match_enumeration_table() {
        let moments = null_moments(&path4_unit(), 2, 2).unwrap();
        assert!((moments.mu1w - 0.5).abs() < 1e-15);
        assert!((moments.mu2w - 0.5).abs() < 1e-15);
        assert!((moments.sigma11 - 0.25).abs() < 1e-15);
        assert!((moments.sigma22 - 0.25).abs() < 1e-15);
        assert!((moments.sigma12 - 1.0 / 12.0).abs() < 1e-15);
        assert!((moments.var_diff - 1.0 / 3.0).abs() < 1e-15);
        assert!((moments.var_w - 1.0 / 6.0).abs() < 1e-15);
        assert!((moments.e_w - 0.5).abs() < 1e-15);
        assert_eq!(moments.e_diff, 0.0);
    }

    #[test]
    fn moment_algebraic_consistency() {
        let moments = null_moments(&path4_unit(), 2, 2).unwrap();
        let via_sigma = moments.sigma11 + moments.sigma22 - 2.0 * moments.sigma12;
        assert!((moments.var_diff - via_sigma).abs() <= 1e-10 * via_sigma.abs());
        let via_sigma_w = moments.q * moments.q * moments.sigma11
            + moments.p * moments.p * moments.sigma22
            + 2.0 * moments.p * moments.q * moments.sigma12;
        assert!((moments.var_w - via_sigma_w).abs() <= 1e-10 * via_sigma_w.abs());
    }

    #[test]
    fn z_scores_worked_examples() {
        let gw = path4_unit();
        let moments = null_moments(&gw, 2, 2).unwrap();

        // X = {0, 2}: no within-sample edge at all.
        let c = observed_counts(&gw, &labels(&[0, 1, 0, 1])).unwrap();
        let (z_diff, z_w) = z_scores(&c, &moments).unwrap();
        assert_eq!(z_diff, 0.0);
        assert!((z_w - (-0.5 / (1.0_f64 / 6.0).sqrt())).abs() < 1e-12);

        // X = {0, 3}: one within-Y edge.
        let c = observed_counts(&gw, &labels(&[0, 1, 1, 0])).unwrap();
        let (z_diff, z_w) = z_scores(&c, &moments).unwrap();
        assert!((z_diff - (-(3.0_f64.sqrt()))).abs() < 1e-12);
        assert!(z_w.abs() < 1e-12);
    }

    #[test]
    fn statistics_worked_examples() {
        let gw = path4_unit();
        let moments = null_moments(&gw, 2, 2).unwrap();

        let c = observed_counts(&gw, &labels(&[0, 1, 1, 0])).unwrap();
        let z = z_scores(&c, &moments).unwrap();
        let s = statistics(z, &moments, &c).unwrap();
        assert!((s.s_r - 3.0).abs() < 1e-12);
        assert!((s.m_r - 3.0_f64.sqrt()).abs() < 1e-12);

        let c = observed_counts(&gw, &labels(&[0, 1, 0, 1])).unwrap();
        let z = z_scores(&c, &moments).unwrap();
        let s = statistics(z, &moments, &c).unwrap();
        assert!((s.s_r - 1.5).abs() < 1e-12);
        // Z_w is negative and |Z_diff| = 0, so M_R = 0 under the
        // one-sided max convention.
        assert!(s.m_r.abs() < 1e-12);

        // Counts exactly at their null means give (0, 0).
        let z0 = (0.0, 0.0);
        let c0 = ObservedCounts {
            r1w: moments.mu1w,
            r2w: moments.mu2w,
            r0: 0,
            r1: 0,
            r2: 0,
            r_diff: moments.e_diff,
            r_weighted: moments.e_w,
        };
        let s0 = statistics(z0, &moments, &c0).unwrap();
        assert_eq!(s0.s_r, 0.0);
        assert_eq!(s0.m_r, 0.0);
    }

    #[test]
    fn flat_cycle_is_ill_conditioned() {
        let g = SimilarityGraph::new(4, vec![(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let gw = assign_weights(&g, &WeightFunction::One).unwrap();
        match null_moments(&gw, 2, 2) {
            Err(Error::IllConditioned { flat_graph, weighted_sum }) => {
                assert!(flat_graph);
                assert!(!weighted_sum);
            }
            other => panic!("expected ill-conditioned, got {other:?}"),
        }
    }

    #[test]
    fn star_is_ill_conditioned_in_z_w() {
        let g = SimilarityGraph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let gw = assign_weights(&g, &WeightFunction::One).unwrap();
        match null_moments(&gw, 2, 2) {
            Err(Error::IllConditioned { flat_graph, weighted_sum }) => {
                assert!(!flat_graph);
                assert!(weighted_sum);
            }
            other => panic!("expected ill-conditioned, got {other:?}"),
        }
    }

    #[test]
    fn tiny_pooled_sample_is_degenerate() {
        let g = SimilarityGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let gw = assign_weights(&g, &WeightFunction::One).unwrap();
        assert!(matches!(null_moments(&gw, 2, 1), Err(Error::InvalidInput(_))));
    }

    // ---- randomized properties ----

    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_case(seed: u64) -> (WeightedGraph, LabelVector) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(8..30);
        let data: Vec<f64> = (0..n * 3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let dm = crate::graph::DataMatrix::new(n, 3, data).unwrap();
        let dist = crate::graph::distance_matrix(&dm, crate::graph::Metric::L2);
        let graph = if rng.gen_bool(0.5) {
            crate::graph::kmst(&dist, rng.gen_range(1..=2)).unwrap()
        } else {
            crate::graph::knn_graph(&dist, rng.gen_range(1..=3)).unwrap()
        };
        let gw = if rng.gen_bool(0.5) {
            let kinds = [WeightFunction::W1, WeightFunction::W2, WeightFunction::W3];
            assign_weights(&graph, &kinds[rng.gen_range(0..3)]).unwrap()
        } else {
            let w: Vec<f64> = (0..graph.n_edges()).map(|_| rng.gen_range(0.1..2.0)).collect();
            WeightedGraph::from_weights(graph, w).unwrap()
        };
        let n1 = rng.gen_range(2..=(n - 2));
        let mut bits = vec![0u8; n1];
        bits.extend(std::iter::repeat(1u8).take(n - n1));
        bits.shuffle(&mut rng);
        (gw, LabelVector::new(bits).unwrap())
    }

    #[test]
    fn decomposition_holds_on_random_cases() {
        for seed in 0..200 {
            let (gw, l) = random_case(seed);
            // evaluate() internally cross-checks the quadratic form
            // against Z_diff^2 + Z_w^2 at 1e-8 relative.
            let s = evaluate(&gw, &l).unwrap();
            assert!(s.s_r >= 0.0);
        }
    }

    #[test]
    fn weight_scale_invariance() {
        for seed in 0..50 {
            let (gw, l) = random_case(seed);
            let s = evaluate(&gw, &l).unwrap();
            for c in [1e-3, 7.25, 1e4] {
                let s_scaled = evaluate(&gw.scaled(c).unwrap(), &l).unwrap();
                assert!((s.z_diff - s_scaled.z_diff).abs() <= 1e-10 * s.z_diff.abs().max(1.0));
                assert!((s.z_w - s_scaled.z_w).abs() <= 1e-10 * s.z_w.abs().max(1.0));
                assert!((s.s_r - s_scaled.s_r).abs() <= 1e-10 * s.s_r.max(1.0));
                assert!((s.m_r - s_scaled.m_r).abs() <= 1e-10 * s.m_r.abs().max(1.0));
            }
        }
    }

    #[test]
    fn sample_swap_preserves_s_r() {
        for seed in 0..50 {
            let (gw, l) = random_case(1000 + seed);
            let s = evaluate(&gw, &l).unwrap();
            let s_swapped = evaluate(&gw, &l.flipped()).unwrap();
            assert!((s.s_r - s_swapped.s_r).abs() <= 1e-9 * s.s_r.max(1.0));
            assert!((s.z_diff + s_swapped.z_diff).abs() <= 1e-9 * s.z_diff.abs().max(1.0));
        }
    }

    #[test]
    fn unweighted_sigma_matches_closed_form() {
        // With w = 1, Sigma11 must equal the classical edge-count
        // variance mu (1 - mu) + 2C f1 + |G|(|G|-1) f2 - correction,
        // written via C = sum|G_i|^2 / 2 - |G|.
        for seed in 0..20 {
            let (gw, l) = random_case(2000 + seed);
            let unit = assign_weights(gw.graph(), &WeightFunction::One).unwrap();
            let (n1, n2) = (l.n1(), l.n2());
            let moments = match null_moments(&unit, n1, n2) {
                Ok(m) => m,
                Err(Error::IllConditioned { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            let g = unit.graph();
            let edges = g.n_edges() as f64;
            let deg = g.degrees();
            let c: f64 = deg.iter().map(|&d| (d * d) as f64).sum::<f64>() / 2.0 - edges;
            let (a, b) = (n1 as f64, n2 as f64);
            let n = a + b;
            for (nj, sigma) in [(a, moments.sigma11), (b, moments.sigma22)] {
                let mu = edges * nj * (nj - 1.0) / (n * (n - 1.0));
                let closed = mu * (1.0 - mu)
                    + 2.0 * c * nj * (nj - 1.0) * (nj - 2.0) * (n - nj)
                        / (n * (n - 1.0) * (n - 2.0) * (n - 3.0))
                    + edges * (edges - 1.0) * nj * (nj - 1.0) * (nj - 2.0) * (nj - 3.0)
                        / (n * (n - 1.0) * (n - 2.0) * (n - 3.0));
                assert!(
                    (sigma - closed).abs() <= 1e-9 * closed.abs().max(1.0),
                    "seed {seed}: sigma = {sigma}, closed form = {closed}"
                );
            }
        }
    }

    #[test]
    fn s2_matches_brute_force_pair_sum() {
        // S2 = (ordered pairs of distinct edges sharing a node) + S1.
        for seed in 0..20 {
            let (gw, _) = random_case(3000 + seed);
            if gw.n_edges() > 200 {
                continue;
            }
            let ws = weight_sums(&gw);
            let edges = gw.graph().edges();
            let mut pair_sum = 0.0;
            for (e1, &(a, b)) in edges.iter().enumerate() {
                for (e2, &(c, d)) in edges.iter().enumerate() {
                    if e1 != e2 && (a == c || a == d || b == c || b == d) {
                        pair_sum += gw.weights()[e1] * gw.weights()[e2];
                    }
                }
            }
            let brute_s2 = pair_sum + ws.s1;
            assert!((ws.s2 - brute_s2).abs() <= 1e-9 * brute_s2.abs().max(1.0));
            // Appendix-style identity: S1 + S2 = sum_i s_i^2.
            let sums_sq: f64 = ws.node_sums.iter().map(|s| s * s).sum();
            assert!((ws.s1 + ws.s2 - sums_sq).abs() <= 1e-12 * sums_sq.max(1.0));
        }
    }
}
