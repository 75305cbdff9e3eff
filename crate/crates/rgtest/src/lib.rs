//! Robust graph-based two-sample tests.
//!
//! Given two samples of d-dimensional observations, a similarity
//! graph (k-MST or k-NN) is built on the pooled points from their
//! interpoint distances. The within-sample edge-counts, weighted by a
//! decreasing function of the endpoint degrees, yield the statistics
//! `S_R` (quadratic form) and `M_R` (max type). The weights dampen
//! hubs, the high-degree nodes that emerge in high dimension and
//! inflate the nulls of the unweighted edge-count tests; constant
//! weights recover the classical statistics `S` and `M`.
//!
//! The crate provides exact permutation-null moments, permutation and
//! asymptotic p-values, structural diagnostics (hubs, well-definedness,
//! limiting-distribution condition ratios), data generators for power
//! studies, and a small CLI (`rgtest`). Start with the `examples/`
//! directory:
//!
//! ```bash
//! cargo run --release --example basic_test
//! cargo run --release --example hub_diagnostics
//! ```

pub mod cli;
pub mod error;
pub mod graph;
pub mod inference;
pub mod io;
pub mod normal;
pub mod sim;
pub mod stats;
pub mod weight;

pub use error::{Error, Result};
pub use graph::{
    distance_matrix, edge_neighborhoods, hub_report, kmst, knn_graph, DataMatrix,
    DistanceMatrix, EdgeNeighborhoods, HubReport, Metric, SimilarityGraph,
};
pub use inference::{
    asym_pvalue_mr, asym_pvalue_sr, condition_report, critical_gap, exact_null,
    permutation_pvalue, ConditionReport, CriticalGaps, ExactNull, PValueReport, StatKind,
};
pub use sim::{
    generate_sample, inject_influential, power_study, DistributionSpec, Family, PowerTable,
    SimConfig, WeightKind,
};
pub use stats::{
    null_moments, observed_counts, statistics, weight_sums, z_scores, LabelVector, MomentSet,
    ObservedCounts, StatValues, WeightSums,
};
pub use weight::{
    assign_weights, builtin_weight, lower_bound_ratio, well_definedness, WeightFunction,
    WeightedGraph, WellDefinedReport,
};
