//! Testing on a domain-knowledge graph instead of a distance-based
//! one: import an edge list, weight it, and run the statistics.
//!
//! Any similarity structure works as long as it is a simple graph on
//! the pooled observations. Here a small "two communities with a
//! bridge hub" graph is written to disk in the `i j` text format,
//! read back, and tested; the same file with a third column carries
//! explicit edge weights.
//!
//! ```bash
//! cargo run --release --example custom_graph
//! ```

use rgtest::inference::{permutation_pvalue, StatKind};
use rgtest::io::{read_edge_list, write_weighted_edge_list};
use rgtest::stats::LabelVector;
use rgtest::weight::{assign_weights, WeightedGraph, WeightFunction};
use rgtest::SimilarityGraph;

fn main() -> rgtest::Result<()> {
    // Two K4-ish communities joined through node 4, which also picks
    // up extra spokes and acts as a hub.
    let edges = vec![
        (0, 1), (0, 2), (1, 2), (1, 3), (2, 3),  // community A
        (5, 6), (5, 7), (6, 7), (6, 8), (7, 8),  // community B
        (3, 4), (4, 5),                          // bridge through 4
        (0, 4), (1, 4), (4, 7), (4, 8),          // hub spokes
    ];
    let graph = SimilarityGraph::new(9, edges)?;
    let labels = LabelVector::new(vec![0, 0, 0, 0, 0, 1, 1, 1, 1])?;

    let dir = std::env::temp_dir();
    let path = dir.join("rgtest_example_graph.txt");
    let gw = assign_weights(&graph, &WeightFunction::W1)?;
    std::fs::write(&path, write_weighted_edge_list(&gw)).expect("write edge list");
    println!("wrote {} ({} edges, W1 weights)", path.display(), graph.n_edges());

    let file = read_edge_list(&path).expect("read edge list");
    let reloaded = WeightedGraph::from_weights(
        SimilarityGraph::new(9, file.edges)?,
        file.weights.expect("weighted file"),
    )?;

    for kind in [StatKind::SR, StatKind::MR] {
        let report = permutation_pvalue(&reloaded, &labels, kind, 5_000, 17)?;
        println!(
            "{}: value {:.4}, permutation p = {:.4}",
            report.statistic,
            report.value,
            report.p_perm.unwrap()
        );
    }
    std::fs::remove_file(&path).ok();
    Ok(())
}
