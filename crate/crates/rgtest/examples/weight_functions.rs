//! The three built-in weight functions side by side, plus the
//! well-definedness checks on two degenerate graphs.
//!
//! With one endpoint degree pinned at 5, W1 = 1/max penalizes a
//! growing hub degree hardest, W3 = 2/(di+dj) tracks it closely, and
//! W2 = 1/sqrt(di dj) decays only like d^-1/2.
//!
//! ```bash
//! cargo run --release --example weight_functions
//! ```

use rgtest::weight::{
    assign_weights, builtin_weight, lower_bound_ratio, well_definedness, WeightFunction,
};
use rgtest::SimilarityGraph;

fn main() -> rgtest::Result<()> {
    println!("weights at d_i = 5 as the other endpoint's degree grows");
    println!("{:<8} {:>10} {:>10} {:>10}", "d_j", "W1", "W2", "W3");
    for dj in [5usize, 10, 25, 50, 100, 200] {
        println!(
            "{:<8} {:>10.5} {:>10.5} {:>10.5}",
            dj,
            builtin_weight(&WeightFunction::W1, 5, dj)?,
            builtin_weight(&WeightFunction::W2, 5, dj)?,
            builtin_weight(&WeightFunction::W3, 5, dj)?,
        );
    }

    // A flat graph: every node weight-sum is equal, so the
    // standardized difference Z_diff has zero null variance.
    let cycle = SimilarityGraph::new(4, vec![(0, 1), (1, 2), (2, 3), (0, 3)])?;
    let gw = assign_weights(&cycle, &WeightFunction::One)?;
    let report = well_definedness(&gw, 2, 2)?;
    println!("\n4-cycle, unit weights:");
    println!("  condition a (node sums differ): {}", report.condition_a);
    println!("  condition b ((N-3)S1 - S2 + 2S3/(N-1) > 0): {}", report.condition_b);

    // A star: condition b fails, Z_w degenerates.
    let star = SimilarityGraph::new(4, vec![(0, 1), (0, 2), (0, 3)])?;
    let gw = assign_weights(&star, &WeightFunction::One)?;
    let report = well_definedness(&gw, 2, 2)?;
    println!("star K_1,3, unit weights:");
    println!("  condition a: {}", report.condition_a);
    println!("  condition b: {} (value {})", report.condition_b, report.condition_b_value);

    // min(w) |G| stays near or above 1 for the built-ins; far below 1
    // means the weights are starving the edge-counts.
    let path = SimilarityGraph::new(6, (0..5).map(|i| (i, i + 1)).collect())?;
    for kind in [WeightFunction::W1, WeightFunction::W2, WeightFunction::W3] {
        let gw = assign_weights(&path, &kind)?;
        println!("path of 6, {:?}: min(w) |G| = {:.4}", kind, lower_bound_ratio(&gw));
    }
    Ok(())
}
