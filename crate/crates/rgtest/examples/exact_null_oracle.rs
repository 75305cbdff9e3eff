//! Closed-form null moments vs brute-force enumeration.
//!
//! For small graphs every labeling with n1 zeros can be enumerated,
//! giving exact means, variances and covariance of the weighted
//! edge-counts. The closed-form expressions must agree to floating
//! point accuracy; this is the core correctness oracle of the crate
//! (also available from the CLI as `rgtest oracle-check`).
//!
//! ```bash
//! cargo run --release --example exact_null_oracle
//! ```

use rgtest::inference::{exact_null, oracle_check_suite, StatKind};
use rgtest::stats::null_moments;
use rgtest::weight::{assign_weights, WeightFunction};
use rgtest::SimilarityGraph;

fn main() -> rgtest::Result<()> {
    // The 4-node path with unit weights, n1 = n2 = 2: six labelings.
    let path = SimilarityGraph::new(4, vec![(0, 1), (1, 2), (2, 3)])?;
    let gw = assign_weights(&path, &WeightFunction::One)?;
    let closed = null_moments(&gw, 2, 2)?;
    let exact = exact_null(&gw, 2)?;

    println!("path 0-1-2-3, unit weights, n1 = n2 = 2 ({} labelings)", exact.labeling_count);
    println!("{:<12} {:>14} {:>14}", "quantity", "closed form", "enumeration");
    for (name, a, b) in [
        ("E R1w", closed.mu1w, exact.mean_r1w),
        ("Var R1w", closed.sigma11, exact.var_r1w),
        ("Cov", closed.sigma12, exact.cov_r1w_r2w),
        ("Var diff", closed.var_diff, exact.var_r1w + exact.var_r2w - 2.0 * exact.cov_r1w_r2w),
    ] {
        println!("{:<12} {:>14.10} {:>14.10}", name, a, b);
    }

    let dist = exact.distribution(StatKind::SR).unwrap();
    println!("exhaustive S_R null: {dist:?}");
    println!("exact P(S_R >= 3) = {:.4}", exact.exact_p(StatKind::SR, 3.0).unwrap());

    // A batch of random graphs under every weighting.
    let results = oracle_check_suite(10, 2024)?;
    let worst = results.iter().map(|(_, d)| *d).fold(0.0, f64::max);
    println!(
        "\nrandom-graph suite: {} comparisons, worst relative discrepancy {:.3e}",
        results.len(),
        worst
    );
    Ok(())
}
