//! Hubness in high dimension and why it breaks the unweighted tests.
//!
//! First part: 5-MST maximum node degrees grow with the data
//! dimension while the 95th-percentile degree stays flat, so a few
//! nodes absorb ever more edges. Second part: shrinking a single
//! observation toward the sample mean plants a hub, and the
//! edge-pair count C (the variance-inflation driver of the
//! edge-count null) jumps with it.
//!
//! ```bash
//! cargo run --release --example hub_diagnostics
//! ```

use rgtest::sim::{generate_sample, inject_influential, DistributionSpec};
use rgtest::{distance_matrix, hub_report, kmst, Metric};

fn main() -> rgtest::Result<()> {
    println!("5-MST degree summary, N = 200 standard normal, 10 seeds");
    println!("{:<8} {:>14} {:>16}", "dim", "median d_max", "median p95 deg");
    for d in [10usize, 50, 100, 500] {
        let spec = DistributionSpec::gaussian(d, 0.0, 1.0);
        let mut d_max = Vec::new();
        let mut p95 = Vec::new();
        for seed in 0..10 {
            let sample = generate_sample(&spec, 200, seed)?;
            let graph = kmst(&distance_matrix(&sample, Metric::L2), 5)?;
            let hub = hub_report(&graph);
            d_max.push(hub.d_max);
            p95.push(hub.p95_degree);
        }
        d_max.sort_unstable();
        p95.sort_unstable();
        println!("{:<8} {:>14} {:>16}", d, d_max[5], p95[5]);
    }

    println!("\nInfluential point: one observation shrunk toward the mean (d = 100)");
    println!("{:<10} {:>8} {:>10} {:>10}", "gamma", "d_max", "sum d_i^2", "C");
    let spec = DistributionSpec::gaussian(100, 0.0, 1.0);
    let sample = generate_sample(&spec, 100, 7)?;
    let clean = hub_report(&kmst(&distance_matrix(&sample, Metric::L2), 5)?);
    println!("{:<10} {:>8} {:>10} {:>10}", "none", clean.d_max, clean.sum_sq_degrees, clean.c);
    for gamma in [0.5, 0.3, 0.1] {
        let injected = inject_influential(&sample, gamma)?;
        let hub = hub_report(&kmst(&distance_matrix(&injected, Metric::L2), 5)?);
        println!("{:<10} {:>8} {:>10} {:>10}", gamma, hub.d_max, hub.sum_sq_degrees, hub.c);
    }
    Ok(())
}
