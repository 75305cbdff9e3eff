//! Statistical and structural properties that span modules.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use rgtest::graph::{distance_matrix, knn_graph, DataMatrix, Metric};
use rgtest::inference::{exact_null, permutation_pvalue, StatKind};
use rgtest::stats::{null_moments, weight_sums, LabelVector};
use rgtest::weight::{assign_weights, WeightFunction};

/// Permutation p-values are (super-)uniform under the null: over many
/// same-distribution trials the fraction with p <= alpha stays within
/// three binomial standard errors of alpha.
#[test]
fn permutation_pvalues_superuniform_under_null() {
    let trials = 600;
    let b = 999; // (1+B) alpha is integral for alpha in {.01,.05,.1}
    let mut pvalues = Vec::with_capacity(trials);
    for trial in 0..trials as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(trial);
        let n = 30;
        let values: Vec<f64> = (0..n * 5).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let data = DataMatrix::new(n, 5, values).unwrap();
        let dist = distance_matrix(&data, Metric::L2);
        let graph = knn_graph(&dist, 3).unwrap();
        let gw = assign_weights(&graph, &WeightFunction::W1).unwrap();
        let mut bits = vec![0u8; 15];
        bits.extend(std::iter::repeat(1u8).take(15));
        bits.shuffle(&mut rng);
        let labels = LabelVector::new(bits).unwrap();
        let report = permutation_pvalue(&gw, &labels, StatKind::SR, b, 7_000 + trial).unwrap();
        pvalues.push(report.p_perm.unwrap());
    }
    for alpha in [0.01, 0.05, 0.10] {
        let hits = pvalues.iter().filter(|&&p| p <= alpha).count() as f64;
        let fraction = hits / trials as f64;
        let se = (alpha * (1.0 - alpha) / trials as f64).sqrt();
        assert!(
            (fraction - alpha).abs() <= 3.0 * se,
            "alpha = {alpha}: fraction {fraction} (3 SE = {:.4})",
            3.0 * se
        );
    }
}

/// The enumeration oracle catches moment-formula regressions: a
/// deliberately wrong S2 (double-counting the adjacent-pair sum)
/// produces a Sigma11 that no longer matches the exact variance.
#[test]
fn oracle_detects_injected_s2_bug() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let n = 10;
    let values: Vec<f64> = (0..n * 2).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let data = DataMatrix::new(n, 2, values).unwrap();
    let graph = knn_graph(&distance_matrix(&data, Metric::L2), 2).unwrap();
    let gw = assign_weights(&graph, &WeightFunction::W1).unwrap();
    let (n1, n2) = (5, 5);

    let exact = exact_null(&gw, n1).unwrap();
    let good = null_moments(&gw, n1, n2).unwrap();
    assert!(
        (good.sigma11 - exact.var_r1w).abs() <= 1e-10 * exact.var_r1w,
        "sane formula must match the oracle"
    );

    // Recompute Sigma11 with the bug: S2 with the off-diagonal pair
    // sum counted twice.
    let ws = weight_sums(&gw);
    let s2_bug = ws.s1 + 2.0 * (ws.s2 - ws.s1);
    let (a, b) = (n1 as f64, n2 as f64);
    let nn = a + b;
    let factor = a * b * (a - 1.0) * (b - 1.0) / (nn * (nn - 1.0) * (nn - 2.0) * (nn - 3.0));
    let shared = -s2_bug + 2.0 * (2.0 * nn - 3.0) / (nn * (nn - 1.0)) * ws.s3;
    let sigma11_bug = (shared + (nn - 3.0) / (b - 1.0) * (ws.s1 + s2_bug)
        - 4.0 * (nn - 3.0) / (nn * (b - 1.0)) * ws.s3)
        * factor;
    let rel = (sigma11_bug - exact.var_r1w).abs() / exact.var_r1w.abs();
    assert!(rel > 1e-10, "the mutated Sigma11 slipped past the oracle (rel = {rel})");
}

/// Exact p-values from full enumeration agree with high-B permutation
/// estimates.
#[test]
fn permutation_estimates_track_exact_null() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 10;
    let values: Vec<f64> = (0..n * 3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let data = DataMatrix::new(n, 3, values).unwrap();
    let graph = knn_graph(&distance_matrix(&data, Metric::L2), 2).unwrap();
    let gw = assign_weights(&graph, &WeightFunction::W3).unwrap();
    let labels = LabelVector::new(vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1]).unwrap();

    let exact = exact_null(&gw, 5).unwrap();
    for kind in [StatKind::SR, StatKind::MR, StatKind::ZW] {
        let report = permutation_pvalue(&gw, &labels, kind, 20_000, 11).unwrap();
        let p_exact = exact.exact_p(kind, report.value).unwrap();
        let p_perm = report.p_perm.unwrap();
        assert!(
            (p_perm - p_exact).abs() < 0.02,
            "{}: permutation {p_perm} vs exact {p_exact}",
            kind.name()
        );
    }
}
