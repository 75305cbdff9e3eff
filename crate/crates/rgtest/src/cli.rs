//! Command-line front end.
//!
//! Subcommands: `test` (run the statistics on data), `diagnose`
//! (graph structure and asymptotic-condition diagnostics), `simulate`
//! (Monte Carlo power study from a JSON config), and `oracle-check`
//! (closed-form moments vs exhaustive enumeration).
//!
//! Exit codes: 0 success, 2 usage/config error, 3 data error,
//! 4 ill-conditioned graph, 5 oracle failure.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{
    distance_matrix, hub_report, kmst, knn_graph, HubReport, Metric, SimilarityGraph,
};
use crate::inference::{
    condition_report, oracle_check_suite, permutation_null_with_moments, ConditionReport,
    StatKind,
};
use crate::io;
use crate::io::round_sig;
use crate::sim::{power_study, SimConfig, WeightKind};
use crate::stats::{evaluate_with_moments, null_moments, LabelVector};
use crate::weight::{
    assign_weights, lower_bound_ratio, well_definedness_report, WeightedGraph,
    WellDefinedReport,
};

/// Threshold below which `min(w) * |G|` triggers a low-weight warning.
const LOWER_BOUND_WARN: f64 = 0.5;

#[derive(Parser)]
#[command(
    name = "rgtest",
    version,
    about = "Robust graph-based two-sample tests with degree-based edge weights"
)]
struct Cli {
    /// Worker threads (default: all cores; env RGTEST_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run two-sample tests on labeled observations
    Test(TestArgs),
    /// Report hub, well-definedness and asymptotic-condition diagnostics
    Diagnose(DiagnoseArgs),
    /// Run a Monte Carlo power/calibration study from a JSON config
    Simulate(SimulateArgs),
    /// Check closed-form null moments against exhaustive enumeration
    OracleCheck(OracleCheckArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Observations CSV, one row per observation
    #[arg(long, value_name = "FILE")]
    data: Option<PathBuf>,
    /// Precomputed distance matrix CSV (square, symmetric)
    #[arg(long, value_name = "FILE", conflicts_with = "data")]
    dist: Option<PathBuf>,
    /// Edge list, one "i j" or "i j w" per line (0-based, i < j)
    #[arg(long, value_name = "FILE", conflicts_with_all = ["data", "dist"])]
    edges: Option<PathBuf>,
    /// Labels CSV, one 0/1 per row (0 = sample X)
    #[arg(long, value_name = "FILE")]
    labels: Option<PathBuf>,
    /// Distance metric for --data
    #[arg(long, default_value = "l2", value_parser = ["l1", "l2"])]
    metric: String,
    /// Similarity graph construction
    #[arg(long, default_value = "kmst", value_parser = ["kmst", "knn", "edgelist"])]
    graph: String,
    /// Number of spanning trees (kmst) or neighbors (knn)
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Edge weight function: w1, w2, w3, or none (unweighted)
    #[arg(long)]
    weight: Option<String>,
    /// Input CSVs carry a single header row
    #[arg(long)]
    header: bool,
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Statistics to run, comma separated (sr, mr, s, m, zdiff, zw)
    #[arg(long, default_value = "sr,mr")]
    stat: String,
    /// Permutations for the p-value
    #[arg(long, default_value_t = 10_000)]
    nperm: usize,
    /// Nominal significance level (echoed in the report)
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// RNG seed for the permutation streams
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write the JSON report here instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Write the JSON report here instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario description (JSON)
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Write the CSV table here instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleCheckArgs {
    /// Number of random graphs to enumerate
    #[arg(long, default_value_t = 50)]
    cases: usize,
    /// RNG seed for graph generation
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the report here instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

/// Parses the process arguments, runs the command, and returns the
/// process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("RGTEST_THREADS").ok().and_then(|v| v.parse().ok())
    });
    let result = match threads {
        Some(t) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
                Ok(pool) => pool,
                Err(e) => {
                    eprintln!("error: cannot build thread pool: {e}");
                    return 2;
                }
            };
            pool.install(|| dispatch(&cli.command, threads))
        }
        None => dispatch(&cli.command, threads),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: &Command, threads: Option<usize>) -> Result<()> {
    match command {
        Command::Test(args) => cmd_test(args, threads),
        Command::Diagnose(args) => cmd_diagnose(args, threads),
        Command::Simulate(args) => cmd_simulate(args, threads),
        Command::OracleCheck(args) => cmd_oracle_check(args),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

// ---- input resolution ----

struct LoadedGraph {
    graph: SimilarityGraph,
    /// Weights carried by a 3-column edge list.
    file_weights: Option<Vec<f64>>,
    graph_type: String,
    k: Option<usize>,
}

/// Cross-flag consistency, checked before any file is opened.
fn check_input_consistency(input: &InputArgs) -> Result<()> {
    let sources = [&input.data, &input.dist, &input.edges]
        .iter()
        .filter(|s| s.is_some())
        .count();
    if sources != 1 {
        return Err(Error::Config(
            "exactly one of --data, --dist, --edges is required".into(),
        ));
    }
    if input.edges.is_some() != (input.graph == "edgelist") {
        return Err(Error::Config(
            "--edges requires --graph edgelist (and vice versa)".into(),
        ));
    }
    Ok(())
}

fn load_graph(input: &InputArgs, n_hint: Option<usize>) -> Result<LoadedGraph> {
    check_input_consistency(input)?;

    if let Some(path) = &input.edges {
        let file = io::read_edge_list(path)?;
        let max_node = file.edges.iter().map(|&(_, j)| j).max().unwrap_or(0);
        let n = match n_hint {
            Some(n) => n,
            None => max_node + 1,
        };
        if max_node >= n {
            return Err(Error::InvalidInput(format!(
                "edge list references node {max_node} but the label file has {n} rows"
            )));
        }
        let graph = SimilarityGraph::new(n, file.edges)?;
        return Ok(LoadedGraph {
            graph,
            file_weights: file.weights,
            graph_type: "edgelist".into(),
            k: None,
        });
    }

    let dist = if let Some(path) = &input.data {
        let data = io::read_data_csv(path, input.header)?;
        let metric = if input.metric == "l1" { Metric::L1 } else { Metric::L2 };
        distance_matrix(&data, metric)
    } else {
        io::read_dist_csv(input.dist.as_ref().unwrap(), input.header)?
    };
    if let Some(n) = n_hint {
        if n != dist.size() {
            return Err(Error::InvalidInput(format!(
                "label file has {n} rows but the data has {} observations",
                dist.size()
            )));
        }
    }
    let graph = match input.graph.as_str() {
        "kmst" => kmst(&dist, input.k)?,
        "knn" => knn_graph(&dist, input.k)?,
        other => return Err(Error::Config(format!("unknown graph type '{other}'"))),
    };
    Ok(LoadedGraph {
        graph,
        file_weights: None,
        graph_type: input.graph.clone(),
        k: Some(input.k),
    })
}

fn load_labels(input: &InputArgs) -> Result<Option<Vec<u8>>> {
    match &input.labels {
        Some(path) => Ok(Some(io::read_labels_csv(path, input.header)?)),
        None => Ok(None),
    }
}

/// The weighting a run resolves to: a builtin kind or weights from a
/// 3-column edge list.
enum ResolvedWeights {
    Builtin(WeightKind),
    FromFile,
}

impl ResolvedWeights {
    fn name(&self) -> &'static str {
        match self {
            ResolvedWeights::Builtin(k) => k.name(),
            ResolvedWeights::FromFile => "custom",
        }
    }
}

fn resolve_weights(input: &InputArgs, loaded: &LoadedGraph) -> Result<ResolvedWeights> {
    match (&loaded.file_weights, &input.weight) {
        (Some(_), Some(_)) => Err(Error::Config(
            "the edge list already carries weights; drop --weight or supply a 2-column list"
                .into(),
        )),
        (Some(_), None) => Ok(ResolvedWeights::FromFile),
        (None, flag) => {
            let kind = match flag {
                Some(s) => WeightKind::parse(s)?,
                None => WeightKind::W1,
            };
            Ok(ResolvedWeights::Builtin(kind))
        }
    }
}

fn build_weighted(
    loaded: &LoadedGraph,
    weights: &ResolvedWeights,
    unweighted: bool,
) -> Result<WeightedGraph> {
    if unweighted {
        return assign_weights(&loaded.graph, &WeightKind::None.function());
    }
    match weights {
        ResolvedWeights::Builtin(kind) => assign_weights(&loaded.graph, &kind.function()),
        ResolvedWeights::FromFile => WeightedGraph::from_weights(
            loaded.graph.clone(),
            loaded.file_weights.clone().expect("checked by resolve_weights"),
        ),
    }
}

// ---- JSON schemas ----

#[derive(Serialize)]
struct GraphMeta {
    #[serde(rename = "type")]
    graph_type: String,
    k: Option<usize>,
    n_edges: usize,
    d_max: usize,
}

#[derive(Serialize)]
struct ConditionsJson {
    ratio_ii: f64,
    ratio_iii: f64,
    ratio_iv: f64,
}

impl ConditionsJson {
    fn from_report(report: &ConditionReport) -> Self {
        ConditionsJson {
            ratio_ii: round_sig(report.ratio_ii, 12),
            ratio_iii: round_sig(report.ratio_iii, 12),
            ratio_iv: round_sig(report.ratio_iv, 12),
        }
    }
}

#[derive(Serialize)]
struct PValueJson {
    statistic: String,
    value: f64,
    p_perm: f64,
    p_asym: f64,
    n_perm: usize,
    seed: u64,
    n1: usize,
    n2: usize,
    graph: GraphMeta,
    weight: String,
    conditions: ConditionsJson,
}

#[derive(Serialize)]
struct HubJson {
    d_max: usize,
    p95_degree: usize,
    sum_sq_degrees: u64,
    c: u64,
}

impl HubJson {
    fn from_report(report: &HubReport) -> Self {
        HubJson {
            d_max: report.d_max,
            p95_degree: report.p95_degree,
            sum_sq_degrees: report.sum_sq_degrees,
            c: report.c,
        }
    }
}

#[derive(Serialize)]
struct TestConfigEcho {
    command: &'static str,
    data: Option<String>,
    dist: Option<String>,
    edges: Option<String>,
    labels: Option<String>,
    metric: String,
    graph: String,
    k: Option<usize>,
    weight: String,
    stat: String,
    nperm: usize,
    alpha: f64,
    seed: u64,
    threads: Option<usize>,
    header: bool,
}

#[derive(Serialize)]
struct TestOutput {
    config: TestConfigEcho,
    hub: HubJson,
    results: Vec<PValueJson>,
}

fn path_str(p: &Option<PathBuf>) -> Option<String> {
    p.as_ref().map(|p| p.display().to_string())
}

// ---- test ----

fn cmd_test(args: &TestArgs, threads: Option<usize>) -> Result<()> {
    let input = &args.input;
    check_input_consistency(input)?;
    let labels_raw = load_labels(input)?
        .ok_or_else(|| Error::Config("--labels is required for the test command".into()))?;
    let labels = LabelVector::new(labels_raw)?;
    let loaded = load_graph(input, Some(labels.len()))?;
    let weights = resolve_weights(input, &loaded)?;

    let mut kinds = Vec::new();
    for part in args.stat.split(',') {
        let kind = StatKind::parse(part)?;
        if !kinds.contains(&kind) {
            kinds.push(kind);
        }
    }
    if kinds.is_empty() {
        return Err(Error::Config("no statistics requested".into()));
    }
    if args.nperm == 0 {
        return Err(Error::Config("--nperm must be at least 1".into()));
    }
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(Error::Config(format!("--alpha must be in (0, 1), got {}", args.alpha)));
    }

    let hub = hub_report(&loaded.graph);
    let mut results = Vec::new();
    for unweighted in [false, true] {
        let group: Vec<StatKind> =
            kinds.iter().copied().filter(|k| k.is_unweighted() == unweighted).collect();
        if group.is_empty() {
            continue;
        }
        let gw = build_weighted(&loaded, &weights, unweighted)?;
        let lb = lower_bound_ratio(&gw);
        if lb < LOWER_BOUND_WARN {
            eprintln!(
                "warning: min(w) * |G| = {lb:.3} is below {LOWER_BOUND_WARN}; the weighted \
                 edge-counts may be starved (weights should stay above ~1/|G|)"
            );
        }
        let moments = null_moments(&gw, labels.n1(), labels.n2())?;
        let observed = evaluate_with_moments(&gw, &labels, &moments)?;
        let draws = permutation_null_with_moments(
            &gw,
            &moments,
            labels.n1(),
            labels.n2(),
            args.nperm,
            args.seed,
        )?;
        let conditions = condition_report(&gw, Some(labels.n1()));
        let weight_name =
            if unweighted { "none".to_string() } else { weights.name().to_string() };
        for &kind in &group {
            let value = kind.pick(&observed);
            let count = draws.iter().filter(|v| kind.pick(v) >= value).count();
            let p_perm = (1.0 + count as f64) / (1.0 + args.nperm as f64);
            let p_asym = crate::inference::asym_pvalue(kind, value)?;
            results.push(PValueJson {
                statistic: kind.name().to_string(),
                value: round_sig(value, 12),
                p_perm: round_sig(p_perm, 12),
                p_asym: round_sig(p_asym, 12),
                n_perm: args.nperm,
                seed: args.seed,
                n1: labels.n1(),
                n2: labels.n2(),
                graph: GraphMeta {
                    graph_type: loaded.graph_type.clone(),
                    k: loaded.k,
                    n_edges: loaded.graph.n_edges(),
                    d_max: hub.d_max,
                },
                weight: weight_name.clone(),
                conditions: ConditionsJson::from_report(&conditions),
            });
        }
    }

    let output = TestOutput {
        config: TestConfigEcho {
            command: "test",
            data: path_str(&input.data),
            dist: path_str(&input.dist),
            edges: path_str(&input.edges),
            labels: path_str(&input.labels),
            metric: input.metric.clone(),
            graph: input.graph.clone(),
            k: loaded.k,
            weight: weights.name().to_string(),
            stat: kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join(","),
            nperm: args.nperm,
            alpha: args.alpha,
            seed: args.seed,
            threads,
            header: input.header,
        },
        hub: HubJson::from_report(&hub),
        results,
    };
    let mut text = serde_json::to_string_pretty(&output)
        .map_err(|e| Error::Io(format!("serialization failed: {e}")))?;
    text.push('\n');
    emit(&args.out, &text)
}

// ---- diagnose ----

#[derive(Serialize)]
struct WellDefinedJson {
    condition_a: bool,
    condition_b: bool,
    node_sum_spread: f64,
    condition_b_value: f64,
    lower_bound_ratio: f64,
}

#[derive(Serialize)]
struct DiagnoseConfigEcho {
    command: &'static str,
    data: Option<String>,
    dist: Option<String>,
    edges: Option<String>,
    labels: Option<String>,
    metric: String,
    graph: String,
    k: Option<usize>,
    weight: String,
    threads: Option<usize>,
    header: bool,
}

#[derive(Serialize)]
struct DiagnoseOutput {
    config: DiagnoseConfigEcho,
    graph: GraphMeta,
    hub: HubJson,
    conditions: serde_json::Value,
    well_defined: WellDefinedJson,
}

fn cmd_diagnose(args: &DiagnoseArgs, threads: Option<usize>) -> Result<()> {
    let input = &args.input;
    check_input_consistency(input)?;
    let labels_raw = load_labels(input)?;
    let labels = match labels_raw {
        Some(raw) => Some(LabelVector::new(raw)?),
        None => None,
    };
    let loaded = load_graph(input, labels.as_ref().map(LabelVector::len))?;
    let weights = resolve_weights(input, &loaded)?;
    let gw = build_weighted(&loaded, &weights, false)?;

    let hub = hub_report(&loaded.graph);
    let conditions = condition_report(&gw, labels.as_ref().map(LabelVector::n1));
    let wd: WellDefinedReport = well_definedness_report(&gw);
    let lb = lower_bound_ratio(&gw);
    if lb < LOWER_BOUND_WARN {
        eprintln!("warning: min(w) * |G| = {lb:.3} is below {LOWER_BOUND_WARN}");
    }

    let conditions_json = serde_json::json!({
        "n1_over_n": conditions.n1_over_n.map(|v| round_sig(v, 12)),
        "n_edges": conditions.n_edges,
        "edges_over_n": round_sig(conditions.edges_over_n, 12),
        "edges_over_n125": round_sig(conditions.edges_over_n125, 12),
        "ratio_ii": round_sig(conditions.ratio_ii, 12),
        "ratio_iii": round_sig(conditions.ratio_iii, 12),
        "ratio_iv": round_sig(conditions.ratio_iv, 12),
    });

    let output = DiagnoseOutput {
        config: DiagnoseConfigEcho {
            command: "diagnose",
            data: path_str(&input.data),
            dist: path_str(&input.dist),
            edges: path_str(&input.edges),
            labels: path_str(&input.labels),
            metric: input.metric.clone(),
            graph: input.graph.clone(),
            k: loaded.k,
            weight: weights.name().to_string(),
            threads,
            header: input.header,
        },
        graph: GraphMeta {
            graph_type: loaded.graph_type.clone(),
            k: loaded.k,
            n_edges: loaded.graph.n_edges(),
            d_max: hub.d_max,
        },
        hub: HubJson::from_report(&hub),
        conditions: conditions_json,
        well_defined: WellDefinedJson {
            condition_a: wd.condition_a,
            condition_b: wd.condition_b,
            node_sum_spread: round_sig(wd.node_sum_spread, 12),
            condition_b_value: round_sig(wd.condition_b_value, 12),
            lower_bound_ratio: round_sig(lb, 12),
        },
    };
    let mut text = serde_json::to_string_pretty(&output)
        .map_err(|e| Error::Io(format!("serialization failed: {e}")))?;
    text.push('\n');
    emit(&args.out, &text)
}

// ---- simulate ----

fn cmd_simulate(args: &SimulateArgs, _threads: Option<usize>) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Io(format!("{}: {e}", args.config.display())))?;
    let config: SimConfig = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", args.config.display())))?;
    if let Err(problems) = config.validate() {
        return Err(Error::Config(format!(
            "{}: {}",
            args.config.display(),
            problems.join("; ")
        )));
    }
    let table = power_study(&config)?;
    let echo = serde_json::to_string(&config)
        .map_err(|e| Error::Io(format!("serialization failed: {e}")))?;
    let mut out = format!("# config: {echo}\n");
    out.push_str(&table.to_csv());
    emit(&args.out, &out)
}

// ---- oracle-check ----

fn cmd_oracle_check(args: &OracleCheckArgs) -> Result<()> {
    let mut out = String::new();
    let mut failed = false;

    // Worked fixture first: the path on 4 nodes with unit weights.
    let g = SimilarityGraph::new(4, vec![(0, 1), (1, 2), (2, 3)])?;
    let gw = assign_weights(&g, &WeightKind::None.function())?;
    let moments = null_moments(&gw, 2, 2)?;
    let fixture = [
        ("mu1w", moments.mu1w, 0.5),
        ("sigma11", moments.sigma11, 0.25),
        ("sigma12", moments.sigma12, 1.0 / 12.0),
        ("var_diff", moments.var_diff, 1.0 / 3.0),
        ("var_w", moments.var_w, 1.0 / 6.0),
    ];
    for (name, got, want) in fixture {
        if (got - want).abs() > 1e-12 {
            failed = true;
            out.push_str(&format!("FAIL fixture path-4 {name}: got {got}, want {want}\n"));
        }
    }
    if !failed {
        out.push_str("ok fixture path-4 (mu1w, sigma11, sigma12, var_diff, var_w)\n");
    }

    let results = oracle_check_suite(args.cases, args.seed)?;
    let mut worst: f64 = 0.0;
    for (label, discrepancy) in &results {
        worst = worst.max(*discrepancy);
        if *discrepancy > 1e-10 {
            failed = true;
            out.push_str(&format!("FAIL {label}: relative error {discrepancy:.3e}\n"));
        } else {
            out.push_str(&format!("ok {label}: relative error {discrepancy:.3e}\n"));
        }
    }
    out.push_str(&format!(
        "{}: {} comparisons, worst relative error {worst:.3e}\n",
        if failed { "ORACLE CHECK FAILED" } else { "oracle check passed" },
        results.len(),
    ));
    emit(&args.out, &out)?;
    if failed {
        // Distinct exit code for a moment-formula regression.
        std::process::exit(5);
    }
    Ok(())
}
