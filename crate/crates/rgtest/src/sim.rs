//! Data generators and Monte Carlo power studies.
//!
//! A [`SimConfig`] describes one scenario: the two sampling
//! distributions, the similarity graph, the statistics to run, and the
//! permutation/trial budgets. [`power_study`] executes it with
//! per-trial RNG streams derived from the master seed, so the
//! resulting [`PowerTable`] is reproducible bit for bit regardless of
//! the worker count.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{distance_matrix, kmst, knn_graph, DataMatrix, Metric, SimilarityGraph};
use crate::inference::{permutation_null_with_moments, stream_rng, StatKind};
use crate::stats::{evaluate_with_moments, null_moments, LabelVector};
use crate::weight::{assign_weights, WeightFunction};

/// Sampling family for one side of the comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gaussian,
    Lognormal,
    /// Multivariate t: one chi-squared divisor shared by all
    /// coordinates of an observation.
    Mvt,
}

/// Per-coordinate standard deviations: one scalar for all coordinates
/// or a block-diagonal layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScaleSpec {
    Scalar(f64),
    Blocks(Vec<ScaleBlock>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleBlock {
    pub count: usize,
    pub sigma: f64,
}

impl Default for ScaleSpec {
    fn default() -> Self {
        ScaleSpec::Scalar(1.0)
    }
}

impl ScaleSpec {
    /// Expands to one sigma per coordinate.
    fn sigmas(&self, dim: usize) -> Result<Vec<f64>> {
        match self {
            ScaleSpec::Scalar(s) => {
                if !(*s > 0.0 && s.is_finite()) {
                    return Err(Error::Config(format!("scale must be positive, got {s}")));
                }
                Ok(vec![*s; dim])
            }
            ScaleSpec::Blocks(blocks) => {
                let mut sigmas = Vec::with_capacity(dim);
                for b in blocks {
                    if !(b.sigma > 0.0 && b.sigma.is_finite()) {
                        return Err(Error::Config(format!("block sigma must be positive, got {}", b.sigma)));
                    }
                    sigmas.extend(std::iter::repeat(b.sigma).take(b.count));
                }
                if sigmas.len() != dim {
                    return Err(Error::Config(format!(
                        "scale blocks cover {} coordinates, dimension is {dim}",
                        sigmas.len()
                    )));
                }
                Ok(sigmas)
            }
        }
    }
}

/// One sampling distribution. The location offset has L2 norm
/// `mean_shift`, spread equally over all coordinates; for the
/// log-normal family it shifts the underlying normal (so both mean and
/// variance of the observable change), and for the t family it is the
/// non-centrality offset added after the chi-squared rescaling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionSpec {
    pub family: Family,
    pub dim: usize,
    #[serde(default)]
    pub mean_shift: f64,
    #[serde(default)]
    pub scale: ScaleSpec,
    /// Degrees of freedom, t family only; must exceed 2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub df: Option<f64>,
}

impl DistributionSpec {
    pub fn gaussian(dim: usize, mean_shift: f64, sigma: f64) -> Self {
        DistributionSpec {
            family: Family::Gaussian,
            dim,
            mean_shift,
            scale: ScaleSpec::Scalar(sigma),
            df: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        if !self.mean_shift.is_finite() {
            return Err(Error::Config("mean shift must be finite".into()));
        }
        self.scale.sigmas(self.dim)?;
        match (self.family, self.df) {
            (Family::Mvt, Some(df)) if df > 2.0 => Ok(()),
            (Family::Mvt, Some(df)) => {
                Err(Error::Config(format!("t degrees of freedom must exceed 2, got {df}")))
            }
            (Family::Mvt, None) => Err(Error::Config("t family needs degrees of freedom".into())),
            (_, Some(_)) => Err(Error::Config("df is only meaningful for the t family".into())),
            (_, None) => Ok(()),
        }
    }
}

/// Draws `n` i.i.d. observations from `spec`, seeded.
pub fn generate_sample(spec: &DistributionSpec, n: usize, seed: u64) -> Result<DataMatrix> {
    let mut rng = stream_rng(seed, 0);
    generate_sample_with(spec, n, &mut rng)
}

/// Draws `n` i.i.d. observations using the supplied generator.
pub fn generate_sample_with<R: Rng>(
    spec: &DistributionSpec,
    n: usize,
    rng: &mut R,
) -> Result<DataMatrix> {
    spec.validate()?;
    if n < 2 {
        return Err(Error::Config("sample size must be at least 2".into()));
    }
    let d = spec.dim;
    let sigmas = spec.scale.sigmas(d)?;
    let offset = spec.mean_shift / (d as f64).sqrt();
    let mut values = Vec::with_capacity(n * d);
    match spec.family {
        Family::Gaussian => {
            for _ in 0..n {
                for sigma in &sigmas {
                    let z: f64 = StandardNormal.sample(rng);
                    values.push(offset + sigma * z);
                }
            }
        }
        Family::Lognormal => {
            for _ in 0..n {
                for sigma in &sigmas {
                    let z: f64 = StandardNormal.sample(rng);
                    values.push((offset + sigma * z).exp());
                }
            }
        }
        Family::Mvt => {
            let df = spec.df.expect("validated above");
            let chi2 = ChiSquared::new(df).map_err(|e| Error::Config(e.to_string()))?;
            for _ in 0..n {
                let u: f64 = chi2.sample(rng);
                let scale_t = (u / df).sqrt();
                for sigma in &sigmas {
                    let z: f64 = StandardNormal.sample(rng);
                    values.push(sigma * z / scale_t + offset);
                }
            }
        }
    }
    DataMatrix::new(n, d, values)
}

/// Shrinks observation 0 toward the mean of the others:
/// `x0 <- m + gamma (x0 - m)`. Small `gamma` plants a central point
/// that tends to become a hub in high dimension.
pub fn inject_influential(sample: &DataMatrix, gamma: f64) -> Result<DataMatrix> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidInput(format!("gamma must be in [0, 1), got {gamma}")));
    }
    let n = sample.n_rows();
    let d = sample.n_cols();
    if n < 2 {
        return Err(Error::InvalidInput("need at least 2 observations to inject".into()));
    }
    let mut mean = vec![0.0; d];
    for i in 1..n {
        for (m, v) in mean.iter_mut().zip(sample.row(i)) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= (n - 1) as f64;
    }
    let mut out = sample.clone();
    let row0 = out.row_mut(0);
    for (x, m) in row0.iter_mut().zip(&mean) {
        *x = m + gamma * (*x - m);
    }
    Ok(out)
}

/// Graph construction choice for a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub kind: GraphKind,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_metric")]
    pub metric: MetricSpec,
}

fn default_k() -> usize {
    5
}

fn default_metric() -> MetricSpec {
    MetricSpec::L2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Kmst,
    Knn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricSpec {
    L1,
    L2,
}

impl From<MetricSpec> for Metric {
    fn from(m: MetricSpec) -> Metric {
        match m {
            MetricSpec::L1 => Metric::L1,
            MetricSpec::L2 => Metric::L2,
        }
    }
}

impl GraphSpec {
    pub fn build(&self, dist: &crate::graph::DistanceMatrix) -> Result<SimilarityGraph> {
        match self.kind {
            GraphKind::Kmst => kmst(dist, self.k),
            GraphKind::Knn => knn_graph(dist, self.k),
        }
    }
}

/// Serializable weight choice (the custom variant is library-only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    W1,
    W2,
    W3,
    None,
}

impl WeightKind {
    pub fn function(self) -> WeightFunction {
        match self {
            WeightKind::W1 => WeightFunction::W1,
            WeightKind::W2 => WeightFunction::W2,
            WeightKind::W3 => WeightFunction::W3,
            WeightKind::None => WeightFunction::One,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WeightKind::W1 => "w1",
            WeightKind::W2 => "w2",
            WeightKind::W3 => "w3",
            WeightKind::None => "none",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "w1" => Ok(WeightKind::W1),
            "w2" => Ok(WeightKind::W2),
            "w3" => Ok(WeightKind::W3),
            "none" | "1" | "unweighted" => Ok(WeightKind::None),
            other => Err(Error::Config(format!("unknown weight '{other}'"))),
        }
    }
}

/// One statistic to evaluate: the kind plus, for the weighted kinds,
/// which weight function to use. `S` and `M` always run unweighted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatRequest {
    pub stat: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightKind>,
}

impl StatRequest {
    pub fn resolve(&self) -> Result<(StatKind, WeightKind)> {
        let kind = StatKind::parse(&self.stat)?;
        let weight = if kind.is_unweighted() {
            if let Some(w) = self.weight {
                if w != WeightKind::None {
                    return Err(Error::Config(format!(
                        "statistic {} is unweighted by definition; weight {} is not applicable",
                        kind.name(),
                        w.name()
                    )));
                }
            }
            WeightKind::None
        } else {
            self.weight.unwrap_or(WeightKind::W1)
        };
        Ok((kind, weight))
    }
}

/// A declarative Monte Carlo scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub x: DistributionSpec,
    pub y: DistributionSpec,
    pub n1: usize,
    pub n2: usize,
    pub graph: GraphSpec,
    pub statistics: Vec<StatRequest>,
    pub n_perm: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub trials: usize,
    pub seed: u64,
    /// Shrink factor for an influential point planted in sample Y.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inject_gamma: Option<f64>,
}

fn default_name() -> String {
    "scenario".into()
}

fn default_alpha() -> f64 {
    0.05
}

impl SimConfig {
    /// Checks the whole configuration and reports every violation.
    pub fn validate(&self) -> std::result::Result<(), Vec<String>> {
        let mut problems = Vec::new();
        if let Err(e) = self.x.validate() {
            problems.push(format!("sample x: {e}"));
        }
        if let Err(e) = self.y.validate() {
            problems.push(format!("sample y: {e}"));
        }
        if self.x.dim != self.y.dim {
            problems.push(format!(
                "samples have different dimensions ({} vs {})",
                self.x.dim, self.y.dim
            ));
        }
        if self.n1 < 2 || self.n2 < 2 {
            problems.push(format!(
                "need at least 2 observations per sample, got n1 = {}, n2 = {}",
                self.n1, self.n2
            ));
        }
        let n = self.n1 + self.n2;
        match self.graph.kind {
            GraphKind::Kmst => {
                if n >= 2 && self.graph.k * (n - 1) > n * (n - 1) / 2 {
                    problems.push(format!("k = {} is infeasible for a k-MST on {n} nodes", self.graph.k));
                }
            }
            GraphKind::Knn => {
                if self.graph.k == 0 || self.graph.k >= n.max(1) {
                    problems.push(format!("k = {} is invalid for a k-NN graph on {n} nodes", self.graph.k));
                }
            }
        }
        if self.graph.k == 0 {
            problems.push("graph k must be positive".into());
        }
        if self.statistics.is_empty() {
            problems.push("no statistics requested".into());
        }
        for s in &self.statistics {
            if let Err(e) = s.resolve() {
                problems.push(e.to_string());
            }
        }
        if self.n_perm == 0 {
            problems.push("n_perm must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            problems.push(format!("alpha must be in (0, 1), got {}", self.alpha));
        }
        if self.trials == 0 {
            problems.push("trials must be at least 1".into());
        }
        if let Some(g) = self.inject_gamma {
            if !(0.0..1.0).contains(&g) {
                problems.push(format!("inject_gamma must be in [0, 1), got {g}"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(problems)
        }
    }
}

/// Rejection counts for one requested statistic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerRow {
    pub statistic: StatKind,
    pub weight: WeightKind,
    pub rejections: usize,
    /// Trials where this statistic could not be computed
    /// (ill-conditioned weighted graph); counted as non-rejections.
    pub errors: usize,
}

/// Monte Carlo result of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerTable {
    pub scenario: String,
    pub trials: usize,
    pub median_dmax: f64,
    pub rows: Vec<PowerRow>,
}

impl PowerTable {
    /// CSV rendering: `scenario, statistic, weight, rejections,
    /// trials, median_dmax` (numbers at 6 significant digits).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scenario,statistic,weight,rejections,trials,median_dmax\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.scenario,
                row.statistic.name(),
                row.weight.name(),
                row.rejections,
                self.trials,
                crate::io::fmt_sig(self.median_dmax, 6),
            ));
        }
        out
    }
}

#[derive(Clone)]
struct TrialOutcome {
    d_max: usize,
    /// Per statistic request: Some(reject) or None on error.
    results: Vec<Option<bool>>,
}

/// Runs the scenario: `trials` independent draws, each building the
/// graph once, then evaluating every requested statistic with `n_perm`
/// permutations. Trial `t` uses RNG streams derived from
/// `(seed, t)`; trials run in parallel and aggregate in trial order.
pub fn power_study(config: &SimConfig) -> Result<PowerTable> {
    if let Err(problems) = config.validate() {
        return Err(Error::Config(problems.join("; ")));
    }
    let requests: Vec<(StatKind, WeightKind)> = config
        .statistics
        .iter()
        .map(|s| s.resolve())
        .collect::<Result<_>>()?;
    let mut weight_kinds: Vec<WeightKind> = requests.iter().map(|&(_, w)| w).collect();
    weight_kinds.sort_by_key(|w| w.name());
    weight_kinds.dedup();

    let outcomes: Vec<TrialOutcome> = (0..config.trials)
        .into_par_iter()
        .map(|trial| run_trial(config, &requests, &weight_kinds, trial))
        .collect::<Result<_>>()?;

    let mut dmaxes: Vec<f64> = outcomes.iter().map(|o| o.d_max as f64).collect();
    dmaxes.sort_by(f64::total_cmp);
    let median_dmax = median_of_sorted(&dmaxes);

    let rows = requests
        .iter()
        .enumerate()
        .map(|(idx, &(statistic, weight))| {
            let mut rejections = 0;
            let mut errors = 0;
            for o in &outcomes {
                match o.results[idx] {
                    Some(true) => rejections += 1,
                    Some(false) => {}
                    None => errors += 1,
                }
            }
            PowerRow { statistic, weight, rejections, errors }
        })
        .collect();

    Ok(PowerTable {
        scenario: config.name.clone(),
        trials: config.trials,
        median_dmax,
        rows,
    })
}

fn median_of_sorted(values: &[f64]) -> f64 {
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Mixes a master seed with trial/channel indices into an independent
/// child seed (splitmix64 finalizer).
pub fn mix_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed
        ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ b.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_trial(
    config: &SimConfig,
    requests: &[(StatKind, WeightKind)],
    weight_kinds: &[WeightKind],
    trial: usize,
) -> Result<TrialOutcome> {
    let t = trial as u64;
    let mut rng_x = stream_rng(mix_seed(config.seed, t, 0), 0);
    let mut rng_y = stream_rng(mix_seed(config.seed, t, 1), 0);
    let sample_x = generate_sample_with(&config.x, config.n1, &mut rng_x)?;
    let mut sample_y = generate_sample_with(&config.y, config.n2, &mut rng_y)?;
    if let Some(gamma) = config.inject_gamma {
        sample_y = inject_influential(&sample_y, gamma)?;
    }
    let pooled = sample_x.vstack(&sample_y)?;
    let dist = distance_matrix(&pooled, config.graph.metric.into());
    let graph = config.graph.build(&dist)?;
    let d_max = graph.degrees().into_iter().max().unwrap_or(0);

    let labels = LabelVector::split(config.n1, config.n2)?;
    let mut rejected_by_weight: Vec<(WeightKind, Option<Vec<(StatKind, bool)>>)> =
        Vec::with_capacity(weight_kinds.len());
    for (w_idx, &wk) in weight_kinds.iter().enumerate() {
        let kinds: Vec<StatKind> = requests
            .iter()
            .filter(|&&(_, w)| w == wk)
            .map(|&(k, _)| k)
            .collect();
        let perm_seed = mix_seed(config.seed, t, 2 + w_idx as u64);
        let group = run_weight_group(config, &graph, &labels, wk, &kinds, perm_seed);
        match group {
            Ok(results) => rejected_by_weight.push((wk, Some(results))),
            Err(Error::IllConditioned { .. }) => rejected_by_weight.push((wk, None)),
            Err(e) => return Err(e),
        }
    }

    let results = requests
        .iter()
        .map(|&(kind, weight)| {
            rejected_by_weight
                .iter()
                .find(|&&(w, _)| w == weight)
                .and_then(|(_, group)| group.as_ref())
                .and_then(|g| g.iter().find(|&&(k, _)| k == kind).map(|&(_, r)| r))
        })
        .collect();

    Ok(TrialOutcome { d_max, results })
}

fn run_weight_group(
    config: &SimConfig,
    graph: &SimilarityGraph,
    labels: &LabelVector,
    weight: WeightKind,
    kinds: &[StatKind],
    perm_seed: u64,
) -> Result<Vec<(StatKind, bool)>> {
    let gw = assign_weights(graph, &weight.function())?;
    let moments = null_moments(&gw, labels.n1(), labels.n2())?;
    let observed = evaluate_with_moments(&gw, labels, &moments)?;
    let draws = permutation_null_with_moments(
        &gw,
        &moments,
        labels.n1(),
        labels.n2(),
        config.n_perm,
        perm_seed,
    )?;
    let b = config.n_perm as f64;
    Ok(kinds
        .iter()
        .map(|&kind| {
            let obs = kind.pick(&observed);
            let count = draws.iter().filter(|v| kind.pick(v) >= obs).count();
            let p = (1.0 + count as f64) / (1.0 + b);
            (kind, p < config.alpha)
        })
        .collect())
}
