//! Error type shared across the crate.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong when constructing graphs, assigning
/// weights, computing moments, or running the CLI pipelines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input data violated an invariant (non-finite entries, size
    /// mismatches, bad label vectors, negative statistics, ...).
    InvalidInput(String),
    /// `k` is too large for the requested graph on `n` nodes.
    InfeasibleK { k: usize, n: usize, reason: String },
    /// A weight function produced a non-positive or non-finite weight.
    InvalidWeight { i: usize, j: usize, value: f64 },
    /// A node degree outside the weight function's domain.
    InvalidDegree { value: i64 },
    /// The permutation-null variance of a standardized statistic is
    /// (numerically) zero, so the statistic is not well-defined.
    /// `flat_graph` flags the Z_diff degeneracy (all node weight-sums
    /// equal); `weighted_sum` flags the Z_w degeneracy.
    IllConditioned { flat_graph: bool, weighted_sum: bool },
    /// N <= 3: the null-moment formulas divide by N - 3.
    DegenerateSize { n: usize },
    /// Exact enumeration would exceed the labeling budget.
    EnumerationBudget { labelings: u128, budget: u128 },
    /// The two routes to S_R disagreed beyond tolerance.
    Inconsistent { quadratic: f64, decomposed: f64 },
    /// File / parse errors, with 1-based line numbers where known.
    Io(String),
    /// Bad CLI or simulation configuration.
    Config(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::InfeasibleK { k, n, reason } => {
                write!(f, "infeasible k = {k} for n = {n} nodes: {reason}")
            }
            Error::InvalidWeight { i, j, value } => {
                write!(f, "weight on edge ({i}, {j}) is {value}; weights must be positive and finite")
            }
            Error::InvalidDegree { value } => {
                write!(f, "node degree {value} outside weight-function domain (degrees must be >= 1)")
            }
            Error::IllConditioned { flat_graph, weighted_sum } => {
                write!(f, "ill-conditioned graph: ")?;
                match (flat_graph, weighted_sum) {
                    (true, true) => write!(
                        f,
                        "Z_diff is degenerate (all node weight-sums equal) and Z_w is degenerate ((N-3)S1 - S2 + 2S3/(N-1) is not positive)"
                    ),
                    (true, false) => write!(
                        f,
                        "Z_diff is degenerate: all node weight-sums are equal (flat graph)"
                    ),
                    (false, true) => write!(
                        f,
                        "Z_w is degenerate: (N-3)S1 - S2 + 2S3/(N-1) is not positive"
                    ),
                    (false, false) => write!(f, "a permutation-null variance vanished"),
                }
            }
            Error::DegenerateSize { n } => {
                write!(f, "pooled sample size N = {n} is too small; need N >= 4")
            }
            Error::EnumerationBudget { labelings, budget } => {
                write!(f, "exact enumeration needs {labelings} labelings, budget is {budget}")
            }
            Error::Inconsistent { quadratic, decomposed } => {
                write!(
                    f,
                    "internal consistency failure: quadratic-form S_R = {quadratic} vs Z_diff^2 + Z_w^2 = {decomposed}"
                )
            }
            Error::Io(msg) => write!(f, "{msg}"),
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl Error {
    /// CLI process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::InvalidInput(_) | Error::Io(_) => 3,
            Error::InfeasibleK { .. }
            | Error::InvalidWeight { .. }
            | Error::InvalidDegree { .. }
            | Error::DegenerateSize { .. }
            | Error::EnumerationBudget { .. } => 3,
            Error::IllConditioned { .. } | Error::Inconsistent { .. } => 4,
        }
    }
}
