//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// A single problem found while validating one row of an input file.
///
/// `line` is the 1-based physical line in the file (the header is line 1).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RowIssue {
    pub line: u64,
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for RowIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}, field '{}': {}", self.line, self.field, self.message)
    }
}

/// One failed case from a batch, with the error that stopped it.
#[derive(Debug)]
pub struct CaseFailure {
    pub case_id: String,
    pub error: Error,
}

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument is outside its admissible range.
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A confidence interval with `lower == upper` carries no width to
    /// derive an uncertainty from.
    #[error("degenerate confidence interval: lower == upper == {0}")]
    DegenerateInterval(f64),

    /// No standard error, no confidence interval, and no fallback value.
    #[error("no uncertainty available: supply se_log, a confidence interval, or a default s")]
    MissingUncertainty,

    /// The operation needs a confidence interval and the estimate has none.
    #[error("estimate has no confidence interval")]
    MissingCi,

    /// Neither a point estimate nor an E-value to reconstruct one from.
    #[error("record has neither a point estimate nor an E-value")]
    MissingPoint,

    /// An E-value supplied alongside a point estimate does not match the
    /// value implied by that point estimate.
    #[error("supplied E-value {supplied} disagrees with the value {implied} implied by the point estimate")]
    InconsistentEvalue { supplied: f64, implied: f64 },

    /// Panel doubling hit the cap before successive estimates stabilized.
    #[error("integration did not converge after {panels} panels (last relative change {last_change:e})")]
    IntegrationDidNotConverge { panels: usize, last_change: f64 },

    /// The integrand produced NaN or an infinity.
    #[error("non-finite integrand value at x = {0}")]
    NonFiniteIntegrand(f64),

    /// Importance weights were too concentrated for the estimate to be
    /// trusted.
    #[error("Monte Carlo estimate unreliable: effective sample size {ess:.1} is below {min}")]
    LowEffectiveSampleSize { ess: f64, min: f64 },

    /// The input file's header row is not the expected schema.
    #[error("input header mismatch: expected `{expected}`, found `{found}`")]
    SchemaMismatch { expected: String, found: String },

    /// One or more input rows failed validation; nothing was ingested.
    #[error("input validation failed with {} issue(s)", issues.len())]
    Validation { issues: Vec<RowIssue> },

    /// Every case in a batch failed.
    #[error("all {} case(s) failed", .0.len())]
    AllCasesFailed(Vec<CaseFailure>),

    /// A pipeline stage failed while processing a named case.
    #[error("case `{case_id}`: {source}")]
    Case {
        case_id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown measure '{0}' (expected RR, OR, or HR)")]
    UnknownMeasure(String),

    #[error("unknown engine '{0}' (expected closed, quad, or mc)")]
    UnknownEngine(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Attaches a case id to an error, unless it already carries one.
    pub fn for_case(self, case_id: &str) -> Error {
        match self {
            already @ Error::Case { .. } => already,
            other => Error::Case {
                case_id: case_id.to_owned(),
                source: Box::new(other),
            },
        }
    }
}
