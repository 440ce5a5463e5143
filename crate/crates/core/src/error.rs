//! Crate-wide error type.
//!
//! Every fallible operation in this crate returns [`Error`]. Variants carry
//! enough context (view index, iteration, offending value) to diagnose a
//! failure without re-running the computation.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by dataset validation, the solver, and the analysis tools.
#[derive(Debug, Error)]
pub enum Error {
    /// A dataset contained no views, or a view had zero rows or columns.
    #[error("view {view} is empty ({rows}x{cols})")]
    EmptyView { view: usize, rows: usize, cols: usize },

    /// A dataset contained no views at all.
    #[error("dataset has no views")]
    NoViews,

    /// A matrix that must have entries was empty.
    #[error("{context} is empty")]
    EmptyMatrix { context: String },

    /// A matrix entry was NaN or infinite.
    #[error("non-finite entry {value} at ({row}, {col}) in {context}")]
    NonFiniteEntry { context: String, row: usize, col: usize, value: f64 },

    /// A matrix entry was negative where nonnegativity is required.
    #[error("negative entry {value} at ({row}, {col}) in {context}")]
    NegativeEntry { context: String, row: usize, col: usize, value: f64 },

    /// Views disagree on the number of observations (columns).
    #[error("view {view} has {found} observations but view 0 has {expected}")]
    ObservationCountMismatch { view: usize, expected: usize, found: usize },

    /// Label vector length does not match the number of observations.
    #[error("label count {labels} does not match observation count {observations}")]
    LabelLengthMismatch { labels: usize, observations: usize },

    /// A view sums to zero and cannot be normalized.
    #[error("view {view} sums to zero and cannot be normalized")]
    ZeroSumView { view: usize },

    /// A hyperparameter is outside its valid range.
    #[error("invalid hyperparameter: {reason}")]
    InvalidHyperParam { reason: String },

    /// The factorization rank is too large for the dataset.
    #[error("rank {k} must be smaller than the smallest view dimension {limit}")]
    RankTooLarge { k: usize, limit: usize },

    /// Two arrays passed to an update rule have incompatible shapes.
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch { context: &'static str, expected: String, found: String },

    /// All view weights collapsed below the representable threshold, so the
    /// consensus update is undefined.
    #[error("all view weights are degenerate (sum of alpha^p = {sum:e})")]
    DegenerateAlpha { sum: f64 },

    /// The objective became NaN or infinite during iteration.
    #[error("objective became non-finite at outer iteration {outer}")]
    NonFiniteObjective { outer: usize },

    /// The graph construction needs more observations than the dataset has.
    #[error("need at least {required} observations for {context}, found {found}")]
    InsufficientObservations { context: &'static str, required: usize, found: usize },

    /// An eigendecomposition failed to produce finite eigenpairs.
    #[error("eigendecomposition failed: {reason}")]
    EigenFailure { reason: String },

    /// Clustering was asked for more clusters than there are points.
    #[error("cannot form {k} clusters from {points} points")]
    TooFewPoints { k: usize, points: usize },

    /// Predicted and reference label vectors are unusable for scoring.
    #[error("label vectors unusable for scoring: {reason}")]
    LabelMismatch { reason: String },

    /// A synthetic-data specification is internally inconsistent.
    #[error("invalid synthetic spec: {reason}")]
    InvalidSpec { reason: String },

    /// A bound calculator received parameters that make a logarithm
    /// nonpositive.
    #[error("logarithm argument {value} is not positive in {context}")]
    NegativeLogArgument { context: &'static str, value: f64 },

    /// The confidence level for a bound must lie strictly inside (0, 1).
    #[error("confidence delta must lie in (0, 1), found {delta}")]
    InvalidConfidence { delta: f64 },

    /// A bound calculator received a nonsensical parameter.
    #[error("invalid bound parameter: {reason}")]
    InvalidBoundParam { reason: String },

    /// Reading or writing a file failed.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// A CSV cell could not be parsed as a number (or label).
    #[error("parse error in {path} at line {line}: {reason}")]
    Parse { path: String, line: usize, reason: String },
}
