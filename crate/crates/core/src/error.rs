//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("stopword list is empty")]
    EmptyStopwords,

    #[error("matrix shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: String, right: String },

    #[error("position ({row}, {col}) out of bounds for {nrows}x{ncols} matrix")]
    PositionOutOfBounds {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },

    #[error("threshold {0} outside [0, 1]")]
    ThresholdOutOfRange(f64),

    #[error("SVD did not converge on a {nrows}x{ncols} matrix after {iterations} iterations")]
    SvdNonConvergence {
        nrows: usize,
        ncols: usize,
        iterations: usize,
    },

    #[error("objective became non-finite at iteration {iteration}")]
    NonFiniteObjective { iteration: usize },

    #[error("selection uses {used} words, over the budget of {budget}")]
    BudgetExceeded { used: usize, budget: usize },

    #[error("{m} sentences exceed the brute-force limit of {limit}; use solve_exact")]
    TooManySentences { m: usize, limit: usize },

    #[error("corpus line {line}: {message}")]
    CorpusFormat { line: usize, message: String },

    #[error("duplicate reference summary for lecture '{lecture}', prompt '{prompt}'")]
    DuplicateReference { lecture: String, prompt: String },

    #[error(
        "reference summary for lecture '{lecture}', prompt '{prompt}' has no matching responses"
    )]
    OrphanReference { lecture: String, prompt: String },

    #[error("no responses found for lecture '{lecture}', prompt '{prompt}'")]
    UnknownDocument { lecture: String, prompt: String },

    #[error("missing reference summaries for: {0}")]
    MissingReferences(String),

    #[error("cannot split {lectures} lectures into {folds} folds")]
    NotEnoughLectures { lectures: usize, folds: usize },

    #[error("power iteration did not converge after {0} steps")]
    PowerIterationDiverged(usize),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
