use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Δmax(G) < φ(G) or Δmax(Ḡ) < φ(Ḡ), e.g. a complete graph without loops.
    #[error("irregularity undefined: {0}")]
    IrregularityUndefined(String),

    /// The relevant graph has zero algebraic connectivity.
    #[error("graph is disconnected (algebraic connectivity is zero)")]
    Disconnected,

    #[error("no graph in bucket [{lo}, {hi}) after {tries} draws")]
    BucketExhausted { lo: f64, hi: f64, tries: usize },

    #[error("solver did not converge in {iterations} iterations")]
    NotConverged { iterations: usize },

    /// ⟨M, X̂₀⟩ = 0, so the explained-variance ratio is undefined.
    #[error("explained variance of the unpenalized solution is zero")]
    DegenerateBaseline,

    #[error("threshold {0} collapses the iterate to zero")]
    ThresholdTooLarge(f64),

    #[error("parse error at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
