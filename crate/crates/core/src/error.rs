use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("quotient is degenerate: denominator vanishes")]
    DivisionDegenerate,

    #[error("no bracket found: {0}")]
    BracketNotFound(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),

    #[error("spectrum {0:?} lies outside the cone")]
    OutsideCone(Vec<f64>),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("root solve did not converge: {0}")]
    RootNotConverged(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("decay fit failed: {0}")]
    DecayFit(String),

    #[error("certification failed: {0}")]
    CertificationFailed(String),

    #[error("barrier not found at boundary point {xi:?} (worst boundary slack {worst:e})")]
    BarrierNotFound { xi: Vec<f64>, worst: f64 },

    #[error("no threshold: predicate holds on the whole search interval")]
    NoThreshold,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
