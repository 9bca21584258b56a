use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation (out-of-range
    /// membership value, point not in the space, dimension mismatch).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A grid search found no admissible value.
    #[error("search failed: {0}")]
    SearchFailure(String),

    /// The feasibility predicate of `h_eps` does not hold at the search ceiling.
    #[error("search ceiling too small: predicate false at lambda_max = {lambda_max}")]
    CeilingTooSmall { lambda_max: f64 },

    #[error("degenerate pair: nc ratios are undefined for a = b")]
    DegeneratePair,

    #[error("iteration diverged at step {iteration}: non-finite iterate")]
    Divergence { iteration: usize },

    #[error("insufficient data: need at least {needed} residuals, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("invalid construction: {0}")]
    Construction(String),

    #[error("map is not a neutrosophic contraction: {0}")]
    NotContraction(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
