use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input file (PGM header, CSV layout, ...).
    #[error("format error: {0}")]
    Format(String),

    #[error("degenerate density: {0}")]
    DegenerateDensity(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// Simulated trajectory left the representable range.
    #[error("unstable simulation: |entry| exceeded {limit:e} at step {step}")]
    Unstable { step: usize, limit: f64 },

    #[error("singular mixing matrix (condition ratio {ratio:e})")]
    SingularMixing { ratio: f64 },

    /// All kernel weights underflowed for a regression query.
    #[error("query is outside the support of the training set")]
    OutOfSupport,

    #[error("degenerate regression: {0}")]
    DegenerateRegression(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// Amari-index with a single block on both sides.
    #[error("amari-index undefined for a single block")]
    UndefinedIndex,

    #[error("degenerate global matrix: {0}")]
    DegenerateMatrix(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
