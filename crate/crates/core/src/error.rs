use thiserror::Error;

/// Errors produced anywhere in the compression and eigensolving pipeline.
#[derive(Debug, Error)]
pub enum SbdError {
    #[error("{what} of size {size} exceeds the configured cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    #[error("invalid Pauli word {word:?}: {reason}")]
    BadWord { word: String, reason: String },
    #[error("non-finite coefficient in term {0:?}")]
    NonFinite(String),
    #[error("matrix dimension {0} is odd; pad before splitting")]
    OddDimension(usize),
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is numerically singular (pivot {pivot:e} below threshold {threshold:e})")]
    Singular { pivot: f64, threshold: f64 },
    #[error("trace {0:e} too small to seed the square-root iteration")]
    SeedDegenerate(f64),
    #[error("square-root iterate {0} is singular and no fallback is available")]
    IterationSingular(usize),
    #[error("matrix has vanishing Gershgorin bound; cannot normalize")]
    ZeroMatrix,
    #[error("compression depth {depth} too large for dimension {dim}")]
    DepthTooLarge { depth: usize, dim: usize },
    #[error("radicand {0:e} is negative")]
    NegativeRadicand(f64),
    #[error("argument out of domain: {0}")]
    DomainError(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("incomplete model grid: {0}")]
    IncompleteGrid(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl SbdError {
    /// True for errors caused by malformed input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            SbdError::BadWord { .. }
                | SbdError::NonFinite(_)
                | SbdError::Parse(_)
                | SbdError::Json(_)
                | SbdError::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, SbdError>;
