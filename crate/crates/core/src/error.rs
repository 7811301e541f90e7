use thiserror::Error;

/// Errors raised by constructors, conversions, and metric evaluations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("unsupported dimension {0} (supported: 1..=4)")]
    UnsupportedDimension(usize),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid stochastic channel: {0}")]
    InvalidStochastic(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("projector does not fix the state (deviation {deviation:e})")]
    InvalidProjector { deviation: f64 },

    #[error("SDP did not converge: bounds [{primal_bound}, {dual_bound}] after {iterations} iterations")]
    Unconverged {
        primal_bound: f64,
        dual_bound: f64,
        iterations: usize,
    },

    #[error("Choi side dimension {side} ({} SDP variables) exceeds the oracle limits (side <= 144, variables <= 4096)", variables.map_or("?".to_string(), |v| v.to_string()))]
    DimensionTooLarge { side: usize, variables: Option<usize> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
