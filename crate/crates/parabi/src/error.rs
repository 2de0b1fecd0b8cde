//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix not Hermitian: max |m_ij - conj(m_ji)| = {max_asymmetry:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { max_asymmetry: f64, tolerance: f64 },

    #[error("density matrix trace {trace:.12} deviates from 1 by more than {tolerance:.1e}")]
    TraceDeviation { trace: f64, tolerance: f64 },

    #[error("positivity violated: eigenvalue {eigenvalue:.3e} below -{tolerance:.1e} (truncation too aggressive?)")]
    PositivityViolation { eigenvalue: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("g = {g} is at or past the spectral-collapse point g = omega/2 = {limit}; the oscillator spectrum is no longer discrete")]
    SpectralCollapse { g: f64, limit: f64 },

    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),

    #[error("Fock cutoff too small: truncation residual {residual:.3e} exceeds {tolerance:.1e}; suggest n_max >= {suggested}")]
    CutoffTooSmall {
        residual: f64,
        tolerance: f64,
        suggested: usize,
    },

    #[error("revival-time estimate is derived only for equal couplings and equal qubit frequencies")]
    UnsupportedConfiguration,

    #[error("moment sums did not converge at the configured cutoff: tail contribution {tail:.3e}")]
    MomentNonConvergence { tail: f64 },

    #[error("Husimi grid too small: Riemann-sum normalization {norm:.6} misses 1 by more than {tolerance:.1e}")]
    GridTooSmall { norm: f64, tolerance: f64 },

    #[error("exact spectrum did not converge under cutoff doubling: drift {drift:.3e}")]
    OracleNonConvergence { drift: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
