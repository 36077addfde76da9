use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "Fourier truncation not converged at g = {g}: enlarging n_trunc from {n_trunc} shifts level {level} by rel. {shift:.3e}"
    )]
    ConvergenceMargin {
        g: f64,
        n_trunc: usize,
        level: usize,
        shift: f64,
    },

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("truncation filters leave an empty basis")]
    EmptyBasis,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("eigensolver did not converge after {applications} matrix applications (residual {residual:.3e})")]
    NoConvergence { applications: usize, residual: f64 },

    #[error("operator is not Hermitian (defect {defect:.3e})")]
    NonHermitian { defect: f64 },

    #[error("magnetic part of the Hamiltonian is not available")]
    MissingMagnetic,

    #[error("reference unavailable: {0}")]
    ReferenceUnavailable(String),

    #[error("degenerate design matrix: {0}")]
    DegenerateDesign(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for errors caused by bad user input rather than numerical failure.
    pub fn is_parameter_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::UnsupportedModel(_)
                | Error::EmptyBasis
                | Error::DimensionMismatch(_)
        )
    }
}
