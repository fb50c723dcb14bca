use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("parameter {value} outside model domain [{lo}, {hi}]")]
    DomainViolation { value: f64, lo: f64, hi: f64 },

    #[error("model `{0}` declares no critical value")]
    NoCriticalValue(String),

    #[error("Richardson extrapolation did not settle: coarse {coarse:.12e}, extrapolated {extrapolated:.12e}")]
    RichardsonMismatch { coarse: f64, extrapolated: f64 },

    #[error("negative QFI {0:.3e} from finite differences")]
    NegativeQfi(f64),

    #[error("truncation did not converge up to N = {n_max} (last values {previous:.12e}, {last:.12e})")]
    TruncationNotConverged { n_max: usize, previous: f64, last: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
