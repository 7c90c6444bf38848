use thiserror::Error;

/// Errors raised by the library. The CLI maps [`Error::Validation`] and
/// [`Error::Config`] to exit code 1 and the numerical variants to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Validation(String),

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("point lies on the essential spectrum (distance {distance:.3e} to the symbol curve)")]
    OnEssentialSpectrum { distance: f64 },

    #[error("no exceptional point: 6 s1 s2 - s1^2 - s2^2 = {0} <= 0")]
    NoExceptionalPoint(f64),

    #[error("band tracking failed after {refinements} refinements (jump {jump:.3e})")]
    BandTracking { refinements: usize, jump: f64 },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Validation(_) | Error::Precondition(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
