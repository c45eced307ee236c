use thiserror::Error;

/// Errors raised by the computational modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate step distribution: {0}")]
    DegenerateDistribution(String),

    #[error("invalid probability: {0}")]
    InvalidProbability(String),

    #[error("no log-concave envelope radius found above {min_radius} (grid step {grid_step})")]
    EnvelopeNotFound { grid_step: f64, min_radius: f64 },

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("fixed-point precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("maximal span {span} is not coprime to q = {q}")]
    SpanNotCoprime { span: i64, q: i128 },

    #[error("spectral corruption: {0}")]
    SpectralCorruption(String),

    #[error("support of S_k has {size} points, limit is {limit}")]
    SupportTooLarge { size: u64, limit: u64 },

    #[error("coefficient c_{h} has modulus {modulus} > 1/|h|")]
    CoefficientBound { h: i64, modulus: f64 },

    #[error("points are not separated (two coincide modulo 1)")]
    ZeroSeparation,

    #[error("spectral factor is singular at h = {0}")]
    SingularSpectralFactor(i64),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for failures of the floating-point or fixed-point machinery,
    /// as opposed to inputs that violate a precondition.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SpectralCorruption(_)
                | Error::PrecisionExhausted(_)
                | Error::SingularSpectralFactor(_)
                | Error::EnvelopeNotFound { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
