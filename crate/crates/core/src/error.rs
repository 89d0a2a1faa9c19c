use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported dimension {0}: expected 2, 4 or 8")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("expected {expected} entries, got {actual}")]
    EntryCount { expected: usize, actual: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("zero vector cannot be normalized")]
    ZeroNorm,
    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("expectation has imaginary part {imaginary:e}")]
    ImaginaryExpectation { imaginary: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("particle index {0} out of range 1..=3")]
    InvalidParticle(usize),
    #[error("sign must be +1 or -1, got {0}")]
    InvalidSign(i8),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("invalid atom distribution: {0}")]
    InvalidDistribution(String),
    #[error("({p1},{p2},{p3})/{q} is not a primitive rational unit vector")]
    InvalidRational { p1: i64, p2: i64, p3: i64, q: i64 },
    #[error("no rational direction within {requested:e} rad (best achievable {best:e} rad)")]
    NoRationalWithin { requested: f64, best: f64 },
    #[error("operators for combination {combo} do not commute (norm {norm:e})")]
    NonCommuting { combo: &'static str, norm: f64 },
    #[error("empty triplet set")]
    EmptyTripletSet,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad caller input rather than a failed internal invariant.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::NoConvergence { .. } | Error::ImaginaryExpectation { .. }
        )
    }
}
