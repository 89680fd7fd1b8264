//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("aliasing: instantaneous frequency {f_inst:.1} Hz exceeds Nyquist {nyquist:.1} Hz")]
    Aliasing { f_inst: f64, nyquist: f64 },

    #[error("detection failure: {0}")]
    DetectionFailure(String),

    #[error("non-invertible projection: |cos(phi_v + Phi)| below 1e-6")]
    NonInvertibleProjection,

    #[error("undefined heading: both tangential components are zero")]
    UndefinedHeading,

    #[error("undefined attack angle: both radial and tangential components are zero")]
    UndefinedAttackAngle,

    #[error("degenerate envelope or pattern: CRLB denominator is not positive")]
    DegenerateMoments,

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("recording format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors caused by bad invocations (missing/invalid config or arguments)
    /// map to exit code 2 in the CLI; everything else is a runtime failure (1).
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Config(_) | Error::InvalidArgument(_))
    }
}
