use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of a function or family.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two-parameter moments violate the family's moment domain.
    #[error("moment domain violated: {0}")]
    MomentDomain(String),

    /// A row recurrence was asked for an index above its capacity.
    #[error("capacity exceeded: n = {n} is above the cap of {cap}")]
    Capacity { n: usize, cap: usize },

    #[error("empty sample")]
    EmptySample,

    #[error("sample too small: need at least {min} observations, got {n}")]
    SampleTooSmall { n: usize, min: usize },

    /// The plug-in variance vanishes, so the studentized statistic is undefined.
    #[error("degenerate sample: {0}")]
    Degenerate(String),

    /// The chi-squared partition leaves no degrees of freedom.
    #[error("chi-squared test has {df} degrees of freedom")]
    NonPositiveDf { df: i64 },

    /// A contaminant's mean does not match the base law's mean.
    #[error("mean mismatch: base mean {base}, contaminant mean {contaminant}")]
    MeanMismatch { base: f64, contaminant: f64 },

    #[error("unknown identifier `{0}`")]
    UnknownId(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
