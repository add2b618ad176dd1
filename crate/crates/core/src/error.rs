use thiserror::Error;

/// Errors raised by the phase-space transforms, propagators and statistics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("argument out of domain: {0}")]
    OutOfDomain(String),
    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("degenerate line: trigonometric polynomial is identically zero")]
    DegenerateLine,
    #[error("empty statistics: {0}")]
    EmptyStatistics(String),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
