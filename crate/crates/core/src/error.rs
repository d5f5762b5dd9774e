use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("every sampled pair is degenerate (delta = 0); no verdict possible")]
    DegenerateSample,

    #[error("iteration did not converge after {iterations} steps (tail bound {tail_bound:e})")]
    NonConvergence { iterations: usize, tail_bound: f64 },

    #[error("search family has no feasible candidate: {0}")]
    EmptyFamily(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
