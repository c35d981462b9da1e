use thiserror::Error;

/// Errors produced by instance construction, parsing, and optimization.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{n} variables exceeds the 2^n table capacity (max {max})")]
    Capacity { n: usize, max: usize },

    #[error("dimacs: {msg} (line {line})")]
    Dimacs { line: usize, msg: String },

    #[error("invalid clause: {0}")]
    InvalidClause(String),

    #[error("invalid model spec: {0}")]
    InvalidModel(String),

    #[error("degenerate spectrum: G0 = 0 (constant goal function)")]
    DegenerateSpectrum,

    #[error("objective returned a non-finite value at x = {0:?}")]
    NonFiniteObjective(Vec<f64>),

    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
