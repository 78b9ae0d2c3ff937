use thiserror::Error;

/// Errors raised by the numerical routines and the config front end.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("conjugate bracket exceeded cap at y={y}; partial supremum {partial}")]
    ConjugateBracket { y: f64, partial: f64 },

    #[error("quadrature did not converge on [{a}, {b}] (last {last}, previous {previous})")]
    Quadrature {
        a: f64,
        b: f64,
        last: f64,
        previous: f64,
    },

    #[error("exhaustive partition search supports at most {cap} atoms, got {atoms}")]
    PartitionCap { cap: usize, atoms: usize },

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("refused: {0}")]
    Refused(String),

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
