//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty point set")]
    EmptyCloud,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Wolfe's min-norm-point iteration ran out of iterations. Carries the
    /// best iterate and its worst certificate residual.
    #[error("min-norm point did not converge after {iterations} iterations (residual {residual:.3e})")]
    WolfeNonConvergence {
        iterations: usize,
        residual: f64,
        best_point: Vec<f64>,
        best_norm: f64,
    },

    /// `hausdorff_nested` requires conv(inner) ⊆ conv(outer).
    #[error("nesting violated: inner vertex {vertex} lies {excess:.3e} outside the outer hull")]
    NestingViolated { vertex: usize, excess: f64 },

    #[error("smoothness constant `{0}` is required but missing")]
    MissingConstant(&'static str),

    #[error("sampling-density constant undefined: {0}")]
    InvalidLambda(String),

    #[error("unsupported set kind for this operation: {0}")]
    UnsupportedSet(String),

    #[error("ODE state became non-finite at t = {time}")]
    OdeBlowUp { time: f64 },

    #[error("quadratic program is malformed: {0}")]
    BadProgram(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}
