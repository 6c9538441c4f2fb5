use thiserror::Error;

/// Errors raised by the model, analysis and I/O layers.
///
/// Numeric payloads are widened to `f64` so the error type does not depend
/// on the scalar the computation ran in.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid parameter {name} = {value}: must satisfy {requirement}")]
    InvalidParams {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("invalid state ({x}, {y}): need finite x > 0 and y >= 0")]
    InvalidState { x: f64, y: f64 },

    #[error("degenerate conjugacy: a = 3 makes the affine map constant")]
    DegenerateConjugacy,

    #[error("no preimage of p0 in (0, (a-1)/(2b)) for a = {a}, b = {b}")]
    NoPreimage { a: f64, b: f64 },

    #[error("{which} is not a fixed point for these parameters: {reason}")]
    NotAFixedPoint {
        which: &'static str,
        reason: &'static str,
    },

    #[error("parameter hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("insufficient data: trajectory has {len} states, need more than {needed}")]
    InsufficientData { len: usize, needed: usize },

    #[error("orbit left the domain at step {step}, before {required} steps were available")]
    OrbitEscaped { step: usize, required: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
