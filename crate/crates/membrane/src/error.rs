//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the inputs was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An iterative method did not reach its tolerance.
    #[error("{what} did not converge after {iterations} iterations (last residual {residual:.3e})")]
    Convergence {
        what: String,
        iterations: usize,
        residual: f64,
    },

    /// The sign conditions f > 0, g < 0, f + g < 0 failed near the free boundary.
    #[error("two-phase sign condition violated: {0}")]
    SignCondition(String),

    /// No level-set crossing was found.
    #[error("empty contour: the level does not intersect the field range")]
    EmptyContour,

    /// The angular matching system has no admissible solution.
    #[error("no Blank profile found for these coefficients: {0}")]
    NoBlankProfile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
