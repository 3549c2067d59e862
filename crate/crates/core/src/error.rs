use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum PlregError {
    /// A distribution or model parameter is outside its valid domain.
    #[error("parameter `{name}` = {value} violates constraint {constraint}")]
    ParameterDomain {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// An argument (response value, probability, linear predictor) lies outside
    /// the domain of the function it was passed to.
    #[error("argument out of domain: {0}")]
    Domain(String),

    /// A response equal to 0 or 1 (or outside the unit interval).
    #[error(
        "response {index} = {value} is not strictly inside (0, 1); \
         zero/one-inflated models are required for boundary observations"
    )]
    BoundaryResponse { index: usize, value: f64 },

    /// Design matrix problems: dimensions, rank, counts.
    #[error("design error: {0}")]
    Design(String),

    /// The optimizer did not reach the convergence criteria.
    #[error("optimizer did not converge after {iterations} iterations (max |score| = {max_abs_score:.3e})")]
    Convergence {
        iterations: usize,
        max_abs_score: f64,
        best: Vec<f64>,
    },

    /// Too many simulation replicates failed to refit.
    #[error("{failed} of {total} simulated refits failed")]
    TooManyFailures { failed: usize, total: usize },

    /// A matrix that must be inverted (observed information) is singular or
    /// not positive definite.
    #[error("singular matrix: {0}")]
    Singular(String),

    /// Incorrect use of an API (for instance perturbing a binary covariate).
    #[error("usage error: {0}")]
    Usage(String),

    /// Malformed input files.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl PlregError {
    pub(crate) fn param(name: &'static str, value: f64, constraint: &'static str) -> Self {
        PlregError::ParameterDomain {
            name,
            value,
            constraint,
        }
    }

    /// True for errors that come from the numerics rather than from the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            PlregError::Convergence { .. }
                | PlregError::Singular(_)
                | PlregError::TooManyFailures { .. }
                | PlregError::Domain(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, PlregError>;
