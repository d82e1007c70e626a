use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("infeasible constraint: {0}")]
    InfeasibleConstraint(String),

    #[error("solver did not converge after {restarts} restarts ({iterations} iterations in total)")]
    ConvergenceFailure { iterations: usize, restarts: usize },

    /// A pivot of the KKT system underflowed. Restartable.
    #[error("singular KKT system")]
    SingularSystem,

    #[error("no Beta distribution has mean {mean} and variance {variance}")]
    NonExistence { mean: f64, variance: f64 },

    #[error("degenerate series: {0}")]
    DegenerateSeries(String),
}

impl Error {
    /// Stable snake_case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Domain(_) => "domain",
            Self::DimensionMismatch { .. } => "dimension_mismatch",
            Self::InfeasibleConstraint(_) => "infeasible_constraint",
            Self::ConvergenceFailure { .. } => "convergence_failure",
            Self::SingularSystem => "singular_system",
            Self::NonExistence { .. } => "non_existence",
            Self::DegenerateSeries(_) => "degenerate_series",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
