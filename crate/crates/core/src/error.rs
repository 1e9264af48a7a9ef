use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {what} = {value} ({reason})")]
    Domain {
        what: &'static str,
        value: f64,
        reason: String,
    },
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("quadrature did not converge: estimate {estimate:e} with error {error:e} above tolerance {tol:e}")]
    Convergence { estimate: f64, error: f64, tol: f64 },
    #[error("root solve failed: {0}")]
    Solver(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// The theorem or construction does not apply to the given body or space.
    #[error("not applicable: {0}")]
    Applicability(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inverse angular area is not injective: {0}")]
    NonInjective(String),
    #[error("malformed body description: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, reason: impl Into<String>) -> Self {
        Error::Domain {
            what,
            value,
            reason: reason.into(),
        }
    }
}
