use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("derivative undefined at breakpoint t = {t}")]
    NonDifferentiable { t: f64 },

    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },

    #[error("adaptive integration exceeded its budget of {evaluations} evaluations")]
    BudgetExceeded { evaluations: usize },

    #[error("no sign change found on [{lo}, {hi}]")]
    Bracketing { lo: f64, hi: f64 },

    #[error("{count} sign changes found on [{lo}, {hi}]; the root is not unique")]
    MultipleRoots { count: usize, lo: f64, hi: f64 },

    #[error("kernel produced a non-finite value at t = {t}")]
    NonFiniteKernel { t: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("beta = {beta}: {source}")]
    Sweep {
        beta: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
