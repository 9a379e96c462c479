use thiserror::Error;

use crate::numerics::QuadratureResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error(
        "quadrature did not converge after {} subdivisions (estimated relative error {:.3e}, requested {:.3e})",
        .best.subdivisions, .best.abs_error_estimate, .rel_tol
    )]
    NoConvergence { best: QuadratureResult, rel_tol: f64 },

    /// The computation is well posed but carries no information, e.g. a Laplace
    /// point outside the prior support.
    #[error("degenerate computation: {0}")]
    Degenerate(String),

    /// A computed Bayes factor broke the analytic bound e^{t²/2}.
    #[error("internal consistency error: log B10 = {log_b10} exceeds the bound {bound}")]
    BoundViolated { log_b10: f64, bound: f64 },

    /// A failure inside a sweep, tagged with the grid point that caused it.
    #[error("at t = {t}, n = {n}, a = {a}, b = {b}: {source}")]
    GridPoint {
        t: f64,
        n: f64,
        a: f64,
        b: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
