use thiserror::Error;

/// Failure modes shared by every evaluator in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested series or integral does not converge in this parameter regime.
    #[error("divergent regime: {condition} (ρ = {rho:.6})")]
    Divergence {
        /// Convergence ratio; the series converges only for `rho < 1`.
        rho: f64,
        /// Human-readable statement of the violated condition.
        condition: String,
    },

    /// The iteration budget ran out before the tolerance was met.
    #[error("no convergence after {iterations} steps (best estimate {best}, error estimate {error_estimate:e})")]
    NonConvergence {
        best: f64,
        error_estimate: f64,
        iterations: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
