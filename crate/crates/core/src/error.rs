use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The damped surface-field iteration exhausted its budget.
    #[error(
        "steady-state iteration did not converge after {iterations} iterations \
         (residual {residual:e})"
    )]
    NonConvergence {
        iterations: usize,
        residual: f64,
        surf_i: Complex64,
        surf_ii: Complex64,
    },

    /// Exact diagonalization is limited to plates of at most 2x2 sites.
    #[error("lattice size n = {0} exceeds the exact-diagonalization limit n <= 2")]
    DimensionGuard(usize),

    #[error("trajectory too short for time averaging: t_max = {t_max} (need >= {required})")]
    InsufficientTrajectory { t_max: f64, required: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
