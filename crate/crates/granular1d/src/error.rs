//! Crate-wide error type. Run drivers have their own error carrying the last
//! valid state (see [`crate::timestep::RunError`]); config parsing reports
//! line/key diagnostics via [`crate::config::ConfigError`].

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Evaluation point outside `[-L, L]`.
    #[error("xi = {xi} outside the domain [-{half_width}, {half_width}]")]
    OutOfDomain { xi: f64, half_width: f64 },

    /// The collision table for this configuration would exceed the byte budget.
    #[error("collision workspace needs {needed} bytes, budget is {budget}")]
    BudgetExceeded { needed: usize, budget: usize },

    /// A fit or statistic was requested on a series too short to support it.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
