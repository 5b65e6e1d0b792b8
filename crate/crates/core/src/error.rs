use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("state outside the domain: rho = {rho}, theta = {theta}")]
    DomainViolation { rho: f64, theta: f64 },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: String },

    #[error("step rejected: dt = {dt} exceeds the stability bound {bound}")]
    StepRejected { dt: f64, bound: f64 },

    #[error("temperature recovery did not converge at rho = {rho}, energy = {energy}")]
    TemperatureRecovery { rho: f64, energy: f64 },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
