use thiserror::Error;

/// Errors produced by the estimator and its verification oracles.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("no ladder width reaches target error {target:e} (smallest reachable {best:e})")]
    NoDistanceFound { target: f64, best: f64 },

    #[error("no magic state factory protocol reaches output error {target:e}")]
    NoProtocol { target: f64 },

    #[error("fixed point did not converge after {iterations} iterations (width trace {trace:?})")]
    Convergence { iterations: usize, trace: Vec<u32> },

    #[error("config error at line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error("data error: {0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// Checks that `value` lies in `[0, 1)`.
pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && (0.0..1.0).contains(&value) {
        Ok(())
    } else {
        Err(invalid(name, format!("{value} is outside [0, 1)")))
    }
}
