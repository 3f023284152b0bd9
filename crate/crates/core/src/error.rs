//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong while building kernels, integrating or
/// running a scenario.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or evaluation point outside the mathematical domain
    /// (for example `t <= 0`, `s` outside `(0, 1)`, a pole of Gamma).
    #[error("domain error: {0}")]
    Domain(String),

    /// A malformed or inconsistent configuration value.
    #[error("invalid configuration `{key}`: {reason}")]
    Config { key: String, reason: String },

    /// A dimension mismatch between a point and the field or kernel.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// A non-finite value produced inside an integrator or field.
    #[error("non-finite value ({value}) encountered at {location}")]
    NonFinite { location: String, value: f64 },

    /// Underlying I/O failure (harness output, config files).
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialisation failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

/// Return `value` if finite, otherwise a [`Error::NonFinite`] tagged with the
/// location produced by `location`.
pub(crate) fn finite(value: f64, location: impl FnOnce() -> String) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite {
            location: location(),
            value,
        })
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
