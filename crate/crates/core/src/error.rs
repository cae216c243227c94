use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input is outside the domain where the model is defined.
    #[error("domain error in {quantity}: {reason}")]
    Domain {
        quantity: &'static str,
        reason: String,
    },

    /// A measured efficiency chain that cannot come from probabilities.
    #[error("inconsistent efficiency budget: inferred eta_sfg = {0} exceeds 1")]
    InconsistentBudget(f64),

    #[error("no interior optimum: {0}")]
    NoInteriorOptimum(String),

    /// Scenario, flag, or file-schema problem. `field` names the offending path.
    #[error("configuration error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(quantity: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            quantity,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 2,
            Error::Domain { .. } | Error::InconsistentBudget(_) | Error::NoInteriorOptimum(_) => 3,
            Error::Io { .. } => 4,
            Error::Csv(e) if e.is_io_error() => 4,
            Error::Csv(_) => 2,
        }
    }
}

/// Rejects NaN and values `<= 0`.
pub(crate) fn require_positive(quantity: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::domain(quantity, format!("must be positive and finite, got {value}")))
    }
}

pub(crate) fn require_non_negative(quantity: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::domain(quantity, format!("must be non-negative and finite, got {value}")))
    }
}

pub(crate) fn require_probability(quantity: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::domain(quantity, format!("must lie in [0, 1], got {value}")))
    }
}
