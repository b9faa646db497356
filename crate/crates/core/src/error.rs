use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SascError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("degenerate constraint: {0}")]
    DegenerateConstraint(String),
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("iterate diverged at epoch {epoch}, step {step}")]
    Divergence { epoch: usize, step: u64 },
    #[error("undefined constant: {0}")]
    UndefinedConstant(String),
    #[error("unsupported problem: {0}")]
    Unsupported(String),
    #[error("invalid label {label} at row {row} (expected -1 or +1)")]
    InvalidLabel { row: usize, label: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: u64 },
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = SascError> = std::result::Result<T, E>;

pub(crate) fn io_error(path: &std::path::Path, e: impl std::fmt::Display) -> SascError {
    SascError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

pub(crate) fn ensure_finite(v: &[f64], what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(SascError::InvalidInput(format!(
            "{what} has non-finite components"
        )))
    }
}

pub(crate) fn ensure_positive(v: f64, name: &'static str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(SascError::InvalidParameter {
            name,
            reason: format!("must be positive and finite, got {v}"),
        })
    }
}
