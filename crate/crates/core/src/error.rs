//! Error types shared by all subsystems.

use thiserror::Error;

/// Crate-level error type.
#[derive(Debug, Error)]
pub enum CoreError {
    /// A configuration value is missing, out of range, or inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A grid or step size is too coarse for the requested computation.
    #[error("insufficient resolution: {0}")]
    Resolution(String),

    /// The integrator lost stability (energy blow-up or non-finite state).
    #[error("numerical divergence: {0}")]
    Divergence(String),

    /// A sampled function does not decay inside the computational window.
    #[error("domain too narrow: {0}")]
    DomainTooNarrow(String),

    /// The spatial domain does not contain the requested states.
    #[error("spatial domain too small: {0}")]
    Domain(String),

    /// Two expansions do not share the same entry set.
    #[error("mismatched expansion entries: {0}")]
    Pairing(String),

    /// Matrix dimensions do not agree.
    #[error("shape mismatch: {0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
