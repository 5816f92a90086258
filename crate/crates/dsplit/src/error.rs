//! Crate-wide error type.
//!
//! Every fallible operation in the library returns [`Result`]. Variants are
//! deliberately fine-grained so callers (and tests) can match on the precise
//! failure mode instead of parsing message strings.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All error conditions surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A vector argument had the wrong length.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A method name did not resolve to a bundled scheme or a readable file.
    #[error("unknown method `{0}`")]
    UnknownMethod(String),

    /// A scheme with complex coefficients was requested over a real field.
    #[error("scheme `{scheme}` has complex coefficients and requires a complex state field")]
    ComplexCoefficients { scheme: String },

    /// A coefficient set failed one of its structural checks.
    #[error("scheme `{scheme}` failed consistency check `{check}`: {detail}")]
    InvalidScheme {
        scheme: String,
        check: &'static str,
        detail: String,
    },

    /// A register became non-finite during a step. `stage` is 1-based.
    #[error("non-finite state at stage {stage} of a step from t = {t}")]
    Diverged { stage: usize, t: f64 },

    /// Two bodies approached closer than the safe radius.
    #[error("near-collision: separation {r:.3e} below minimum radius")]
    Collision { r: f64 },

    /// An iterative solve ran out of iterations.
    #[error("iteration did not converge after {iters} iterations (residual {residual:.3e})")]
    NoConvergence { iters: usize, residual: f64 },

    /// The adaptive controller could not shrink the step any further.
    #[error("step size underflow at t = {t} (|h| = {h:.3e} at the configured minimum)")]
    StepUnderflow { t: f64, h: f64 },

    /// The adaptive driver exceeded its step budget.
    #[error("step limit of {limit} steps exceeded at t = {t}")]
    StepLimitExceeded { limit: u64, t: f64 },

    /// A data set was too small for the requested analysis.
    #[error("not enough usable data points: have {have}, need at least {need}")]
    InsufficientData { have: usize, need: usize },

    /// A configuration value or combination was invalid.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A file could not be parsed.
    #[error("failed to parse {path}: {detail}")]
    Parse { path: String, detail: String },

    /// An underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
