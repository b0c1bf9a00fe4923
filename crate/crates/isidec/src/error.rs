//! Error type shared by every fallible operation in the crate.

/// Errors reported by constructors and numerical routines.
///
/// The crate never panics on bad caller input; every public entry point
/// validates its arguments and reports one of these variants instead.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A tap vector must contain at least one coefficient.
    #[error("tap vector is empty")]
    EmptyTaps,

    /// Tap coefficients must be finite.
    #[error("tap {index} is not finite (got {value})")]
    NonFiniteTap {
        /// Position of the offending coefficient.
        index: usize,
        /// The offending value.
        value: f64,
    },

    /// A noise variance must be strictly positive and finite.
    #[error("noise variance must be positive and finite (got {0})")]
    InvalidVariance(f64),

    /// An input slice had the wrong length for the requested operation.
    #[error("{context}: expected length {expected}, got {actual}")]
    DimensionMismatch {
        /// What was being checked.
        context: &'static str,
        /// Required length.
        expected: usize,
        /// Length actually supplied.
        actual: usize,
    },

    /// A dense eigendecomposition was requested beyond the configured size cap.
    #[error("matrix order {n} exceeds the eigensolver budget of {budget}")]
    EigenBudgetExceeded {
        /// Requested matrix order.
        n: usize,
        /// Largest permitted order.
        budget: usize,
    },

    /// Generating a codebook would exceed the configured memory budget.
    #[error("codebook of {samples} samples exceeds the budget of {budget}")]
    CodebookBudgetExceeded {
        /// Total number of f64 samples requested.
        samples: usize,
        /// Largest permitted number of samples.
        budget: usize,
    },

    /// Input data is unusable for the requested computation.
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    /// A scalar or structural argument was outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;
