//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A matrix expected to be hermitian deviates from its adjoint.
    #[error("matrix is not hermitian: ||m - m*|| = {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    /// A matrix or central element expected to be positive has a negative part.
    #[error("operand is not positive: minimum eigenvalue/scalar {min:.3e} below -{tolerance:.3e}")]
    NotPositive { min: f64, tolerance: f64 },

    /// Two values that must share a signature do not.
    #[error("signature mismatch: {context}")]
    SignatureMismatch { context: String },

    /// A component carries mass on a block its ideal mask excludes.
    #[error("support violation: component {component} is nonzero on inactive block {block} (mass {mass:.3e})")]
    SupportViolation {
        component: usize,
        block: usize,
        mass: f64,
    },

    /// Non-finite entry fed to a constructor.
    #[error("non-finite entry at position {position}")]
    NonFinite { position: usize },

    /// Shape of supplied data does not match the declared dimensions.
    #[error("bad shape: {context}")]
    BadShape { context: String },

    /// Orthogonal sampling needs a nonzero input vector.
    #[error("zero input vector")]
    ZeroInput,

    /// Operation requires an orthogonality-preserving operator.
    #[error("operator is not orthogonality-preserving: {reason}")]
    NotOrthogonalityPreserving { reason: String },

    /// No isometry exists for the requested component/ideal pattern.
    #[error("dimension obstruction: algebra block {block} has no active module component")]
    DimensionObstruction { block: usize },

    /// Grid parameter outside its admissible range.
    #[error("bad range: {context}")]
    BadRange { context: String },

    /// Winding count hit a zero sample value.
    #[error("zero value at grid index {index}")]
    ZeroValue { index: usize },

    /// Adjacent phase jump at or beyond the principal-branch guard.
    #[error("aliasing detected between grid indices {index} and {}: |jump| = {jump:.6} >= pi", index + 1)]
    AliasingDetected { index: usize, jump: f64 },

    /// JSON document does not match the published schema.
    #[error("schema error: {context}")]
    Schema { context: String },
}

pub type Result<T> = std::result::Result<T, Error>;
