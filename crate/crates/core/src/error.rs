//! Error type shared by all modules of the crate.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Validation failures (dimensions, symmetry, finiteness) come from type
/// constructors; spectral failures (no gap, near-singular cuts, lost
/// positivity) come from the analysis operations; `Internal` marks an
/// invariant the library itself guarantees and therefore signals a bug.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix entries must be finite ({context})")]
    NonFinite { context: &'static str },

    #[error("matrix must have at least one row and one column")]
    Empty,

    #[error("data length {len} does not match {rows}x{cols}")]
    BadDataLength { len: usize, rows: usize, cols: usize },

    #[error("symmetry residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    NotSymmetric { residual: f64, tolerance: f64 },

    #[error("dimension mismatch in {context}: {left} vs {right}")]
    DimensionMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    #[error("operator dimension {n} exceeds the supported maximum {max}")]
    DimensionTooLarge { n: usize, max: usize },

    #[error(
        "Jacobi iteration did not converge within {sweeps} sweeps \
         (off-diagonal residual {residual:.3e}, threshold {threshold:.3e})"
    )]
    NoConvergence {
        sweeps: usize,
        residual: f64,
        threshold: f64,
    },

    #[error("spectral function value is not finite at eigenvalue {eigenvalue:.17e}")]
    NonFiniteFunctionValue { eigenvalue: f64 },

    #[error(
        "eigenvalue {eigenvalue:.17e} lies within {band:.3e} of the spectral cut {cut:.17e}"
    )]
    AmbiguousCut { eigenvalue: f64, cut: f64, band: f64 },

    #[error("operator is nearly singular: eigenvalue {eigenvalue:.17e} within {band:.3e} of zero")]
    NearSingular { eigenvalue: f64, band: f64 },

    #[error("spectral cut bounds are invalid: lo = {lo:.17e}, hi = {hi:.17e}")]
    BadCutInterval { lo: f64, hi: f64 },

    #[error("block is not positive definite (minimum eigenvalue {min_eig:.17e})")]
    BlockNotPositiveDefinite { min_eig: f64 },

    #[error("no spectral gap: clusters are empty or interleave (alpha {alpha:.17e}, beta {beta:.17e})")]
    NoGap { alpha: f64, beta: f64 },

    #[error(
        "eigenvector {index} is not aligned with either eigenspace of the involution \
         (signature {signature:.3e})"
    )]
    ClusterMismatch { index: usize, signature: f64 },

    #[error(
        "gap hint ({hint_lo:.17e}, {hint_hi:.17e}) does not bracket the detected gap \
         ({alpha:.17e}, {beta:.17e})"
    )]
    HintMismatch {
        hint_lo: f64,
        hint_hi: f64,
        alpha: f64,
        beta: f64,
    },

    #[error("shift {mu:.17e} lies outside the guarded gap [{lo:.17e}, {hi:.17e}]")]
    ShiftOutsideGap { mu: f64, lo: f64, hi: f64 },

    #[error("shifted form operator is not positive definite (minimum eigenvalue {min_eig:.17e})")]
    NotPositiveDefinite { min_eig: f64 },

    #[error(
        "perturbation is not off-diagonal: anticommutator norm {residual:.3e} exceeds {tolerance:.3e}"
    )]
    NotOffDiagonal { residual: f64, tolerance: f64 },

    #[error("gap width must be positive, got {d:.17e}")]
    NonPositiveGapWidth { d: f64 },

    #[error("norm argument must be nonnegative, got {v:.17e}")]
    NegativeBound { v: f64 },

    #[error("delta must be positive, got {delta:.17e}")]
    NonPositiveDelta { delta: f64 },

    #[error("operation requires a gap containing zero, but the detected case is {tag}")]
    NotCentral { tag: &'static str },

    #[error("proof diagnostics at shift {mu:.17e} are outside their validity domain: {reason}")]
    DiagnosticsDomain { mu: f64, reason: &'static str },

    #[error("generator configuration is invalid: {reason}")]
    InvalidGenerator { reason: String },

    #[error("invalid argument: {reason}")]
    InvalidArgument { reason: String },

    #[error("internal invariant violated: {reason}")]
    Internal { reason: String },
}

impl Error {
    /// Shorthand for [`Error::Internal`] with a formatted reason.
    pub(crate) fn internal(reason: impl Into<String>) -> Self {
        Error::Internal {
            reason: reason.into(),
        }
    }
}
