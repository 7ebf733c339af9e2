//! Dense real symmetric linear algebra: matrix types, a deterministic cyclic
//! Jacobi eigensolver, and spectral calculus (matrix functions, spectral
//! projections, operator norms).

mod eigen;
mod functions;
mod matrix;

pub use eigen::{
    symmetric_eigendecomposition, symmetric_eigenvalues, SpectralDecomposition,
    CONVERGENCE_FACTOR, MAX_SWEEPS, ORTHONORMALITY_TOLERANCE, RECONSTRUCTION_FACTOR,
};
pub use functions::{
    apply_spectral_function, matrix_abs, matrix_abs_inv_sqrt, matrix_inv_sqrt, matrix_sign,
    operator_norm, operator_norm_rect, spectral_projection, OrthogonalProjection,
    IDEMPOTENCY_TOLERANCE, TRACE_TOLERANCE,
};
pub use matrix::{DenseRect, DenseSymmetric, SYMMETRY_TOLERANCE};
