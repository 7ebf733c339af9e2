//! Spectral calculus on top of [`SpectralDecomposition`]: matrix functions
//! `f(M) = Q diag(f(λ)) Qᵀ`, guarded sign / inverse-square-root variants,
//! spectral projections onto eigenvalue windows, and operator norms.

use crate::error::{Error, Result};
use crate::linalg::eigen::{symmetric_eigenvalues, SpectralDecomposition};
use crate::linalg::matrix::{DenseRect, DenseSymmetric};

/// Maximum allowed `max |P² − P|` for a constructed projection.
pub const IDEMPOTENCY_TOLERANCE: f64 = 1e-10;

/// Maximum allowed `|trace(P) − rank(P)|`.
pub const TRACE_TOLERANCE: f64 = 1e-8;

/// Applies a scalar function to a symmetric matrix through its
/// eigendecomposition.  Errors if `f` produces a non-finite value on any
/// eigenvalue; the result is exactly symmetric by construction.
pub fn apply_spectral_function(
    d: &SpectralDecomposition,
    f: impl Fn(f64) -> f64,
) -> Result<DenseSymmetric> {
    let n = d.dim();
    let mut values = Vec::with_capacity(n);
    for &lambda in d.eigenvalues() {
        let y = f(lambda);
        if !y.is_finite() {
            return Err(Error::NonFiniteFunctionValue { eigenvalue: lambda });
        }
        values.push(y);
    }
    let q = d.basis();
    DenseSymmetric::from_fn_symmetric(n, |i, j| {
        (0..n).map(|k| q.get(i, k) * values[k] * q.get(j, k)).sum()
    })
}

/// `|M|`, the absolute value in the spectral-calculus sense.
pub fn matrix_abs(d: &SpectralDecomposition) -> Result<DenseSymmetric> {
    apply_spectral_function(d, f64::abs)
}

/// `sign(M)`.  Requires every eigenvalue to clear the safety band
/// `eps_factor · max(1, ‖M‖)`; otherwise reports the offending eigenvalue.
pub fn matrix_sign(d: &SpectralDecomposition, eps_factor: f64) -> Result<DenseSymmetric> {
    let band = d.eps_band(eps_factor);
    require_away_from_zero(d, band)?;
    apply_spectral_function(d, |x| if x > 0.0 { 1.0 } else { -1.0 })
}

/// `M^{-1/2}` for positive definite `M`; every eigenvalue must exceed the
/// safety band.
pub fn matrix_inv_sqrt(d: &SpectralDecomposition, eps_factor: f64) -> Result<DenseSymmetric> {
    let band = d.eps_band(eps_factor);
    let min = d.min_eigenvalue();
    if min <= band {
        return Err(Error::NotPositiveDefinite { min_eig: min });
    }
    apply_spectral_function(d, |x| 1.0 / x.sqrt())
}

/// `|M|^{-1/2}` for invertible `M`; every eigenvalue magnitude must exceed
/// the safety band.
pub fn matrix_abs_inv_sqrt(d: &SpectralDecomposition, eps_factor: f64) -> Result<DenseSymmetric> {
    let band = d.eps_band(eps_factor);
    require_away_from_zero(d, band)?;
    apply_spectral_function(d, |x| 1.0 / x.abs().sqrt())
}

fn require_away_from_zero(d: &SpectralDecomposition, band: f64) -> Result<()> {
    for &lambda in d.eigenvalues() {
        if lambda.abs() <= band {
            return Err(Error::NearSingular {
                eigenvalue: lambda,
                band,
            });
        }
    }
    Ok(())
}

/// Orthogonal projection onto a spectral subspace: the projection matrix,
/// the dimension of its range, and an orthonormal basis of that range
/// (the selected eigenvectors, as columns).
#[derive(Debug, Clone)]
pub struct OrthogonalProjection {
    matrix: DenseSymmetric,
    rank: usize,
    basis: DenseRect,
}

impl OrthogonalProjection {
    pub fn matrix(&self) -> &DenseSymmetric {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Orthonormal basis of the range, one column per selected eigenvector.
    pub fn basis(&self) -> &DenseRect {
        &self.basis
    }
}

/// Spectral projection onto the eigenvalues inside the open interval
/// `(lo, hi)`; infinite endpoints select a half line.
///
/// Errors with [`Error::AmbiguousCut`] when an eigenvalue lies within the
/// safety band of a finite endpoint, so a cut never silently splits a
/// near-degenerate cluster.
pub fn spectral_projection(
    d: &SpectralDecomposition,
    lo: f64,
    hi: f64,
    eps_factor: f64,
) -> Result<OrthogonalProjection> {
    if !(lo < hi) || lo.is_nan() || hi.is_nan() {
        return Err(Error::BadCutInterval { lo, hi });
    }
    let band = d.eps_band(eps_factor);
    for &lambda in d.eigenvalues() {
        for cut in [lo, hi] {
            if cut.is_finite() && (lambda - cut).abs() <= band {
                return Err(Error::AmbiguousCut {
                    eigenvalue: lambda,
                    cut,
                    band,
                });
            }
        }
    }

    let selected: Vec<usize> = (0..d.dim())
        .filter(|&k| {
            let lambda = d.eigenvalues()[k];
            lambda > lo && lambda < hi
        })
        .collect();
    let rank = selected.len();
    let q = d.basis();
    let n = d.dim();
    let matrix = DenseSymmetric::from_fn_symmetric(n, |i, j| {
        selected.iter().map(|&k| q.get(i, k) * q.get(j, k)).sum()
    })?;
    let mut basis = DenseRect::zeros(n, rank);
    for (c, &k) in selected.iter().enumerate() {
        for i in 0..n {
            basis.set(i, c, q.get(i, k));
        }
    }

    let projection = OrthogonalProjection {
        matrix,
        rank,
        basis,
    };
    verify_projection(&projection)?;
    Ok(projection)
}

fn verify_projection(p: &OrthogonalProjection) -> Result<()> {
    let n = p.dim();
    let m = p.matrix();
    let mut defect = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += m.get(i, k) * m.get(k, j);
            }
            defect = defect.max((acc - m.get(i, j)).abs());
        }
    }
    if defect > IDEMPOTENCY_TOLERANCE {
        return Err(Error::internal(format!(
            "projection is not idempotent: defect {defect:.3e}"
        )));
    }
    let trace_defect = (m.trace() - p.rank() as f64).abs();
    if trace_defect > TRACE_TOLERANCE {
        return Err(Error::internal(format!(
            "projection trace deviates from rank by {trace_defect:.3e}"
        )));
    }
    Ok(())
}

/// Operator (spectral) norm of a symmetric matrix, `max |λ|`.
pub fn operator_norm(m: &DenseSymmetric) -> Result<f64> {
    let values = symmetric_eigenvalues(m)?;
    Ok(values
        .iter()
        .fold(0.0f64, |acc, &x| acc.max(x.abs())))
}

/// Operator norm of a rectangular matrix, its largest singular value,
/// computed from the smaller Gram matrix.
pub fn operator_norm_rect(m: &DenseRect) -> Result<f64> {
    let gram = if m.rows() <= m.cols() {
        m.matmul(&m.transpose())?
    } else {
        m.transpose().matmul(m)?
    };
    let gram = DenseSymmetric::from_rect(&gram)?;
    let values = symmetric_eigenvalues(&gram)?;
    let top = values.iter().fold(0.0f64, |acc, &x| acc.max(x));
    Ok(top.max(0.0).sqrt())
}
