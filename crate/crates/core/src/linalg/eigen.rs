//! Deterministic symmetric eigendecomposition via cyclic Jacobi rotations.
//!
//! The solver sweeps the strict upper triangle in row-major order and
//! annihilates each pivot with a Givens rotation.  It is dependency-free and
//! bit-reproducible: the rotation sequence depends only on the matrix
//! entries, eigenvalues are sorted ascending with a stable tie-break, and
//! every eigenvector is sign-normalized so its largest-magnitude component
//! is positive (ties broken by the lowest index).

use crate::error::{Error, Result};
use crate::linalg::matrix::{DenseRect, DenseSymmetric};

/// Convergence threshold factor: the iteration stops once the off-diagonal
/// Frobenius mass drops to `CONVERGENCE_FACTOR · ‖M‖_F` of the input.
pub const CONVERGENCE_FACTOR: f64 = 1e-14;

/// Hard cap on the number of full sweeps before giving up.
pub const MAX_SWEEPS: usize = 100;

/// Maximum allowed `max |QᵀQ − I|` for a returned basis.
pub const ORTHONORMALITY_TOLERANCE: f64 = 1e-12;

/// Reconstruction factor: `max |QΛQᵀ − M| ≤ RECONSTRUCTION_FACTOR · max(1, ‖M‖)`.
pub const RECONSTRUCTION_FACTOR: f64 = 1e-11;

/// Eigenvalues (ascending) and an orthonormal eigenbasis of a real
/// symmetric matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    basis: DenseRect,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors as columns, ordered like the eigenvalues.
    pub fn basis(&self) -> &DenseRect {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// Operator norm of the decomposed matrix, `max |λ|`.
    pub fn spectral_norm(&self) -> f64 {
        self.min_eigenvalue().abs().max(self.max_eigenvalue().abs())
    }

    /// Safety band `factor · max(1, ‖M‖)` used by spectral cuts and
    /// near-singularity guards.
    pub fn eps_band(&self, eps_factor: f64) -> f64 {
        eps_factor * self.spectral_norm().max(1.0)
    }

    /// `QΛQᵀ`, exactly symmetric by construction.
    pub fn reconstruct(&self) -> DenseSymmetric {
        let n = self.dim();
        DenseSymmetric::from_fn_symmetric(n, |i, j| {
            (0..n)
                .map(|k| self.basis.get(i, k) * self.eigenvalues[k] * self.basis.get(j, k))
                .sum()
        })
        .expect("reconstruction entries are finite")
    }

    /// Builds a decomposition from raw parts; used internally for mirrored
    /// operators where eigenvalues are negated and reordered.
    pub(crate) fn from_parts(eigenvalues: Vec<f64>, basis: DenseRect) -> Self {
        Self { eigenvalues, basis }
    }
}

/// Full eigendecomposition of a symmetric matrix.
///
/// Errors with [`Error::NoConvergence`] if the off-diagonal mass has not
/// dropped below the threshold after [`MAX_SWEEPS`] sweeps, carrying the
/// final residual.
pub fn symmetric_eigendecomposition(m: &DenseSymmetric) -> Result<SpectralDecomposition> {
    let n = m.dim();
    let mut a = m.data().to_vec();
    let mut basis = DenseRect::identity(n).data().to_vec();
    jacobi_sweeps(&mut a, Some(&mut basis), n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[i * n + i]
            .partial_cmp(&a[j * n + j])
            .expect("eigenvalues are finite")
            .then(i.cmp(&j))
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[k * n + k]).collect();

    let mut columns = vec![0.0; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        // Sign convention: largest-magnitude component positive, ties to the
        // lowest index, so repeated runs and permuted inputs stay comparable.
        let mut pivot = 0;
        let mut pivot_abs = -1.0;
        for r in 0..n {
            let x = basis[r * n + old_col].abs();
            if x > pivot_abs {
                pivot_abs = x;
                pivot = r;
            }
        }
        let flip = if basis[pivot * n + old_col] < 0.0 {
            -1.0
        } else {
            1.0
        };
        for r in 0..n {
            columns[r * n + new_col] = flip * basis[r * n + old_col];
        }
    }

    let decomposition = SpectralDecomposition {
        eigenvalues,
        basis: DenseRect::new(n, n, columns)?,
    };
    verify_decomposition(m, &decomposition)?;
    Ok(decomposition)
}

/// Eigenvalues only (ascending), skipping eigenvector accumulation.  Runs
/// the identical rotation sequence as the full decomposition, so both paths
/// agree bit-for-bit on the eigenvalues.
pub fn symmetric_eigenvalues(m: &DenseSymmetric) -> Result<Vec<f64>> {
    let n = m.dim();
    let mut a = m.data().to_vec();
    jacobi_sweeps(&mut a, None, n)?;
    let mut eigenvalues: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eigenvalues.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    Ok(eigenvalues)
}

fn off_diagonal_mass(a: &[f64], n: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let x = a[i * n + j];
            sum += x * x;
        }
    }
    (2.0 * sum).sqrt()
}

fn jacobi_sweeps(a: &mut [f64], mut basis: Option<&mut [f64]>, n: usize) -> Result<()> {
    let frobenius: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = CONVERGENCE_FACTOR * frobenius;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_mass(a, n) <= threshold {
            return Ok(());
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate(a, basis.as_deref_mut(), n, p, q);
            }
        }
    }
    let residual = off_diagonal_mass(a, n);
    if residual <= threshold {
        return Ok(());
    }
    Err(Error::NoConvergence {
        sweeps: MAX_SWEEPS,
        residual,
        threshold,
    })
}

/// One Jacobi rotation annihilating `a[p][q]`, updating the symmetric matrix
/// in place and, when present, accumulating the rotation into the basis.
fn rotate(a: &mut [f64], basis: Option<&mut [f64]>, n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
    // The smaller-magnitude root of t² + 2θt − 1 = 0 keeps the rotation
    // angle at most π/4; the asymptotic branch avoids overflowing θ².
    let t = if theta.abs() > 1e100 {
        0.5 / theta
    } else if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        1.0 / (theta - (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let tau = s / (1.0 + c);

    a[p * n + p] -= t * apq;
    a[q * n + q] += t * apq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;

    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let arp = a[r * n + p];
        let arq = a[r * n + q];
        let new_rp = arp - s * (arq + tau * arp);
        let new_rq = arq + s * (arp - tau * arq);
        a[r * n + p] = new_rp;
        a[p * n + r] = new_rp;
        a[r * n + q] = new_rq;
        a[q * n + r] = new_rq;
    }

    if let Some(v) = basis {
        for r in 0..n {
            let vrp = v[r * n + p];
            let vrq = v[r * n + q];
            v[r * n + p] = c * vrp - s * vrq;
            v[r * n + q] = s * vrp + c * vrq;
        }
    }
}

fn verify_decomposition(m: &DenseSymmetric, d: &SpectralDecomposition) -> Result<()> {
    let n = d.dim();
    let q = d.basis();
    let mut gram_defect = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let mut dot = 0.0;
            for r in 0..n {
                dot += q.get(r, i) * q.get(r, j);
            }
            let target = if i == j { 1.0 } else { 0.0 };
            gram_defect = gram_defect.max((dot - target).abs());
        }
    }
    if gram_defect > ORTHONORMALITY_TOLERANCE {
        return Err(Error::internal(format!(
            "eigenbasis lost orthonormality: defect {gram_defect:.3e}"
        )));
    }

    let reconstruction = d.reconstruct();
    let tolerance = RECONSTRUCTION_FACTOR * d.spectral_norm().max(1.0);
    let mut defect = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            defect = defect.max((reconstruction.get(i, j) - m.get(i, j)).abs());
        }
    }
    if defect > tolerance {
        return Err(Error::internal(format!(
            "eigendecomposition reconstruction defect {defect:.3e} exceeds {tolerance:.3e}"
        )));
    }
    Ok(())
}
