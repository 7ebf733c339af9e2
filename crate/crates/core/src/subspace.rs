//! Exact subspace geometry for the perturbed pair: spectral projections of
//! `A` and `B` on either side of a cut, the operator distance `‖P − Q‖` and
//! the principal-angle sines behind it, the sign-function identity
//! `P − Q = ½(sign(A − m) − sign(B − m))`, sectoriality of `J·sign(B − μ)`,
//! constancy of `sign(B − μ)` across the gap, and persistence of the gap in
//! the perturbed spectrum.

use crate::error::{Error, Result};
use crate::linalg::{
    matrix_sign, operator_norm, spectral_projection, symmetric_eigenvalues, DenseSymmetric,
    OrthogonalProjection, SpectralDecomposition,
};
use crate::{NORM_STRICTNESS_MARGIN, SECTORIAL_TOLERANCE};

/// Which side of the cut the reported subspaces live on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralSide {
    Above,
    Below,
}

impl SpectralSide {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectralSide::Above => "above",
            SpectralSide::Below => "below",
        }
    }
}

fn shifted(decomp: &SpectralDecomposition, mu: f64) -> SpectralDecomposition {
    let eigenvalues = decomp.eigenvalues().iter().map(|&l| l - mu).collect();
    SpectralDecomposition::from_parts(eigenvalues, decomp.basis().clone())
}

fn side_projection(
    decomp: &SpectralDecomposition,
    cut: f64,
    side: SpectralSide,
    eps_factor: f64,
) -> Result<OrthogonalProjection> {
    match side {
        SpectralSide::Above => spectral_projection(decomp, cut, f64::INFINITY, eps_factor),
        SpectralSide::Below => spectral_projection(decomp, f64::NEG_INFINITY, cut, eps_factor),
    }
}

/// Spectral projections of the unperturbed and perturbed operators on the
/// same side of the same cut.  Fails when the cut passes through either
/// spectrum's safety band.
pub fn spectral_pair(
    decomp_a: &SpectralDecomposition,
    decomp_b: &SpectralDecomposition,
    cut: f64,
    side: SpectralSide,
    eps_factor: f64,
) -> Result<(OrthogonalProjection, OrthogonalProjection)> {
    if decomp_a.dim() != decomp_b.dim() {
        return Err(Error::DimensionMismatch {
            context: "unperturbed vs perturbed decomposition",
            left: decomp_a.dim(),
            right: decomp_b.dim(),
        });
    }
    let p = side_projection(decomp_a, cut, side, eps_factor)?;
    let q = side_projection(decomp_b, cut, side, eps_factor)?;
    Ok((p, q))
}

/// The measured rotation between the two subspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleReport {
    pub cut: f64,
    pub side: SpectralSide,
    pub rank_p: usize,
    pub rank_q: usize,
    /// `‖P − Q‖`.
    pub distance: f64,
    /// Principal angles between the two ranges, ascending, in `[0, π/2]`;
    /// `min(rank_p, rank_q)` entries.
    pub angles: Vec<f64>,
    /// Largest principal angle (0 when either range is trivial).
    pub max_angle: f64,
    /// `‖P − Q‖ < √2/2` with a strict safety margin.
    pub strictly_below_limit: bool,
}

/// Computes `‖P − Q‖` and the principal angles between the ranges of two
/// orthogonal projections.  The angles are `arccos` of the singular values
/// of the cross-Gram matrix between the two orthonormal range bases; for
/// equal ranks the largest one satisfies `‖P − Q‖ = sin(max_angle)`.
pub fn projection_distance_and_angles(
    p: &OrthogonalProjection,
    q: &OrthogonalProjection,
    cut: f64,
    side: SpectralSide,
) -> Result<AngleReport> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            context: "projection dimensions",
            left: p.dim(),
            right: q.dim(),
        });
    }
    let distance = operator_norm(&p.matrix().sub(q.matrix())?)?;

    let count = p.rank().min(q.rank());
    let mut angles = Vec::with_capacity(count);
    if count > 0 {
        let cross = p.basis().transpose().matmul(q.basis())?;
        // Singular values from the smaller Gram side.
        let gram = if cross.rows() <= cross.cols() {
            cross.matmul(&cross.transpose())?
        } else {
            cross.transpose().matmul(&cross)?
        };
        let gram_eigenvalues = symmetric_eigenvalues(&DenseSymmetric::from_rect(&gram)?)?;
        for &l in gram_eigenvalues.iter().rev().take(count) {
            let sigma = l.max(0.0).sqrt().min(1.0);
            angles.push(sigma.acos());
        }
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }

    Ok(AngleReport {
        cut,
        side,
        rank_p: p.rank(),
        rank_q: q.rank(),
        distance,
        max_angle: angles.last().copied().unwrap_or(0.0),
        angles,
        strictly_below_limit: distance
            < std::f64::consts::FRAC_1_SQRT_2 - NORM_STRICTNESS_MARGIN,
    })
}

/// Comparison of the projection difference against the sign functions:
/// `P − Q = ½(sign(A − m) − sign(B − m))` exactly, both entrywise and in
/// norm.
#[derive(Debug, Clone, PartialEq)]
pub struct SignIdentity {
    pub cut: f64,
    /// `‖P − Q‖` with both projections taken above the cut.
    pub distance: f64,
    /// `½‖sign(A − m) − sign(B − m)‖`.
    pub half_sign_difference_norm: f64,
    /// `|distance − half_sign_difference_norm|`.
    pub norm_residual: f64,
    /// `max |(P − Q) − ½(sign(A − m) − sign(B − m))|` entrywise.
    pub entry_residual: f64,
}

/// Verifies the sign-function identity at the given cut.
pub fn sign_difference_check(
    decomp_a: &SpectralDecomposition,
    decomp_b: &SpectralDecomposition,
    cut: f64,
    eps_factor: f64,
) -> Result<SignIdentity> {
    let (p, q) = spectral_pair(decomp_a, decomp_b, cut, SpectralSide::Above, eps_factor)?;
    let diff = p.matrix().sub(q.matrix())?;
    let distance = operator_norm(&diff)?;

    let sign_a = matrix_sign(&shifted(decomp_a, cut), eps_factor)?;
    let sign_b = matrix_sign(&shifted(decomp_b, cut), eps_factor)?;
    let half_sign_diff = sign_a.sub(&sign_b)?.scale(0.5);
    let half_sign_difference_norm = operator_norm(&half_sign_diff)?;

    let entry_residual = diff.sub(&half_sign_diff)?.max_abs();

    Ok(SignIdentity {
        cut,
        distance,
        half_sign_difference_norm,
        norm_residual: (distance - half_sign_difference_norm).abs(),
        entry_residual,
    })
}

/// Sectoriality of `U_μ = J·sign(B − μ)`: the symmetric part of the
/// orthogonal matrix `U_μ` must stay above `cos(arctan v_μ)`, i.e. the
/// rotation from `J` to `sign(B − μ)` is confined to the angle the relative
/// bound predicts.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorialityCheck {
    pub mu: f64,
    pub v_mu: f64,
    /// `cos(arctan v_μ)`.
    pub cos_bound: f64,
    /// Smallest eigenvalue of `(U + Uᵀ)/2`.
    pub min_symmetric_part: f64,
    /// `min_symmetric_part − cos_bound`; the check passes when this is not
    /// meaningfully negative.
    pub margin: f64,
    /// `max |UᵀU − I|`; `U` must be orthogonal.
    pub orthogonality_defect: f64,
    pub holds: bool,
}

pub fn sectoriality_check(
    j: &DenseSymmetric,
    decomp_b: &SpectralDecomposition,
    mu: f64,
    v_mu: f64,
    eps_factor: f64,
) -> Result<SectorialityCheck> {
    if j.dim() != decomp_b.dim() {
        return Err(Error::DimensionMismatch {
            context: "involution vs perturbed decomposition",
            left: j.dim(),
            right: decomp_b.dim(),
        });
    }
    if !v_mu.is_finite() || v_mu < 0.0 {
        return Err(Error::NegativeBound { v: v_mu });
    }
    let sign_b = matrix_sign(&shifted(decomp_b, mu), eps_factor)?;
    let u = j.to_rect().matmul(&sign_b.to_rect())?;

    let n = u.rows();
    let utu = u.transpose().matmul(&u)?;
    let mut orthogonality_defect = 0.0f64;
    for i in 0..n {
        for k in 0..n {
            let target = if i == k { 1.0 } else { 0.0 };
            orthogonality_defect = orthogonality_defect.max((utu.get(i, k) - target).abs());
        }
    }

    let symmetric_part = DenseSymmetric::from_rect(&u.add(&u.transpose())?.scale(0.5))?;
    let min_symmetric_part = symmetric_eigenvalues(&symmetric_part)?[0];
    let cos_bound = v_mu.atan().cos();
    let margin = min_symmetric_part - cos_bound;

    Ok(SectorialityCheck {
        mu,
        v_mu,
        cos_bound,
        min_symmetric_part,
        margin,
        orthogonality_defect,
        holds: margin >= -SECTORIAL_TOLERANCE && orthogonality_defect <= 1e-10,
    })
}

/// Result of sampling `sign(B − μ)` across the (guarded) unperturbed gap.
#[derive(Debug, Clone, PartialEq)]
pub struct SignScan {
    /// Shifts that were sampled.
    pub sample_shifts: Vec<f64>,
    /// The interval that was scanned.
    pub interval: (f64, f64),
    /// Largest entrywise deviation of any sampled sign matrix from the
    /// first; exactly zero when the sign function is constant on the
    /// interval.
    pub max_deviation: f64,
    /// A perturbed eigenvalue hit within the safety band of a sample shift,
    /// if any.  This marks a broken gap rather than aborting the scan.
    pub intruder: Option<f64>,
}

/// Samples `sign(B − μ)` at uniformly spaced shifts across `[lo, hi]`
/// (typically the guarded gap of the unperturbed operator) and measures how
/// much the matrices differ.  When no eigenvalue of `B` enters the interval
/// every sample must be identical down to the last bit; a sample landing on
/// an eigenvalue is reported through [`SignScan::intruder`] instead of an
/// error.
pub fn sign_constancy_scan(
    decomp_b: &SpectralDecomposition,
    lo: f64,
    hi: f64,
    samples: usize,
    eps_factor: f64,
) -> Result<SignScan> {
    if samples < 2 {
        return Err(Error::InvalidArgument {
            reason: format!("sign scan needs at least 2 samples, got {samples}"),
        });
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::BadCutInterval { lo, hi });
    }

    let step = (hi - lo) / (samples - 1) as f64;
    let mut sample_shifts = Vec::with_capacity(samples);
    let mut reference: Option<DenseSymmetric> = None;
    let mut max_deviation = 0.0f64;
    let mut intruder = None;
    for i in 0..samples {
        let mu = if i + 1 == samples { hi } else { lo + step * i as f64 };
        sample_shifts.push(mu);
        match matrix_sign(&shifted(decomp_b, mu), eps_factor) {
            Ok(sign) => match &reference {
                None => reference = Some(sign),
                Some(first) => {
                    max_deviation = max_deviation.max(first.sub(&sign)?.max_abs());
                }
            },
            Err(Error::NearSingular { eigenvalue, .. }) => {
                if intruder.is_none() {
                    intruder = Some(eigenvalue + mu);
                }
            }
            Err(other) => return Err(other),
        }
    }

    Ok(SignScan {
        sample_shifts,
        interval: (lo, hi),
        max_deviation,
        intruder,
    })
}

/// True when no eigenvalue lands strictly inside `(lo + band, hi − band)`.
pub fn spectrum_clears_interval(eigenvalues: &[f64], lo: f64, hi: f64, band: f64) -> bool {
    first_violation(eigenvalues, lo, hi, band).is_none()
}

fn first_violation(eigenvalues: &[f64], lo: f64, hi: f64, band: f64) -> Option<f64> {
    eigenvalues
        .iter()
        .copied()
        .find(|&l| l > lo + band && l < hi - band)
}

/// Whether the spectral gap `(lo, hi)` of the unperturbed operator stays
/// free of perturbed eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct GapPersistence {
    pub lo: f64,
    pub hi: f64,
    pub band: f64,
    pub holds: bool,
    /// A perturbed eigenvalue found inside the gap, if any.
    pub violating: Option<f64>,
}

/// Checks that the perturbed spectrum clears the unperturbed gap up to the
/// safety band.  For an off-diagonal perturbation this holds for any
/// coupling strength.
pub fn gap_persistence_check(
    decomp_b: &SpectralDecomposition,
    lo: f64,
    hi: f64,
    eps_factor: f64,
) -> GapPersistence {
    let band = decomp_b.eps_band(eps_factor);
    let violating = first_violation(decomp_b.eigenvalues(), lo, hi, band);
    GapPersistence {
        lo,
        hi,
        band,
        holds: violating.is_none(),
        violating,
    }
}
