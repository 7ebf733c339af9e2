//! The bound formulas and everything that feeds them: the half-angle map
//! `x ↦ sin(½ arctan x)`, the fixed-gap and relative bounds, the two-case
//! bound for semibounded gaps, the shift scan/optimizer for
//! `v_μ = ‖S_μ^{-1/2} V S_μ^{-1/2}‖`, per-cluster condition-number
//! diagnostics, and the positivity criterion `v₀ < 1 ⟺ |A| + V > 0`.

use crate::error::{Error, Result};
use crate::linalg::{matrix_abs, symmetric_eigenvalues};
use crate::model::{
    base_relative_bound, AssembledPair, CaseTag, GapGeometry, RelativeBoundEvaluator,
};
use crate::KAPPA_TOLERANCE;

/// Grid resolution for the first pass of the shift scan.
pub const DEFAULT_GRID_POINTS: usize = 65;

/// The golden-section refinement stops once the bracket is this fraction of
/// the gap width.
pub const REFINE_WIDTH_FACTOR: f64 = 1e-8;

/// Hard cap on golden-section iterations (the bracket shrinks by ≈0.618 per
/// step, so this is far more than the width target ever needs).
pub const MAX_REFINE_ITERATIONS: usize = 200;

/// `|v₀ − 1|` band inside which the positivity criterion is reported as
/// inconclusive instead of being compared against the matrix computation.
pub const BS_INCONCLUSIVE_BAND: f64 = 1e-6;

/// Every bound of half-angle type is strictly below `√2/2`.
pub const UNIVERSAL_UPPER_LIMIT: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// `sin(½ arctan x)` for `x ≥ 0`: the common outer shape of all the bounds.
/// Strictly increasing, zero at zero, approaching `√2/2` from below.
pub fn sin_half_arctan(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::NegativeBound { v: x });
    }
    Ok((0.5 * x.atan()).sin())
}

/// Fixed-gap bound `sin(½ arctan(2‖V‖/d))` where `d` is the gap width.
/// Valid in every geometry: translating the whole spectrum does not change
/// the subspaces or the gap width.
pub fn classical_tan2theta(norm_v: f64, gap_width: f64) -> Result<f64> {
    if !gap_width.is_finite() || gap_width <= 0.0 {
        return Err(Error::NonPositiveGapWidth { d: gap_width });
    }
    sin_half_arctan(2.0 * norm_v / gap_width)
}

/// Relative bound `sin(½ arctan v)` for a relative perturbation size `v`,
/// e.g. `v = v_μ` or its infimum over admissible shifts.
pub fn relative_tan2theta(v: f64) -> Result<f64> {
    sin_half_arctan(v)
}

/// The two-case bound for a semibounded gap, evaluated from the gap
/// geometry and the base relative bound `v = ‖|A|^{-1/2} V |A|^{-1/2}‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseBound {
    /// Relative gap length `δ` for the applicable case.
    pub delta: f64,
    /// The shift the bound is proved with, in the canonical frame.
    pub shift_canonical: f64,
    /// The same shift in the original frame (negated for mirrored spectra).
    pub shift_original: f64,
    /// Base relative bound the case bound was evaluated at.
    pub v_base: f64,
    /// `sin(½ arctan(2v/δ))`.
    pub bound: f64,
    /// Direct bound `v/δ` on the largest angle's sine; only meaningful for
    /// sign-definite spectra (the gap does not contain zero).
    pub sin_theta_bound: Option<f64>,
}

/// Evaluates the two-case bound `sin(½ arctan(2v/δ))`.
///
/// Returns `Ok(None)` when the geometry does not satisfy the case
/// assumptions: a plain central gap (neither case applies), or a nominally
/// sign-definite gap whose far cluster actually crosses zero.
pub fn semibounded_tan2theta(geom: &GapGeometry, v: f64) -> Result<Option<CaseBound>> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::NegativeBound { v });
    }
    if !geom.case_assumptions_hold() {
        return Ok(None);
    }
    let delta = geom
        .delta()
        .ok_or_else(|| Error::internal("case geometry without a relative gap length"))?;
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::NonPositiveDelta { delta });
    }
    let bound = sin_half_arctan(2.0 * v / delta)?;
    let sin_theta_bound = match geom.case_tag {
        CaseTag::CaseII | CaseTag::CaseIIMirrored => Some(v / delta),
        _ => None,
    };
    Ok(Some(CaseBound {
        delta,
        shift_canonical: geom.fixed_shift_canonical().unwrap_or(f64::NAN),
        shift_original: geom.fixed_shift_original().unwrap_or(f64::NAN),
        v_base: v,
        bound,
        sin_theta_bound,
    }))
}

// ---------------------------------------------------------------------------
// Shift scan and optimizer
// ---------------------------------------------------------------------------

/// One row of the shift scan.
#[derive(Debug, Clone, PartialEq)]
pub struct MuScanPoint {
    pub mu: f64,
    pub v_mu: f64,
    /// Sector angle `arctan v_μ` at this shift; the rotation bound is
    /// `sin(θ_μ/2)`.
    pub theta_mu: f64,
    /// Whether `S_μ` was safely positive definite (always true inside the
    /// guarded gap; recorded for schema stability).
    pub positive_definite: bool,
}

/// Result of minimizing `μ ↦ v_μ` over the guarded gap.
#[derive(Debug, Clone, PartialEq)]
pub struct MuOptimum {
    pub mu_star: f64,
    pub v_min: f64,
    /// Sector angle `arctan v_min` at the optimum.
    pub theta: f64,
    /// `sin(½ arctan v_min)`.
    pub bound: f64,
    /// Number of `v_μ` evaluations spent.
    pub evaluations: usize,
}

/// Evaluates `v_μ` on an inclusive uniform grid over the guarded gap.
pub fn scan_table(
    evaluator: &RelativeBoundEvaluator,
    geom: &GapGeometry,
    grid_points: usize,
    eps_factor: f64,
) -> Result<Vec<MuScanPoint>> {
    if grid_points < 3 {
        return Err(Error::InvalidArgument {
            reason: format!("shift grid needs at least 3 points, got {grid_points}"),
        });
    }
    let (lo, hi) = geom.guarded_interval();
    let step = (hi - lo) / (grid_points - 1) as f64;
    let mut rows = Vec::with_capacity(grid_points);
    for i in 0..grid_points {
        let mu = if i + 1 == grid_points {
            hi
        } else {
            lo + step * i as f64
        };
        let v_mu = evaluator.bound_at(mu, eps_factor)?;
        rows.push(MuScanPoint {
            mu,
            v_mu,
            theta_mu: v_mu.atan(),
            positive_definite: true,
        });
    }
    Ok(rows)
}

/// Minimizes `μ ↦ v_μ` over the guarded gap: a uniform grid pass picks the
/// best bracket, then golden-section search refines it to a width of
/// `REFINE_WIDTH_FACTOR` times the gap width.  Grid ties break toward the
/// grid center, then toward the lower index, so a flat profile (zero
/// coupling) lands exactly on the gap midpoint.  The best shift seen across
/// all evaluations is returned.
pub fn optimize_shift(
    evaluator: &RelativeBoundEvaluator,
    geom: &GapGeometry,
    grid_points: usize,
    eps_factor: f64,
) -> Result<MuOptimum> {
    let rows = scan_table(evaluator, geom, grid_points, eps_factor)?;
    let mut evaluations = rows.len();

    let center = (grid_points - 1) as f64 / 2.0;
    let mut best_index = 0usize;
    for i in 1..rows.len() {
        let better = rows[i].v_mu < rows[best_index].v_mu;
        let tied = rows[i].v_mu == rows[best_index].v_mu;
        let closer_to_center =
            ((i as f64) - center).abs() < ((best_index as f64) - center).abs();
        if better || (tied && closer_to_center) {
            best_index = i;
        }
    }

    let mut best_mu = rows[best_index].mu;
    let mut best_v = rows[best_index].v_mu;

    let mut a = rows[best_index.saturating_sub(1)].mu;
    let mut b = rows[(best_index + 1).min(rows.len() - 1)].mu;
    let width_target = REFINE_WIDTH_FACTOR * geom.gap_width();

    let track = |mu: f64, v: f64, best_mu: &mut f64, best_v: &mut f64| {
        if v < *best_v {
            *best_v = v;
            *best_mu = mu;
        }
    };

    if b - a > width_target {
        let phi = (5.0f64.sqrt() - 1.0) / 2.0;
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        let mut fc = evaluator.bound_at(c, eps_factor)?;
        let mut fd = evaluator.bound_at(d, eps_factor)?;
        evaluations += 2;
        track(c, fc, &mut best_mu, &mut best_v);
        track(d, fd, &mut best_mu, &mut best_v);
        let mut iterations = 0usize;
        while b - a > width_target && iterations < MAX_REFINE_ITERATIONS {
            if fc <= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = evaluator.bound_at(c, eps_factor)?;
                track(c, fc, &mut best_mu, &mut best_v);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = evaluator.bound_at(d, eps_factor)?;
                track(d, fd, &mut best_mu, &mut best_v);
            }
            evaluations += 1;
            iterations += 1;
        }
    }

    Ok(MuOptimum {
        mu_star: best_mu,
        v_min: best_v,
        theta: best_v.atan(),
        bound: sin_half_arctan(best_v)?,
        evaluations,
    })
}

// ---------------------------------------------------------------------------
// Per-cluster condition-number diagnostics
// ---------------------------------------------------------------------------

/// Condition-number factors of the similarity transform behind the two-case
/// bound, at a fixed shift `μ` in the canonical frame.
///
/// `kappa_plus = max_{λ ∈ Σ₊} √(λ/(λ−μ))` and its closed-form majorant
/// `√(d₊/(d₊−μ))`; likewise for the lower cluster.  For spectra read off a
/// finite matrix and `μ > 0` the majorants are attained exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ProofDiagnostics {
    pub mu: f64,
    pub kappa_plus: f64,
    pub kappa_plus_limit: f64,
    pub kappa_minus: f64,
    pub kappa_minus_limit: f64,
    pub equality_plus: bool,
    pub equality_minus: bool,
}

/// Evaluates the condition-number diagnostics on the canonical cluster
/// spectra (`sigma_minus`, `sigma_plus` as the reflected spectra for a
/// mirrored instance).
///
/// Domain: for a gap containing zero the factors are only controlled for
/// `0 ≤ μ < d₊`; for a sign-definite gap, for `d₋ < μ < d₊`.  Shifts
/// outside these ranges are rejected — the closed forms genuinely fail
/// there (e.g. a negative shift makes `λ/(λ−μ)` increase with `λ`, so the
/// cluster edge no longer dominates).
pub fn proof_diagnostics(
    geom: &GapGeometry,
    sigma_minus: &[f64],
    sigma_plus: &[f64],
    mu: f64,
) -> Result<ProofDiagnostics> {
    if sigma_minus.is_empty() || sigma_plus.is_empty() {
        return Err(Error::Empty);
    }
    match geom.case_tag {
        CaseTag::Central => {
            return Err(Error::DiagnosticsDomain {
                mu,
                reason: "condition-number diagnostics require one of the two case geometries",
            })
        }
        CaseTag::CaseI => {
            if !(mu >= 0.0 && mu < geom.d_plus) {
                return Err(Error::DiagnosticsDomain {
                    mu,
                    reason: "gap containing zero: shift must satisfy 0 <= mu < d_plus",
                });
            }
        }
        CaseTag::CaseII | CaseTag::CaseIIMirrored => {
            if !(mu > geom.d_minus && mu < geom.d_plus) {
                return Err(Error::DiagnosticsDomain {
                    mu,
                    reason: "sign-definite gap: shift must satisfy d_minus < mu < d_plus",
                });
            }
        }
    }

    let mut kappa_plus: f64 = 0.0;
    for &lambda in sigma_plus {
        let denom = lambda - mu;
        if denom <= 0.0 {
            return Err(Error::DiagnosticsDomain {
                mu,
                reason: "upper cluster eigenvalue at or below the shift",
            });
        }
        kappa_plus = kappa_plus.max((lambda / denom).sqrt());
    }
    let mut kappa_minus: f64 = 0.0;
    for &lambda in sigma_minus {
        let denom = mu - lambda;
        if denom <= 0.0 {
            return Err(Error::DiagnosticsDomain {
                mu,
                reason: "lower cluster eigenvalue at or above the shift",
            });
        }
        kappa_minus = kappa_minus.max((lambda.abs() / denom).sqrt());
    }

    let kappa_plus_limit = (geom.d_plus / (geom.d_plus - mu)).sqrt();
    let kappa_minus_limit = match geom.case_tag {
        CaseTag::CaseI => (geom.d_minus / (geom.d_minus + mu)).sqrt(),
        _ => (geom.d_minus / (mu - geom.d_minus)).sqrt(),
    };

    let equality_plus =
        (kappa_plus - kappa_plus_limit).abs() <= KAPPA_TOLERANCE * kappa_plus_limit.max(1.0);
    let equality_minus =
        (kappa_minus - kappa_minus_limit).abs() <= KAPPA_TOLERANCE * kappa_minus_limit.max(1.0);

    Ok(ProofDiagnostics {
        mu,
        kappa_plus,
        kappa_plus_limit,
        kappa_minus,
        kappa_minus_limit,
        equality_plus,
        equality_minus,
    })
}

// ---------------------------------------------------------------------------
// Positivity criterion
// ---------------------------------------------------------------------------

/// Outcome of the positivity criterion `v₀ < 1 ⟺ |A| + V` positive
/// definite, which is exact because the transformed perturbation
/// anticommutes with `J` and therefore has a sign-symmetric spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityCriterion {
    /// `v₀ = ‖|A|^{-1/2} V |A|^{-1/2}‖`.
    pub v0: f64,
    /// `Some(v₀ < 1)`, or `None` when `v₀` is too close to 1 to call.
    pub predicted_positive: Option<bool>,
    /// Smallest eigenvalue of `|A| + V`.
    pub min_eig: f64,
    /// Whether `|A| + V` is positive definite.
    pub observed_positive: bool,
    /// Prediction vs observation, when the prediction is conclusive.
    pub agrees: Option<bool>,
}

/// Evaluates the positivity criterion.  Only meaningful when the gap
/// contains zero, so `S₀ = JA = |A|`; sign-definite geometries are
/// rejected.
pub fn positivity_criterion(
    pair: &AssembledPair,
    geom: &GapGeometry,
    eps_factor: f64,
) -> Result<PositivityCriterion> {
    if !geom.is_central_type() {
        return Err(Error::NotCentral {
            tag: geom.case_tag.as_str(),
        });
    }
    let v0 = base_relative_bound(pair, eps_factor)?;
    let shifted = matrix_abs(pair.decomp_a())?.add(pair.v())?;
    let eigenvalues = symmetric_eigenvalues(&shifted)?;
    let min_eig = eigenvalues[0];
    let scale = eigenvalues.iter().fold(0.0f64, |acc, &l| acc.max(l.abs()));
    let observed_positive = min_eig > eps_factor * scale.max(1.0);
    let predicted_positive = if (v0 - 1.0).abs() <= BS_INCONCLUSIVE_BAND {
        None
    } else {
        Some(v0 < 1.0)
    };
    let agrees = predicted_positive.map(|p| p == observed_positive);
    Ok(PositivityCriterion {
        v0,
        predicted_positive,
        min_eig,
        observed_positive,
        agrees,
    })
}
