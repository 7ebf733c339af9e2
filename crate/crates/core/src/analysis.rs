//! End-to-end analysis of one operator pair: detect and classify the gap,
//! evaluate every applicable bound, measure the true subspace rotation, and
//! run the structural checks (sign identity, sectoriality, sign constancy,
//! gap persistence, positivity criterion, condition-number diagnostics).

use std::collections::BTreeMap;

use crate::bounds::{
    classical_tan2theta, optimize_shift, positivity_criterion, proof_diagnostics,
    semibounded_tan2theta, CaseBound, MuOptimum, PositivityCriterion, ProofDiagnostics,
    DEFAULT_GRID_POINTS,
};
use crate::error::{Error, Result};
use crate::linalg::{operator_norm, symmetric_eigendecomposition};
use crate::model::{
    assemble, detect_gap, AssembledPair, BlockOperatorSpec, CaseTag, GapGeometry,
    RelativeBoundEvaluator,
};
use crate::subspace::{
    gap_persistence_check, projection_distance_and_angles, sectoriality_check,
    sign_constancy_scan, sign_difference_check, spectral_pair, AngleReport, GapPersistence,
    SectorialityCheck, SignIdentity, SignScan, SpectralSide,
};
use crate::{EPS_SPEC_FACTOR, SIGN_CONSTANCY_TOLERANCE, SIGN_IDENTITY_TOLERANCE, SLACK_TOLERANCE};

/// Default number of shifts sampled by the sign-constancy scan.
pub const DEFAULT_CONSTANCY_SAMPLES: usize = 9;

/// Tunable knobs of the analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    /// Scale factor of the spectral safety band.
    pub eps_factor: f64,
    /// Grid resolution of the shift optimizer's first pass.
    pub grid_points: usize,
    /// Number of shifts sampled by the sign-constancy scan.
    pub constancy_samples: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            eps_factor: EPS_SPEC_FACTOR,
            grid_points: DEFAULT_GRID_POINTS,
            constancy_samples: DEFAULT_CONSTANCY_SAMPLES,
        }
    }
}

impl AnalysisOptions {
    pub fn validate(&self) -> Result<()> {
        if !self.eps_factor.is_finite() || self.eps_factor <= 0.0 {
            return Err(Error::InvalidArgument {
                reason: format!("safety band factor must be positive, got {}", self.eps_factor),
            });
        }
        if self.grid_points < 3 {
            return Err(Error::InvalidArgument {
                reason: format!("shift grid needs at least 3 points, got {}", self.grid_points),
            });
        }
        if self.constancy_samples < 2 {
            return Err(Error::InvalidArgument {
                reason: format!(
                    "sign scan needs at least 2 samples, got {}",
                    self.constancy_samples
                ),
            });
        }
        Ok(())
    }
}

/// Every bound evaluated for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSet {
    /// `‖V‖`.
    pub norm_v: f64,
    /// Fixed-gap bound `sin(½ arctan(2‖V‖/d))`.
    pub classical: f64,
    /// Base relative bound `‖|A|^{-1/2} V |A|^{-1/2}‖`.
    pub base_v: f64,
    /// Minimizer data of `μ ↦ v_μ` over the guarded gap.
    pub optimum: MuOptimum,
    /// Shift-optimized relative bound `sin(½ arctan v_min)`.
    pub central: f64,
    /// `v_μ` at the fixed shift of the applicable case, when defined.
    pub v_at_fixed_shift: Option<f64>,
    /// The two-case bound, when the geometry supports it.
    pub case: Option<CaseBound>,
}

/// The cut and side the reported subspaces are taken from: the positive
/// part at zero when the gap contains zero, otherwise everything below the
/// gap midpoint.
pub fn projection_cut(geom: &GapGeometry) -> (f64, SpectralSide) {
    match geom.case_tag {
        CaseTag::Central | CaseTag::CaseI => (0.0, SpectralSide::Above),
        CaseTag::CaseII | CaseTag::CaseIIMirrored => {
            (0.5 * (geom.alpha + geom.beta), SpectralSide::Below)
        }
    }
}

/// Complete analysis of one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceAnalysis {
    pub label: String,
    pub n: usize,
    pub geometry: GapGeometry,
    pub bounds: BoundSet,
    pub angles: AngleReport,
    pub sign_identity: SignIdentity,
    /// Sectoriality of `J·sign(B − μ)` at the optimal shift.
    pub sectoriality: SectorialityCheck,
    /// The same check at the fixed case shift, when one exists.
    pub sectoriality_at_fixed: Option<SectorialityCheck>,
    pub sign_scan: SignScan,
    pub gap_persistence: GapPersistence,
    /// Positivity criterion; only defined when the gap contains zero.
    pub positivity: Option<PositivityCriterion>,
    /// Condition-number diagnostics at the fixed case shift.
    pub diagnostics: Option<ProofDiagnostics>,
    /// `bound − ‖P−Q‖` per bound name; non-negative when the bound holds.
    pub slack: BTreeMap<&'static str, f64>,
}

impl InstanceAnalysis {
    /// Worst sectoriality margin across the checked shifts.
    pub fn sectorial_margin(&self) -> f64 {
        match &self.sectoriality_at_fixed {
            Some(fixed) => self.sectoriality.margin.min(fixed.margin),
            None => self.sectoriality.margin,
        }
    }

    /// Lists every violated invariant; an empty list means the instance is
    /// fully consistent with the theory.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        for (name, &slack) in &self.slack {
            if !(slack >= -SLACK_TOLERANCE) {
                violations.push(format!("bound \"{name}\" violated: slack {slack:.3e}"));
            }
        }
        if !(self.angles.distance < std::f64::consts::FRAC_1_SQRT_2 + 1e-12) {
            violations.push(format!(
                "subspace distance {:.17} is not below the universal limit",
                self.angles.distance
            ));
        }
        if self.sign_identity.norm_residual > SIGN_IDENTITY_TOLERANCE {
            violations.push(format!(
                "sign identity norm residual {:.3e} exceeds tolerance",
                self.sign_identity.norm_residual
            ));
        }
        if self.sign_identity.entry_residual > SIGN_IDENTITY_TOLERANCE {
            violations.push(format!(
                "sign identity entry residual {:.3e} exceeds tolerance",
                self.sign_identity.entry_residual
            ));
        }
        if !self.sectoriality.holds {
            violations.push(format!(
                "sectoriality fails at the optimal shift: margin {:.3e}",
                self.sectoriality.margin
            ));
        }
        if let Some(fixed) = &self.sectoriality_at_fixed {
            if !fixed.holds {
                violations.push(format!(
                    "sectoriality fails at the fixed shift: margin {:.3e}",
                    fixed.margin
                ));
            }
        }
        if self.sign_scan.max_deviation > SIGN_CONSTANCY_TOLERANCE {
            violations.push(format!(
                "sign function varies across the gap: deviation {:.3e}",
                self.sign_scan.max_deviation
            ));
        }
        if let Some(intruder) = self.sign_scan.intruder {
            violations.push(format!(
                "perturbed eigenvalue {intruder:.17} hit by a sign-scan sample"
            ));
        }
        if self.gap_persistence.holds && self.angles.rank_p != self.angles.rank_q {
            violations.push(format!(
                "subspace ranks differ ({} vs {}) although the gap persists",
                self.angles.rank_p, self.angles.rank_q
            ));
        }
        if self.angles.rank_p == self.angles.rank_q && !self.angles.angles.is_empty() {
            let consistency = (self.angles.distance - self.angles.max_angle.sin()).abs();
            if consistency > 1e-9 {
                violations.push(format!(
                    "‖P−Q‖ and the largest principal angle disagree by {consistency:.3e}"
                ));
            }
        }
        if !self.gap_persistence.holds {
            violations.push(format!(
                "perturbed eigenvalue {:?} intrudes into the gap",
                self.gap_persistence.violating
            ));
        }
        if let Some(p) = &self.positivity {
            if p.agrees == Some(false) {
                violations.push(format!(
                    "positivity criterion disagrees: v0 = {:.17}, min eigenvalue {:.17}",
                    p.v0, p.min_eig
                ));
            }
        }
        if let Some(d) = &self.diagnostics {
            if !d.equality_plus || !d.equality_minus {
                violations.push(format!(
                    "condition-number factors miss their closed forms: {:.17} vs {:.17}, {:.17} vs {:.17}",
                    d.kappa_plus, d.kappa_plus_limit, d.kappa_minus, d.kappa_minus_limit
                ));
            }
        }
        if !(self.bounds.central <= self.bounds.classical + 1e-12) {
            violations.push(format!(
                "shift-optimized bound {:.17} exceeds the fixed-gap bound {:.17}",
                self.bounds.central, self.bounds.classical
            ));
        }
        if let Some(v_fixed) = self.bounds.v_at_fixed_shift {
            if !(self.bounds.optimum.v_min <= v_fixed + 1e-9) {
                violations.push(format!(
                    "optimized v {:.17} exceeds the fixed-shift value {:.17}",
                    self.bounds.optimum.v_min, v_fixed
                ));
            }
        }
        violations
    }
}

/// Runs the full analysis on an assembled pair.
pub fn analyze_pair(
    pair: &AssembledPair,
    hint: Option<(f64, f64)>,
    options: &AnalysisOptions,
) -> Result<InstanceAnalysis> {
    options.validate()?;
    let eps = options.eps_factor;

    let geometry = detect_gap(pair.decomp_a(), pair.j(), hint, eps)?;
    let decomp_b = symmetric_eigendecomposition(pair.b())?;
    let (cut, side) = projection_cut(&geometry);

    // Bounds.
    let norm_v = operator_norm(pair.v())?;
    let classical = classical_tan2theta(norm_v, geometry.gap_width())?;
    let evaluator = RelativeBoundEvaluator::new(pair)?;
    let optimum = optimize_shift(&evaluator, &geometry, options.grid_points, eps)?;
    let base_v = crate::model::base_relative_bound(pair, eps)?;
    let case = semibounded_tan2theta(&geometry, base_v)?;
    let fixed_shift = geometry.fixed_shift_original().filter(|&mu| geometry.contains_guarded(mu));
    let v_at_fixed_shift = match fixed_shift {
        Some(mu) => Some(evaluator.bound_at(mu, eps)?),
        None => None,
    };
    let bounds = BoundSet {
        norm_v,
        classical,
        base_v,
        central: optimum.bound,
        optimum,
        v_at_fixed_shift,
        case,
    };

    // Measured rotation.
    let (p, q) = spectral_pair(pair.decomp_a(), &decomp_b, cut, side, eps)?;
    let angles = projection_distance_and_angles(&p, &q, cut, side)?;

    // Structural checks.
    let sign_identity = sign_difference_check(pair.decomp_a(), &decomp_b, cut, eps)?;
    let sectoriality = sectoriality_check(
        pair.j(),
        &decomp_b,
        bounds.optimum.mu_star,
        bounds.optimum.v_min,
        eps,
    )?;
    let sectoriality_at_fixed = match (fixed_shift, bounds.v_at_fixed_shift) {
        (Some(mu), Some(v_mu)) => Some(sectoriality_check(pair.j(), &decomp_b, mu, v_mu, eps)?),
        _ => None,
    };
    let (scan_lo, scan_hi) = geometry.guarded_interval();
    let sign_scan =
        sign_constancy_scan(&decomp_b, scan_lo, scan_hi, options.constancy_samples, eps)?;
    let gap_persistence = gap_persistence_check(&decomp_b, geometry.alpha, geometry.beta, eps);

    let positivity = if geometry.is_central_type() {
        Some(positivity_criterion(pair, &geometry, eps)?)
    } else {
        None
    };

    let diagnostics = if geometry.case_tag != CaseTag::Central && geometry.case_assumptions_hold()
    {
        let (minus, plus) = pair.split_spectrum()?;
        let (minus_canonical, plus_canonical) = if geometry.case_tag == CaseTag::CaseIIMirrored {
            let reflect = |cluster: &[f64]| {
                let mut out: Vec<f64> = cluster.iter().map(|&l| -l).collect();
                out.reverse();
                out
            };
            (reflect(&plus), reflect(&minus))
        } else {
            (minus, plus)
        };
        let mu_canonical = geometry
            .fixed_shift_canonical()
            .ok_or_else(|| Error::internal("case geometry without a fixed shift"))?;
        Some(proof_diagnostics(
            &geometry,
            &minus_canonical,
            &plus_canonical,
            mu_canonical,
        )?)
    } else {
        None
    };

    // Slack of every reported bound against the measured rotation.
    let exact = angles.distance;
    let mut slack = BTreeMap::new();
    slack.insert("classical", bounds.classical - exact);
    slack.insert("central", bounds.central - exact);
    if let Some(cb) = &bounds.case {
        slack.insert("case", cb.bound - exact);
        if let Some(stb) = cb.sin_theta_bound {
            slack.insert("sin_theta", stb - exact);
        }
    }

    Ok(InstanceAnalysis {
        label: pair.label().to_string(),
        n: pair.n(),
        geometry,
        bounds,
        angles,
        sign_identity,
        sectoriality,
        sectoriality_at_fixed,
        sign_scan,
        gap_persistence,
        positivity,
        diagnostics,
        slack,
    })
}

/// Assembles the blocks and runs the full analysis.
pub fn analyze(
    spec: &BlockOperatorSpec,
    hint: Option<(f64, f64)>,
    options: &AnalysisOptions,
) -> Result<InstanceAnalysis> {
    options.validate()?;
    let pair = assemble(spec, options.eps_factor)?;
    analyze_pair(&pair, hint, options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{DenseRect, DenseSymmetric};
    use crate::model::Layout;

    const SIN_PI_OVER_8: f64 = 0.382_683_432_365_089_8;

    fn spec_1p1(layout: Layout, plus: f64, minus: f64, w: f64) -> BlockOperatorSpec {
        BlockOperatorSpec::new(
            "test",
            layout,
            DenseSymmetric::from_rows(&[vec![plus]]).unwrap(),
            DenseSymmetric::from_rows(&[vec![minus]]).unwrap(),
            DenseRect::from_rows(&[vec![w]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn unit_central_instance_analysis_is_sharp_everywhere() {
        let spec = spec_1p1(Layout::Central, 1.0, 1.0, 1.0);
        let analysis = analyze(&spec, None, &AnalysisOptions::default()).unwrap();

        assert_eq!(analysis.geometry.case_tag, CaseTag::Central);
        assert!((analysis.angles.distance - SIN_PI_OVER_8).abs() < 1e-12);
        // For a 1+1 instance both the fixed-gap and the shift-optimized
        // bounds collapse onto the measured rotation.
        assert!(analysis.slack["classical"].abs() < 1e-9);
        assert!(analysis.slack["central"].abs() < 1e-9);
        assert!((analysis.bounds.optimum.mu_star).abs() < 1e-6);
        assert!((analysis.bounds.optimum.v_min - 1.0).abs() < 1e-9);
        assert!(analysis.bounds.case.is_none());
        assert!(analysis.diagnostics.is_none());
        assert!(analysis.positivity.is_some());
        assert_eq!(analysis.validate(), Vec::<String>::new());
    }

    #[test]
    fn near_gap_instance_gets_case_bound_and_diagnostics() {
        let spec = BlockOperatorSpec::new(
            "near",
            Layout::Central,
            DenseSymmetric::diagonal(&[2.0, 3.0]),
            DenseSymmetric::diagonal(&[1.0]),
            DenseRect::from_rows(&[vec![0.5], vec![-0.25]]).unwrap(),
        )
        .unwrap();
        let analysis = analyze(&spec, None, &AnalysisOptions::default()).unwrap();

        assert_eq!(analysis.geometry.case_tag, CaseTag::CaseI);
        assert_eq!(
            (analysis.geometry.d_plus, analysis.geometry.d_minus),
            (2.0, 1.0)
        );
        let case = analysis.bounds.case.as_ref().expect("case bound");
        assert_eq!(case.shift_original, 0.5);
        assert_eq!(case.sin_theta_bound, None);
        let diag = analysis.diagnostics.as_ref().expect("diagnostics");
        assert!(diag.equality_plus && diag.equality_minus);
        assert!(analysis.slack["case"] >= 0.0);
        assert!(analysis.positivity.as_ref().unwrap().agrees != Some(false));
        assert_eq!(analysis.validate(), Vec::<String>::new());
    }

    #[test]
    fn sign_definite_instance_reports_case_two_data() {
        let spec = spec_1p1(Layout::CaseTwo, 3.0, 1.0, 0.4);
        let analysis = analyze(&spec, None, &AnalysisOptions::default()).unwrap();

        assert_eq!(analysis.geometry.case_tag, CaseTag::CaseII);
        assert_eq!(analysis.angles.side, SpectralSide::Below);
        assert_eq!(analysis.angles.cut, 2.0);
        let case = analysis.bounds.case.as_ref().expect("case bound");
        assert!(case.sin_theta_bound.is_some());
        assert!(analysis.slack.contains_key("sin_theta"));
        assert!(analysis.positivity.is_none());
        assert!(analysis.bounds.v_at_fixed_shift.is_some());
        assert_eq!(analysis.validate(), Vec::<String>::new());
    }

    #[test]
    fn mirrored_instance_is_analyzed_through_the_reflection() {
        let spec = spec_1p1(Layout::CaseTwoMirrored, 1.0, 3.0, 0.4);
        let analysis = analyze(&spec, None, &AnalysisOptions::default()).unwrap();

        assert_eq!(analysis.geometry.case_tag, CaseTag::CaseIIMirrored);
        assert_eq!(analysis.angles.cut, -2.0);
        let case = analysis.bounds.case.as_ref().expect("case bound");
        assert_eq!(case.shift_original, -2.0);
        assert_eq!(case.shift_canonical, 2.0);
        let diag = analysis.diagnostics.as_ref().expect("diagnostics");
        assert!(diag.equality_plus && diag.equality_minus);
        // Same geometry as the unreflected instance: identical distance.
        let unreflected = analyze(
            &spec_1p1(Layout::CaseTwo, 3.0, 1.0, 0.4),
            None,
            &AnalysisOptions::default(),
        )
        .unwrap();
        assert!((analysis.angles.distance - unreflected.angles.distance).abs() < 1e-12);
        assert_eq!(analysis.validate(), Vec::<String>::new());
    }

    #[test]
    fn hint_is_passed_through_to_gap_detection() {
        let spec = spec_1p1(Layout::Central, 1.0, 1.0, 0.5);
        assert!(analyze(&spec, Some((-2.0, 2.0)), &AnalysisOptions::default()).is_ok());
        let err = analyze(&spec, Some((0.5, 2.0)), &AnalysisOptions::default()).unwrap_err();
        assert!(matches!(err, Error::HintMismatch { .. }));
    }

    #[test]
    fn validate_flags_a_tampered_slack() {
        let spec = spec_1p1(Layout::Central, 1.0, 1.0, 0.5);
        let mut analysis = analyze(&spec, None, &AnalysisOptions::default()).unwrap();
        assert!(analysis.validate().is_empty());
        analysis.slack.insert("classical", -1.0);
        let violations = analysis.validate();
        assert_eq!(violations.len(), 1);
        assert!(violations[0].contains("classical"));
    }

    #[test]
    fn options_are_validated() {
        let spec = spec_1p1(Layout::Central, 1.0, 1.0, 0.5);
        let bad = AnalysisOptions {
            grid_points: 2,
            ..AnalysisOptions::default()
        };
        assert!(analyze(&spec, None, &bad).is_err());
        let bad = AnalysisOptions {
            eps_factor: 0.0,
            ..AnalysisOptions::default()
        };
        assert!(analyze(&spec, None, &bad).is_err());
    }
}
