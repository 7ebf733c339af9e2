//! Randomized verification lab: seeded instance generation with a
//! prescribed relative coupling strength, closed forms and sharpness data
//! for 1+1-dimensional instances, and a batch property suite that runs the
//! full analysis over many instances and aggregates the outcome.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::analysis::{analyze_pair, AnalysisOptions, InstanceAnalysis};
use crate::bounds::sin_half_arctan;
use crate::error::{Error, Result};
use crate::linalg::{matrix_abs, DenseRect, DenseSymmetric};
use crate::model::{assemble, AssembledPair, BlockOperatorSpec, Layout};
use crate::rng::CounterRng;
use crate::{MAX_OPERATOR_DIM, SLACK_TOLERANCE};

/// Couplings smaller than this are treated as zero draws and redrawn.
const MIN_RAW_COUPLING: f64 = 1e-12;

/// Maximum redraw attempts for a degenerate coupling draw.
const MAX_REDRAWS: usize = 10;

/// Relative tolerance for the post-scaling audit of the coupling strength.
const TARGET_AUDIT_TOLERANCE: f64 = 1e-9;

/// Additive tolerance for the sampled off-diagonal form inequality.
const FORM_INEQUALITY_TOLERANCE: f64 = 1e-9;

/// Spectral geometry the generator aims for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorGeometry {
    /// Gap containing zero, clusters on both sides.
    Central,
    /// Gap containing zero with the lower cluster compressed toward zero.
    CaseOne,
    /// Both clusters positive.
    CaseTwo,
    /// Both clusters negative.
    CaseTwoMirrored,
}

impl GeneratorGeometry {
    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorGeometry::Central => "central",
            GeneratorGeometry::CaseOne => "case1",
            GeneratorGeometry::CaseTwo => "case2",
            GeneratorGeometry::CaseTwoMirrored => "case2-mirrored",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "central" => Ok(GeneratorGeometry::Central),
            "case1" => Ok(GeneratorGeometry::CaseOne),
            "case2" => Ok(GeneratorGeometry::CaseTwo),
            "case2-mirrored" => Ok(GeneratorGeometry::CaseTwoMirrored),
            other => Err(Error::InvalidGenerator {
                reason: format!("unknown generator geometry {other:?}"),
            }),
        }
    }

    fn layout(self) -> Layout {
        match self {
            GeneratorGeometry::Central | GeneratorGeometry::CaseOne => Layout::Central,
            GeneratorGeometry::CaseTwo => Layout::CaseTwo,
            GeneratorGeometry::CaseTwoMirrored => Layout::CaseTwoMirrored,
        }
    }

    /// Default magnitude ranges `(plus block, minus block)` that make the
    /// detector land on the intended geometry.
    fn default_ranges(self) -> ((f64, f64), (f64, f64)) {
        match self {
            GeneratorGeometry::Central => ((0.5, 3.0), (0.5, 3.0)),
            // Lower cluster inside (−0.9, −0.3), upper beyond 1: the upper
            // gap edge always exceeds the lower cluster's depth.
            GeneratorGeometry::CaseOne => ((1.0, 3.0), (0.3, 0.9)),
            GeneratorGeometry::CaseTwo => ((2.5, 6.0), (0.5, 1.5)),
            // Near block (upper cluster after negation) and far block.
            GeneratorGeometry::CaseTwoMirrored => ((0.5, 1.5), (2.5, 6.0)),
        }
    }
}

/// Everything needed to generate a family of instances deterministically.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub geometry: GeneratorGeometry,
    pub n_plus: usize,
    pub n_minus: usize,
    /// Desired base relative bound `‖|A|^{-1/2} V |A|^{-1/2}‖`.
    pub target_v: f64,
    /// Number of instances drawn from this configuration.
    pub count: usize,
    pub seed: u64,
    /// Magnitude range of the plus-slot block spectrum.
    pub plus_range: (f64, f64),
    /// Magnitude range of the minus-slot block spectrum.
    pub minus_range: (f64, f64),
}

impl GeneratorConfig {
    pub fn new(
        geometry: GeneratorGeometry,
        n_plus: usize,
        n_minus: usize,
        target_v: f64,
        count: usize,
        seed: u64,
    ) -> Self {
        let (plus_range, minus_range) = geometry.default_ranges();
        Self {
            geometry,
            n_plus,
            n_minus,
            target_v,
            count,
            seed,
            plus_range,
            minus_range,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_plus == 0 || self.n_minus == 0 {
            return Err(Error::InvalidGenerator {
                reason: "both blocks need at least one dimension".into(),
            });
        }
        if self.n_plus + self.n_minus > MAX_OPERATOR_DIM {
            return Err(Error::InvalidGenerator {
                reason: format!(
                    "total dimension {} exceeds the cap {}",
                    self.n_plus + self.n_minus,
                    MAX_OPERATOR_DIM
                ),
            });
        }
        if !self.target_v.is_finite() || self.target_v < 0.0 {
            return Err(Error::InvalidGenerator {
                reason: format!("coupling target must be non-negative, got {}", self.target_v),
            });
        }
        for (name, (lo, hi)) in [("plus", self.plus_range), ("minus", self.minus_range)] {
            if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) {
                return Err(Error::InvalidGenerator {
                    reason: format!("{name} range ({lo}, {hi}) is not an ordered positive interval"),
                });
            }
        }
        match self.geometry {
            GeneratorGeometry::Central => {}
            // Lower cluster must stay strictly shallower than the upper edge.
            GeneratorGeometry::CaseOne => {
                if !(self.minus_range.1 < self.plus_range.0) {
                    return Err(Error::InvalidGenerator {
                        reason: "near-gap geometry needs the minus range strictly below the plus range"
                            .into(),
                    });
                }
            }
            GeneratorGeometry::CaseTwo => {
                if !(self.minus_range.1 < self.plus_range.0) {
                    return Err(Error::InvalidGenerator {
                        reason: "sign-definite geometry needs the minus range strictly below the plus range"
                            .into(),
                    });
                }
            }
            GeneratorGeometry::CaseTwoMirrored => {
                if !(self.plus_range.1 < self.minus_range.0) {
                    return Err(Error::InvalidGenerator {
                        reason: "mirrored geometry needs the near range strictly below the far range"
                            .into(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Random orthogonal matrix as a product of Givens rotations with angles
/// drawn from the stream, one per coordinate pair in row-major order.
fn random_orthogonal(rng: &mut CounterRng, n: usize) -> DenseRect {
    let mut q = DenseRect::identity(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let theta = rng.angle();
            let (s, c) = theta.sin_cos();
            for r in 0..n {
                let qi = q.get(r, i);
                let qj = q.get(r, j);
                q.set(r, i, c * qi - s * qj);
                q.set(r, j, s * qi + c * qj);
            }
        }
    }
    q
}

/// Symmetric block `Q diag(values) Qᵀ`.
fn conjugated_diagonal(values: &[f64], q: &DenseRect) -> Result<DenseSymmetric> {
    let n = values.len();
    DenseSymmetric::from_fn_symmetric(n, |i, j| {
        let mut acc = 0.0;
        for k in 0..n {
            acc += q.get(i, k) * values[k] * q.get(j, k);
        }
        acc
    })
}

fn draw_sorted(rng: &mut CounterRng, count: usize, range: (f64, f64)) -> Vec<f64> {
    let mut values: Vec<f64> = (0..count).map(|_| rng.range(range.0, range.1)).collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values
}

/// Draws one instance: block spectra from the configured ranges, random
/// eigenbases, and a coupling block rescaled so the base relative bound
/// lands exactly on `target_v` (the bound is homogeneous of degree one in
/// the coupling).  The draw is a pure function of `(seed, index)`.
pub fn generate_instance(config: &GeneratorConfig, index: usize) -> Result<BlockOperatorSpec> {
    config.validate()?;
    let mut rng = CounterRng::new(config.seed, index as u64);

    let plus_values = draw_sorted(&mut rng, config.n_plus, config.plus_range);
    let minus_values = draw_sorted(&mut rng, config.n_minus, config.minus_range);
    let q_plus = random_orthogonal(&mut rng, config.n_plus);
    let q_minus = random_orthogonal(&mut rng, config.n_minus);
    let a_plus = conjugated_diagonal(&plus_values, &q_plus)?;
    let a_minus = conjugated_diagonal(&minus_values, &q_minus)?;

    let label = format!(
        "{}-s{}-i{index:04}",
        config.geometry.as_str(),
        config.seed
    );

    if config.target_v == 0.0 {
        let w = DenseRect::zeros(config.n_plus, config.n_minus);
        return BlockOperatorSpec::new(label, config.geometry.layout(), a_plus, a_minus, w);
    }

    let mut attempt = 0usize;
    loop {
        let mut stream = if attempt == 0 {
            rng.clone()
        } else {
            rng.fork(1000 + attempt as u64)
        };
        let mut w = DenseRect::zeros(config.n_plus, config.n_minus);
        for i in 0..config.n_plus {
            for j in 0..config.n_minus {
                w.set(i, j, stream.symmetric_unit());
            }
        }

        let raw_spec = BlockOperatorSpec::new(
            label.clone(),
            config.geometry.layout(),
            a_plus.clone(),
            a_minus.clone(),
            w.clone(),
        )?;
        let raw_pair = assemble(&raw_spec, crate::EPS_SPEC_FACTOR)?;
        let raw_v = crate::model::base_relative_bound(&raw_pair, crate::EPS_SPEC_FACTOR)?;
        if raw_v <= MIN_RAW_COUPLING {
            attempt += 1;
            if attempt > MAX_REDRAWS {
                return Err(Error::InvalidGenerator {
                    reason: format!("coupling draw degenerate after {MAX_REDRAWS} redraws"),
                });
            }
            continue;
        }

        let spec = BlockOperatorSpec::new(
            label,
            config.geometry.layout(),
            a_plus,
            a_minus,
            w.scale(config.target_v / raw_v),
        )?;
        // Audit: the rescaled instance must hit the target.
        let pair = assemble(&spec, crate::EPS_SPEC_FACTOR)?;
        let v = crate::model::base_relative_bound(&pair, crate::EPS_SPEC_FACTOR)?;
        if (v - config.target_v).abs() > TARGET_AUDIT_TOLERANCE * config.target_v.max(1.0) {
            return Err(Error::internal(format!(
                "coupling rescaling missed the target: {v:.17} vs {:.17}",
                config.target_v
            )));
        }
        return Ok(spec);
    }
}

// ---------------------------------------------------------------------------
// 1+1-dimensional closed forms and sharpness data
// ---------------------------------------------------------------------------

/// Exact subspace rotation of a 1+1 instance with gap `(alpha, beta)` and
/// coupling `w`: `sin(½ arctan(2|w|/(β−α)))`, wherever the gap sits.
pub fn exact_rotation_1p1(alpha: f64, beta: f64, w: f64) -> Result<f64> {
    if !(beta - alpha > 0.0) {
        return Err(Error::NonPositiveGapWidth { d: beta - alpha });
    }
    sin_half_arctan(2.0 * w.abs() / (beta - alpha))
}

/// `v_μ` of a 1+1 instance: `|w|/√((β−μ)(μ−α))`.
pub fn v_mu_closed_form_1p1(alpha: f64, beta: f64, w: f64, mu: f64) -> Result<f64> {
    let product = (beta - mu) * (mu - alpha);
    if !(product > 0.0) {
        return Err(Error::ShiftOutsideGap {
            mu,
            lo: alpha,
            hi: beta,
        });
    }
    Ok(w.abs() / product.sqrt())
}

/// Minimum of `μ ↦ v_μ` for a 1+1 instance, attained at the gap midpoint:
/// `2|w|/(β−α)`.
pub fn v_min_closed_form_1p1(alpha: f64, beta: f64, w: f64) -> Result<f64> {
    if !(beta - alpha > 0.0) {
        return Err(Error::NonPositiveGapWidth { d: beta - alpha });
    }
    Ok(2.0 * w.abs() / (beta - alpha))
}

/// One row of the sharpness study: every bound against the exact rotation
/// of a 1+1 instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessRow {
    pub w: f64,
    pub exact: f64,
    pub classical: f64,
    pub central_opt: f64,
    pub case_bound: Option<f64>,
    pub slack_classical: f64,
    pub slack_central: f64,
    pub slack_case: Option<f64>,
}

/// Runs the full pipeline on a family of 1+1 instances with gap
/// `(alpha, beta)` and the given couplings, cross-checks the measured
/// rotation against the closed form, and reports the slack of every bound.
/// On these instances all bounds collapse onto the exact value.
pub fn sharpness_study(
    alpha: f64,
    beta: f64,
    couplings: &[f64],
    options: &AnalysisOptions,
) -> Result<Vec<SharpnessRow>> {
    if couplings.is_empty() {
        return Err(Error::Empty);
    }
    if !(alpha < beta) || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::BadCutInterval { lo: alpha, hi: beta });
    }
    let layout = if alpha < 0.0 && beta > 0.0 {
        Layout::Central
    } else if alpha > 0.0 {
        Layout::CaseTwo
    } else {
        Layout::CaseTwoMirrored
    };
    let mut rows = Vec::with_capacity(couplings.len());
    for &w in couplings {
        let (plus, minus, coupling) = match layout {
            Layout::Central => (beta, -alpha, w),
            Layout::CaseTwo => (beta, alpha, w),
            // Near block −β, far block −α.
            Layout::CaseTwoMirrored => (-beta, -alpha, w),
        };
        let spec = BlockOperatorSpec::new(
            format!("sharpness-w{w}"),
            layout,
            DenseSymmetric::from_rows(&[vec![plus]])?,
            DenseSymmetric::from_rows(&[vec![minus]])?,
            DenseRect::from_rows(&[vec![coupling]])?,
        )?;
        let analysis = crate::analysis::analyze(&spec, None, options)?;

        let closed_form = exact_rotation_1p1(alpha, beta, w)?;
        if (analysis.angles.distance - closed_form).abs() > 1e-10 {
            return Err(Error::internal(format!(
                "measured rotation {:.17} disagrees with the closed form {closed_form:.17}",
                analysis.angles.distance
            )));
        }

        let exact = analysis.angles.distance;
        rows.push(SharpnessRow {
            w,
            exact,
            classical: analysis.bounds.classical,
            central_opt: analysis.bounds.central,
            case_bound: analysis.bounds.case.as_ref().map(|c| c.bound),
            slack_classical: analysis.bounds.classical - exact,
            slack_central: analysis.bounds.central - exact,
            slack_case: analysis.bounds.case.as_ref().map(|c| c.bound - exact),
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Property suite
// ---------------------------------------------------------------------------

/// Options of the property suite on top of the per-instance analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub analysis: AnalysisOptions,
    /// Random vectors per instance for the off-diagonal form inequality;
    /// zero disables the sampling.  Only instances whose gap contains zero
    /// are sampled (the form operator at zero must be positive there).
    pub vad_samples: usize,
    /// A row fails when any bound's slack drops below this floor.
    pub slack_floor: f64,
}

/// Default number of random vectors per instance for the off-diagonal form
/// inequality.
pub const DEFAULT_FORM_SAMPLES: usize = 1000;

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            analysis: AnalysisOptions::default(),
            vad_samples: DEFAULT_FORM_SAMPLES,
            slack_floor: -SLACK_TOLERANCE,
        }
    }
}

/// One per-instance row of the suite output.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub id: String,
    pub n: usize,
    /// Detected gap regime, or `error` when the instance failed to analyze.
    pub geometry: String,
    pub v_base: f64,
    pub v_inf: f64,
    pub mu_star: f64,
    pub exact: f64,
    pub classical: f64,
    pub central: f64,
    pub case_bound: Option<f64>,
    pub sin_theta: Option<f64>,
    pub sign_residual: f64,
    pub sectorial_margin: f64,
    pub gap_ok: Option<bool>,
    pub pass: bool,
    pub error: Option<String>,
}

/// Aggregate over all rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    /// Smallest slack seen per bound name.
    pub min_slack: BTreeMap<String, f64>,
    pub max_sign_residual: f64,
    pub min_sectorial_margin: f64,
    pub positivity_checked: usize,
    pub positivity_agreed: usize,
    pub positivity_inconclusive: usize,
    pub form_samples: usize,
    /// Largest `|⟨x,Vx⟩| − bound` over all sampled vectors.
    pub max_form_excess: f64,
    /// Largest condition-number excess over its closed-form majorant, across
    /// all instances with diagnostics.
    pub max_kappa_excess: f64,
    pub pass: bool,
}

/// Rows plus summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub rows: Vec<SuiteRow>,
    pub summary: SuiteSummary,
}

struct JobOutcome {
    row: SuiteRow,
    slack: BTreeMap<&'static str, f64>,
    positivity_agrees: Option<Option<bool>>,
    form_samples: usize,
    max_form_excess: f64,
    kappa_excess: f64,
}

/// Samples the quadratic-form inequality
/// `|⟨x,Vx⟩| ≤ 2 v₀ √(⟨x₊,|A|x₊⟩ ⟨x₋,|A|x₋⟩)` on random vectors.
/// Returns the number of samples and the worst excess of the left side.
fn sample_form_inequality(
    pair: &AssembledPair,
    v0: f64,
    samples: usize,
    rng: &mut CounterRng,
) -> Result<(usize, f64)> {
    let n = pair.n();
    let abs_a = matrix_abs(pair.decomp_a())?;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let x: Vec<f64> = (0..n).map(|_| rng.symmetric_unit()).collect();
        let (x_plus, x_minus) = pair.split_vector(&x);
        let lhs = pair.v().quadratic_form(&x).abs();
        let rhs = 2.0
            * v0
            * (abs_a.quadratic_form(&x_plus) * abs_a.quadratic_form(&x_minus))
                .max(0.0)
                .sqrt();
        worst = worst.max(lhs - rhs);
    }
    Ok((samples, worst))
}

fn failing_row(id: String, err: &Error) -> SuiteRow {
    SuiteRow {
        id,
        n: 0,
        geometry: "error".into(),
        v_base: f64::NAN,
        v_inf: f64::NAN,
        mu_star: f64::NAN,
        exact: f64::NAN,
        classical: f64::NAN,
        central: f64::NAN,
        case_bound: None,
        sin_theta: None,
        sign_residual: f64::NAN,
        sectorial_margin: f64::NAN,
        gap_ok: None,
        pass: false,
        error: Some(err.to_string()),
    }
}

fn row_from_analysis(id: String, analysis: &InstanceAnalysis) -> SuiteRow {
    SuiteRow {
        id,
        n: analysis.n,
        geometry: analysis.geometry.case_tag.as_str().to_string(),
        v_base: analysis.bounds.base_v,
        v_inf: analysis.bounds.optimum.v_min,
        mu_star: analysis.bounds.optimum.mu_star,
        exact: analysis.angles.distance,
        classical: analysis.bounds.classical,
        central: analysis.bounds.central,
        case_bound: analysis.bounds.case.as_ref().map(|c| c.bound),
        sin_theta: analysis.bounds.case.as_ref().and_then(|c| c.sin_theta_bound),
        sign_residual: analysis
            .sign_identity
            .norm_residual
            .max(analysis.sign_identity.entry_residual),
        sectorial_margin: analysis.sectorial_margin(),
        gap_ok: Some(analysis.gap_persistence.holds),
        pass: true,
        error: None,
    }
}

fn run_job(
    config: &GeneratorConfig,
    config_position: usize,
    index: usize,
    options: &SuiteOptions,
) -> JobOutcome {
    let id = format!(
        "c{config_position:02}-{}-s{}-i{index:04}",
        config.geometry.as_str(),
        config.seed
    );

    let outcome = (|| -> Result<JobOutcome> {
        let spec = generate_instance(config, index)?;
        let pair = assemble(&spec, options.analysis.eps_factor)?;
        let analysis = analyze_pair(&pair, None, &options.analysis)?;

        let mut row = row_from_analysis(id.clone(), &analysis);
        let mut violations = analysis.validate();
        for (name, &slack) in &analysis.slack {
            if !(slack >= options.slack_floor) {
                violations.push(format!("slack floor violated for \"{name}\": {slack:.3e}"));
            }
        }
        // Randomized instances must clear the universal limit strictly.
        if !analysis.angles.strictly_below_limit {
            violations.push(format!(
                "subspace distance {:.17} is not strictly below the universal limit",
                analysis.angles.distance
            ));
        }
        // For sign-definite gaps the half-angle form must not exceed the
        // direct sine bound.
        if let Some(case) = &analysis.bounds.case {
            if let Some(stb) = case.sin_theta_bound {
                if !(case.bound <= stb + 1e-12) {
                    violations.push(format!(
                        "case bound {:.17} exceeds the direct sine bound {stb:.17}",
                        case.bound
                    ));
                }
            }
        }
        let kappa_excess = analysis
            .diagnostics
            .as_ref()
            .map(|d| {
                (d.kappa_plus - d.kappa_plus_limit).max(d.kappa_minus - d.kappa_minus_limit)
            })
            .unwrap_or(f64::NEG_INFINITY);

        let (form_samples, max_form_excess) = if options.vad_samples > 0
            && analysis.geometry.is_central_type()
        {
            let mut rng = CounterRng::new(config.seed, index as u64).fork(7001);
            let (count, worst) = sample_form_inequality(
                &pair,
                analysis.bounds.base_v,
                options.vad_samples,
                &mut rng,
            )?;
            if worst > FORM_INEQUALITY_TOLERANCE {
                violations.push(format!(
                    "off-diagonal form inequality violated by {worst:.3e}"
                ));
            }
            (count, worst)
        } else {
            (0, f64::NEG_INFINITY)
        };

        if !violations.is_empty() {
            row.pass = false;
            row.error = Some(violations.join("; "));
        }

        Ok(JobOutcome {
            row,
            slack: analysis.slack.clone(),
            positivity_agrees: analysis.positivity.as_ref().map(|p| p.agrees),
            form_samples,
            max_form_excess,
            kappa_excess,
        })
    })();

    outcome.unwrap_or_else(|err| JobOutcome {
        row: failing_row(id, &err),
        slack: BTreeMap::new(),
        positivity_agrees: None,
        form_samples: 0,
        max_form_excess: f64::NEG_INFINITY,
        kappa_excess: f64::NEG_INFINITY,
    })
}

/// Runs the full analysis over every configured instance (in parallel) and
/// aggregates the results.  Output order and content depend only on the
/// configurations and options, not on scheduling.
pub fn run_property_suite(
    configs: &[GeneratorConfig],
    options: &SuiteOptions,
) -> Result<SuiteResult> {
    if configs.is_empty() {
        return Err(Error::Empty);
    }
    options.analysis.validate()?;
    for config in configs {
        config.validate()?;
    }

    let jobs: Vec<(usize, usize)> = configs
        .iter()
        .enumerate()
        .flat_map(|(pos, config)| (0..config.count).map(move |i| (pos, i)))
        .collect();

    let outcomes: Vec<JobOutcome> = jobs
        .par_iter()
        .map(|&(pos, index)| run_job(&configs[pos], pos, index, options))
        .collect();

    let mut min_slack: BTreeMap<String, f64> = BTreeMap::new();
    let mut max_sign_residual = 0.0f64;
    let mut min_sectorial_margin = f64::INFINITY;
    let mut positivity_checked = 0usize;
    let mut positivity_agreed = 0usize;
    let mut positivity_inconclusive = 0usize;
    let mut form_samples = 0usize;
    let mut max_form_excess = f64::NEG_INFINITY;
    let mut max_kappa_excess = f64::NEG_INFINITY;
    let mut passed = 0usize;

    let mut rows = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        for (name, &slack) in &outcome.slack {
            min_slack
                .entry((*name).to_string())
                .and_modify(|m| *m = m.min(slack))
                .or_insert(slack);
        }
        if outcome.row.sign_residual.is_finite() {
            max_sign_residual = max_sign_residual.max(outcome.row.sign_residual);
        }
        if outcome.row.sectorial_margin.is_finite() {
            min_sectorial_margin = min_sectorial_margin.min(outcome.row.sectorial_margin);
        }
        match outcome.positivity_agrees {
            Some(Some(true)) => {
                positivity_checked += 1;
                positivity_agreed += 1;
            }
            Some(Some(false)) => positivity_checked += 1,
            Some(None) => {
                positivity_checked += 1;
                positivity_inconclusive += 1;
            }
            None => {}
        }
        form_samples += outcome.form_samples;
        max_form_excess = max_form_excess.max(outcome.max_form_excess);
        max_kappa_excess = max_kappa_excess.max(outcome.kappa_excess);
        if outcome.row.pass {
            passed += 1;
        }
        rows.push(outcome.row);
    }

    let total = rows.len();
    let summary = SuiteSummary {
        total,
        passed,
        failed: total - passed,
        min_slack,
        max_sign_residual,
        min_sectorial_margin,
        positivity_checked,
        positivity_agreed,
        positivity_inconclusive,
        form_samples,
        max_form_excess,
        max_kappa_excess,
        pass: passed == total,
    };

    Ok(SuiteResult { rows, summary })
}

/// The standard verification battery: the three primary geometries with
/// 1000 instances each, five coupling strengths from deep inside the
/// small-coupling regime to far beyond it, and a mix of block shapes from
/// scalar to 20+20.  (The mirrored geometry runs through the same pipeline
/// and is covered by the targeted tests.)
pub fn default_suite_configs(seed: u64) -> Vec<GeneratorConfig> {
    let geometries = [
        GeneratorGeometry::Central,
        GeneratorGeometry::CaseOne,
        GeneratorGeometry::CaseTwo,
    ];
    let targets = [0.1, 0.3, 1.0, 3.0, 10.0];
    let shapes: [(usize, usize, usize); 5] =
        [(1, 1, 60), (2, 3, 50), (5, 5, 40), (12, 8, 30), (20, 20, 20)];
    let mut configs = Vec::new();
    for &geometry in &geometries {
        for &target in &targets {
            for &(n_plus, n_minus, count) in &shapes {
                configs.push(GeneratorConfig::new(
                    geometry, n_plus, n_minus, target, count, seed,
                ));
            }
        }
    }
    configs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{detect_gap, CaseTag};

    #[test]
    fn generator_is_deterministic_and_hits_the_target() {
        let config = GeneratorConfig::new(GeneratorGeometry::Central, 3, 2, 0.7, 1, 42);
        let a = generate_instance(&config, 0).unwrap();
        let b = generate_instance(&config, 0).unwrap();
        assert_eq!(a.w().data(), b.w().data());
        assert_eq!(a.a_plus().to_rect().data(), b.a_plus().to_rect().data());

        let pair = assemble(&a, crate::EPS_SPEC_FACTOR).unwrap();
        let v = crate::model::base_relative_bound(&pair, crate::EPS_SPEC_FACTOR).unwrap();
        assert!((v - 0.7).abs() < 1e-9, "v = {v}");

        let different = generate_instance(&config, 1).unwrap();
        assert_ne!(a.w().data(), different.w().data());
    }

    #[test]
    fn generator_respects_geometry_targets() {
        for (geometry, expected) in [
            (GeneratorGeometry::CaseOne, CaseTag::CaseI),
            (GeneratorGeometry::CaseTwo, CaseTag::CaseII),
            (GeneratorGeometry::CaseTwoMirrored, CaseTag::CaseIIMirrored),
        ] {
            let config = GeneratorConfig::new(geometry, 2, 2, 0.5, 1, 7);
            let spec = generate_instance(&config, 0).unwrap();
            let pair = assemble(&spec, crate::EPS_SPEC_FACTOR).unwrap();
            let geom =
                detect_gap(pair.decomp_a(), pair.j(), None, crate::EPS_SPEC_FACTOR).unwrap();
            assert_eq!(geom.case_tag, expected, "geometry {geometry:?}");
        }
    }

    #[test]
    fn generator_supports_zero_coupling() {
        let config = GeneratorConfig::new(GeneratorGeometry::Central, 2, 2, 0.0, 1, 3);
        let spec = generate_instance(&config, 0).unwrap();
        assert_eq!(spec.w().max_abs(), 0.0);
    }

    #[test]
    fn generator_rejects_bad_configs() {
        let mut config = GeneratorConfig::new(GeneratorGeometry::Central, 1, 1, 0.5, 1, 0);
        config.n_plus = 0;
        assert!(config.validate().is_err());

        let mut config = GeneratorConfig::new(GeneratorGeometry::CaseTwo, 1, 1, 0.5, 1, 0);
        config.minus_range = (0.5, 3.0);
        assert!(config.validate().is_err());

        let mut config = GeneratorConfig::new(GeneratorGeometry::Central, 1, 1, 0.5, 1, 0);
        config.target_v = -1.0;
        assert!(config.validate().is_err());
    }

    #[test]
    fn random_orthogonal_matrices_are_orthogonal() {
        let mut rng = CounterRng::new(5, 0);
        let q = random_orthogonal(&mut rng, 6);
        let qtq = q.transpose().matmul(&q).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((qtq.get(i, j) - target).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_forms_match_reference_values() {
        // Unit-gap instance with w = 1: rotation sin(π/8).
        let exact = exact_rotation_1p1(-1.0, 1.0, 1.0).unwrap();
        assert!((exact - 0.382_683_432_365_089_8).abs() < 1e-15);
        // v_μ at μ = 0.5 on the unit gap: 1/sqrt(0.75).
        let v = v_mu_closed_form_1p1(-1.0, 1.0, 1.0, 0.5).unwrap();
        assert!((v - 1.154_700_538_379_251_5).abs() < 1e-15);
        // The shift-optimized v on the unit gap is |w|.
        assert_eq!(v_min_closed_form_1p1(-1.0, 1.0, 0.3).unwrap(), 0.3);
        assert!(v_mu_closed_form_1p1(-1.0, 1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn sharpness_rows_have_vanishing_slack_on_1p1_instances() {
        let couplings = [0.1, 0.5, 1.0, 2.0, 5.0];
        // Gap containing zero.
        let rows = sharpness_study(-1.0, 1.0, &couplings, &AnalysisOptions::default()).unwrap();
        for row in &rows {
            assert!(row.slack_classical.abs() < 1e-9, "{row:?}");
            assert!(row.slack_central.abs() < 1e-9, "{row:?}");
        }
        // Sign-definite gap: the case bound is present and also collapses.
        let rows = sharpness_study(1.0, 3.0, &couplings, &AnalysisOptions::default()).unwrap();
        for row in &rows {
            assert!(row.slack_central.abs() < 1e-9, "{row:?}");
            let slack_case = row.slack_case.expect("case bound present");
            assert!(slack_case.abs() < 1e-9, "{row:?}");
        }
    }

    #[test]
    fn suite_passes_on_a_small_mixed_battery() {
        let configs = vec![
            GeneratorConfig::new(GeneratorGeometry::Central, 2, 2, 0.4, 3, 11),
            GeneratorConfig::new(GeneratorGeometry::CaseOne, 1, 2, 1.5, 3, 11),
            GeneratorConfig::new(GeneratorGeometry::CaseTwo, 2, 1, 0.8, 3, 11),
            GeneratorConfig::new(GeneratorGeometry::CaseTwoMirrored, 2, 2, 2.0, 3, 11),
        ];
        let options = SuiteOptions {
            vad_samples: 50,
            ..SuiteOptions::default()
        };
        let result = run_property_suite(&configs, &options).unwrap();
        assert_eq!(result.rows.len(), 12);
        assert!(result.summary.pass, "summary: {:?}", result.summary);
        assert_eq!(result.summary.failed, 0);
        assert!(result.summary.form_samples > 0);
        assert!(result.summary.max_form_excess <= FORM_INEQUALITY_TOLERANCE);
        assert!(result.summary.max_kappa_excess <= crate::KAPPA_TOLERANCE);
        for name in ["classical", "central"] {
            assert!(
                result.summary.min_slack[name] >= -SLACK_TOLERANCE,
                "slack for {name}"
            );
        }
        // Deterministic repetition.
        let again = run_property_suite(&configs, &options).unwrap();
        assert_eq!(result.rows, again.rows);
    }

    #[test]
    fn suite_accepts_an_empty_family() {
        let configs = vec![GeneratorConfig::new(
            GeneratorGeometry::Central,
            1,
            1,
            1.0,
            0,
            13,
        )];
        let result = run_property_suite(&configs, &SuiteOptions::default()).unwrap();
        assert_eq!(result.rows.len(), 0);
        assert!(result.summary.pass);
        assert_eq!(result.summary.total, 0);
    }

    #[test]
    fn suite_reports_failures_without_panicking() {
        // A slack floor above zero forces failures on sharp instances.
        let configs = vec![GeneratorConfig::new(
            GeneratorGeometry::Central,
            1,
            1,
            1.0,
            2,
            13,
        )];
        let options = SuiteOptions {
            slack_floor: 0.5,
            ..SuiteOptions::default()
        };
        let result = run_property_suite(&configs, &options).unwrap();
        assert!(!result.summary.pass);
        assert!(result.rows.iter().all(|r| !r.pass));
        assert!(result.rows[0].error.as_ref().unwrap().contains("slack floor"));
    }

    #[test]
    fn default_battery_covers_every_geometry_and_shape() {
        let configs = default_suite_configs(1);
        assert_eq!(configs.len(), 3 * 5 * 5);
        let total: usize = configs.iter().map(|c| c.count).sum();
        assert_eq!(total, 3 * 1000);
        for config in &configs {
            config.validate().unwrap();
        }
        // 1000 instances per geometry.
        for geometry in ["central", "case1", "case2"] {
            let count: usize = configs
                .iter()
                .filter(|c| c.geometry.as_str() == geometry)
                .map(|c| c.count)
                .sum();
            assert_eq!(count, 1000);
        }
    }
}
