//! Output documents: the per-instance analysis report, the suite summary,
//! and the comma-separated tables.  Everything here is deterministic: fixed
//! field order, fixed float formatting, no clocks.

use tan2theta::analysis::InstanceAnalysis;
use tan2theta::bounds::{MuOptimum, MuScanPoint};
use tan2theta::lab::{GeneratorConfig, SharpnessRow, SuiteRow, SuiteSummary};
use tan2theta::model::GapGeometry;
use tan2theta::subspace::SectorialityCheck;

use crate::json::{fmt_float, Json};

pub const TOOL_NAME: &str = "tan2theta";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn geometry_json(geom: &GapGeometry) -> Json {
    Json::object()
        .field("case", geom.case_tag.as_str())
        .field("mirrored", geom.case_tag.as_str() == "case2-mirrored")
        .field("alpha", geom.alpha)
        .field("beta", geom.beta)
        .field("gap_width", geom.gap_width())
        .field("d_plus", geom.d_plus)
        .field("d_minus", geom.d_minus)
        .field("sigma_minus_min", geom.sigma_minus_min)
        .field("sigma_plus_max", geom.sigma_plus_max)
}

fn sectoriality_json(check: &SectorialityCheck) -> Json {
    Json::object()
        .field("mu", check.mu)
        .field("v_mu", check.v_mu)
        .field("cos_bound", check.cos_bound)
        .field("min_symmetric_part", check.min_symmetric_part)
        .field("margin", check.margin)
        .field("orthogonality_defect", check.orthogonality_defect)
        .field("holds", check.holds)
}

/// The full analysis report document.
pub fn analysis_report(analysis: &InstanceAnalysis, digest: &str) -> Json {
    let bounds = &analysis.bounds;
    let case = bounds.case.as_ref();
    let bounds_json = Json::object()
        .field("norm_v", bounds.norm_v)
        .field("v_base", bounds.base_v)
        .field("v_inf", bounds.optimum.v_min)
        .field("mu_star", bounds.optimum.mu_star)
        .field("theta_star", bounds.optimum.theta)
        .field("evaluations", bounds.optimum.evaluations)
        .field("classical", bounds.classical)
        .field("central", bounds.central)
        .field("delta", case.map(|c| c.delta))
        .field("fixed_shift", case.map(|c| c.shift_original))
        .field("v_at_fixed_shift", bounds.v_at_fixed_shift)
        .field("case", case.map(|c| c.bound))
        .field("sin_theta", case.and_then(|c| c.sin_theta_bound));

    let angles = &analysis.angles;
    let angles_json = Json::object()
        .field("cut", angles.cut)
        .field("side", angles.side.as_str())
        .field("rank_p", angles.rank_p)
        .field("rank_q", angles.rank_q)
        .field("exact", angles.distance)
        .field("principal_angles", angles.angles.clone())
        .field("max_angle", angles.max_angle)
        .field("strictly_below_limit", angles.strictly_below_limit);

    let scan = &analysis.sign_scan;
    let persistence = &analysis.gap_persistence;
    let checks_json = Json::object()
        .field(
            "sign_identity",
            Json::object()
                .field("cut", analysis.sign_identity.cut)
                .field("norm_residual", analysis.sign_identity.norm_residual)
                .field("entry_residual", analysis.sign_identity.entry_residual),
        )
        .field("sectorial_margin", analysis.sectorial_margin())
        .field("sectoriality", sectoriality_json(&analysis.sectoriality))
        .field(
            "sectoriality_at_fixed",
            analysis
                .sectoriality_at_fixed
                .as_ref()
                .map(sectoriality_json),
        )
        .field(
            "sign_scan",
            Json::object()
                .field("lo", scan.interval.0)
                .field("hi", scan.interval.1)
                .field("samples", scan.sample_shifts.len())
                .field("max_deviation", scan.max_deviation)
                .field("intruder", scan.intruder),
        )
        .field(
            "gap_persistence",
            Json::object()
                .field("lo", persistence.lo)
                .field("hi", persistence.hi)
                .field("holds", persistence.holds)
                .field("violating", persistence.violating),
        )
        .field(
            "positivity",
            analysis.positivity.as_ref().map(|p| {
                Json::object()
                    .field("v0", p.v0)
                    .field("predicted_positive", p.predicted_positive)
                    .field("min_eig", p.min_eig)
                    .field("observed_positive", p.observed_positive)
                    .field("agrees", p.agrees)
            }),
        )
        .field(
            "diagnostics",
            analysis.diagnostics.as_ref().map(|d| {
                Json::object()
                    .field("mu", d.mu)
                    .field("kappa_plus", d.kappa_plus)
                    .field("kappa_plus_limit", d.kappa_plus_limit)
                    .field("kappa_minus", d.kappa_minus)
                    .field("kappa_minus_limit", d.kappa_minus_limit)
                    .field("equality_plus", d.equality_plus)
                    .field("equality_minus", d.equality_minus)
            }),
        );

    let mut slack_json = Json::object();
    for (name, &value) in &analysis.slack {
        slack_json = slack_json.field(name, value);
    }

    Json::object()
        .field(
            "provenance",
            Json::object()
                .field("tool", TOOL_NAME)
                .field("version", TOOL_VERSION)
                .field("input_digest", digest)
                .field("label", analysis.label.as_str()),
        )
        .field("n", analysis.n)
        .field("geometry", geometry_json(&analysis.geometry))
        .field("bounds", bounds_json)
        .field("angles", angles_json)
        .field("checks", checks_json)
        .field("slack", slack_json)
}

fn csv_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        fmt_float(x)
    }
}

fn csv_opt_float(x: Option<f64>) -> String {
    x.map(csv_float).unwrap_or_default()
}

fn csv_bool(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

/// Shift-scan table: one row per grid point plus a footer row holding the
/// refined optimum.
pub fn mu_scan_csv(rows: &[MuScanPoint], optimum: &MuOptimum) -> String {
    let mut out = String::from("mu,v_mu,theta_mu,positive_definite\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            csv_float(row.mu),
            csv_float(row.v_mu),
            csv_float(row.theta_mu),
            csv_bool(row.positive_definite),
        ));
    }
    out.push_str(&format!(
        "{},{},{},{}\n",
        csv_float(optimum.mu_star),
        csv_float(optimum.v_min),
        csv_float(optimum.theta),
        csv_bool(true),
    ));
    out
}

pub const SUITE_CSV_HEADER: &str = "id,n,geometry,v_base,v_inf,mu_star,exact,classical,central,case,sin_theta,sign_residual,sectorial_margin,gap_ok,pass";

/// Per-instance suite table with the fixed header.
pub fn suite_csv(rows: &[SuiteRow]) -> String {
    let mut out = String::from(SUITE_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            row.id,
            row.n,
            row.geometry,
            csv_float(row.v_base),
            csv_float(row.v_inf),
            csv_float(row.mu_star),
            csv_float(row.exact),
            csv_float(row.classical),
            csv_float(row.central),
            csv_opt_float(row.case_bound),
            csv_opt_float(row.sin_theta),
            csv_float(row.sign_residual),
            csv_float(row.sectorial_margin),
            row.gap_ok.map(csv_bool).unwrap_or(""),
            csv_bool(row.pass),
        ));
    }
    out
}

/// Summary document written next to the suite table.
pub fn suite_summary_json(config: &GeneratorConfig, summary: &SuiteSummary) -> Json {
    let mut min_slack = Json::object();
    for (name, &value) in &summary.min_slack {
        min_slack = min_slack.field(name, value);
    }
    Json::object()
        .field(
            "provenance",
            Json::object()
                .field("tool", TOOL_NAME)
                .field("version", TOOL_VERSION)
                .field("seed", Json::Int(config.seed as i64)),
        )
        .field(
            "config",
            Json::object()
                .field("geometry", config.geometry.as_str())
                .field("n_plus", config.n_plus)
                .field("n_minus", config.n_minus)
                .field("target_v", config.target_v)
                .field("count", config.count),
        )
        .field("total", summary.total)
        .field("passed", summary.passed)
        .field("failed", summary.failed)
        .field("min_slack", min_slack)
        .field("max_sign_residual", summary.max_sign_residual)
        .field(
            "min_sectorial_margin",
            if summary.min_sectorial_margin.is_finite() {
                Json::Float(summary.min_sectorial_margin)
            } else {
                Json::Null
            },
        )
        .field("positivity_checked", summary.positivity_checked)
        .field("positivity_agreed", summary.positivity_agreed)
        .field("positivity_inconclusive", summary.positivity_inconclusive)
        .field("form_samples", summary.form_samples)
        .field(
            "max_form_excess",
            if summary.max_form_excess.is_finite() {
                Json::Float(summary.max_form_excess)
            } else {
                Json::Null
            },
        )
        .field(
            "max_kappa_excess",
            if summary.max_kappa_excess.is_finite() {
                Json::Float(summary.max_kappa_excess)
            } else {
                Json::Null
            },
        )
        .field("pass", summary.pass)
}

pub const SHARPNESS_CSV_HEADER: &str = "w,exact,central_opt,case_bound,slack_central,slack_case";

/// Sharpness table for the 1+1 family.
pub fn sharpness_csv(rows: &[SharpnessRow]) -> String {
    let mut out = String::from(SHARPNESS_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            csv_float(row.w),
            csv_float(row.exact),
            csv_float(row.central_opt),
            csv_opt_float(row.case_bound),
            csv_float(row.slack_central),
            csv_opt_float(row.slack_case),
        ));
    }
    out
}
