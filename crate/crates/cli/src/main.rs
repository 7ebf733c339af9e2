//! Command-line front end: analyze one instance, scan the shift curve,
//! run the randomized property suite, or tabulate the 1+1 sharpness family.
//!
//! Exit codes: 0 success; 1 property/sharpness violations (the run itself
//! completed); 2 malformed input or flags; 3 no usable spectral gap;
//! 4 internal invariant violation (a tool bug, reported with the instance
//! digest).

// `!(value cmp threshold)` is deliberate: NaN must count as a violation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod instance;
mod json;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tan2theta::analysis::{analyze, AnalysisOptions, DEFAULT_CONSTANCY_SAMPLES};
use tan2theta::bounds::{optimize_shift, scan_table, DEFAULT_GRID_POINTS};
use tan2theta::lab::{
    run_property_suite, sharpness_study, GeneratorConfig, GeneratorGeometry, SuiteOptions,
    DEFAULT_FORM_SAMPLES,
};
use tan2theta::model::{assemble, detect_gap, RelativeBoundEvaluator};
use tan2theta::{Error, EPS_SPEC_FACTOR, SLACK_TOLERANCE};

use instance::InstanceFile;

/// Sharpness rows must collapse onto the exact rotation within this.
const SHARPNESS_ASSERTION_TOLERANCE: f64 = 1e-6;

#[derive(Parser)]
#[command(
    name = "tan2theta",
    version,
    about = "Exact spectral subspace rotation vs. its computable bounds",
    propagate_version = true
)]
struct Cli {
    /// Scale factor of the spectral safety band.
    #[arg(long = "tol-spec", global = true, default_value_t = EPS_SPEC_FACTOR)]
    tol_spec: f64,

    /// Grid resolution of the shift optimizer's first pass.
    #[arg(long = "grid-points", global = true, default_value_t = DEFAULT_GRID_POINTS)]
    grid_points: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArg {
    /// Output file path.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Full analysis of one instance document; writes a report document.
    Analyze {
        /// Instance document path.
        input: PathBuf,
        #[command(flatten)]
        out: OutputArg,
        /// Test hook: fail (exit 4) when any slack drops below this floor.
        #[arg(long = "slack-floor", hide = true)]
        slack_floor: Option<f64>,
    },
    /// Tabulates the shift-dependent relative bound over the guarded gap.
    #[command(name = "mu-scan")]
    MuScan {
        /// Instance document path.
        input: PathBuf,
        #[command(flatten)]
        out: OutputArg,
        /// Number of grid points (at least 3).
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        points: usize,
    },
    /// Runs the randomized property suite for one generator configuration.
    Suite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Instances to generate (0 writes a header-only table).
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Spectral geometry: central, case1, case2, or case2-mirrored.
        #[arg(long, default_value = "central")]
        geometry: String,
        /// Block dimensions as P,M.
        #[arg(long, default_value = "1,1", value_parser = parse_dims)]
        dims: (usize, usize),
        /// Base relative coupling strength every instance is rescaled to.
        #[arg(long = "target-v", default_value_t = 1.0)]
        target_v: f64,
        #[command(flatten)]
        out: OutputArg,
        /// Test hook: rows fail when any slack drops below this floor.
        #[arg(long = "slack-floor", hide = true)]
        slack_floor: Option<f64>,
        /// Random vectors per instance for the quadratic-form inequality.
        #[arg(long = "form-samples", hide = true, default_value_t = DEFAULT_FORM_SAMPLES)]
        form_samples: usize,
    },
    /// Sharpness table for the 1+1 family over a grid of couplings.
    Sharpness {
        /// Upper edge of the lower cluster.
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        /// Lower edge of the upper cluster.
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        /// Comma-separated coupling strengths.
        #[arg(long = "w-grid", value_delimiter = ',', required = true, allow_hyphen_values = true)]
        w_grid: Vec<f64>,
        #[command(flatten)]
        out: OutputArg,
    },
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected P,M, got {s:?}"));
    }
    let p = parts[0]
        .trim()
        .parse::<usize>()
        .map_err(|e| format!("bad plus dimension {:?}: {e}", parts[0]))?;
    let m = parts[1]
        .trim()
        .parse::<usize>()
        .map_err(|e| format!("bad minus dimension {:?}: {e}", parts[1]))?;
    Ok((p, m))
}

/// A command failure carrying its exit code; the message goes to stderr.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
        }
    }
}

/// Maps library errors onto the exit-code classes: spectral-structure
/// failures (3), internal invariant violations (4), and everything else —
/// malformed data or flags (2).
fn classify(err: &Error) -> u8 {
    match err {
        Error::NoGap { .. }
        | Error::NearSingular { .. }
        | Error::AmbiguousCut { .. }
        | Error::ShiftOutsideGap { .. }
        | Error::ClusterMismatch { .. } => 3,
        Error::Internal { .. }
        | Error::NoConvergence { .. }
        | Error::NonFiniteFunctionValue { .. } => 4,
        _ => 2,
    }
}

fn library_failure(err: Error, context: &str) -> Failure {
    Failure::new(classify(&err), format!("{context}: {err}"))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::new(2, format!("cannot write {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<InstanceFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(2, format!("cannot read {}: {e}", path.display())))?;
    InstanceFile::parse(&text).map_err(|msg| Failure::new(2, format!("{}: {msg}", path.display())))
}

fn analysis_options(cli_tol: f64, cli_grid: usize) -> Result<AnalysisOptions, Failure> {
    let options = AnalysisOptions {
        eps_factor: cli_tol,
        grid_points: cli_grid,
        constancy_samples: DEFAULT_CONSTANCY_SAMPLES,
    };
    options
        .validate()
        .map_err(|e| Failure::new(2, format!("invalid flags: {e}")))?;
    Ok(options)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap reports usage errors with exit code 2 and help/version
            // output with exit code 0.
            let code = u8::try_from(e.exit_code()).unwrap_or(2);
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let result = match &cli.command {
        Command::Analyze {
            input,
            out,
            slack_floor,
        } => cmd_analyze(&cli, input, &out.output, *slack_floor),
        Command::MuScan { input, out, points } => cmd_mu_scan(&cli, input, &out.output, *points),
        Command::Suite {
            seed,
            count,
            geometry,
            dims,
            target_v,
            out,
            slack_floor,
            form_samples,
        } => cmd_suite(
            &cli,
            *seed,
            *count,
            geometry,
            *dims,
            *target_v,
            &out.output,
            *slack_floor,
            *form_samples,
        ),
        Command::Sharpness {
            alpha,
            beta,
            w_grid,
            out,
        } => cmd_sharpness(&cli, *alpha, *beta, w_grid, &out.output),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn cmd_analyze(
    cli: &Cli,
    input: &Path,
    output: &Path,
    slack_floor: Option<f64>,
) -> Result<(), Failure> {
    let options = analysis_options(cli.tol_spec, cli.grid_points)?;
    let instance = load_instance(input)?;
    let digest = instance.digest();
    let spec = instance
        .to_spec()
        .map_err(|e| library_failure(e, "invalid instance"))?;
    let analysis = analyze(&spec, instance.hint, &options)
        .map_err(|e| library_failure(e, "analysis failed"))?;

    let mut violations = analysis.validate();
    if let Some(floor) = slack_floor {
        for (name, &slack) in &analysis.slack {
            if !(slack >= floor) {
                violations.push(format!("slack floor violated for \"{name}\": {slack:.3e}"));
            }
        }
    }
    if !violations.is_empty() {
        return Err(Failure::new(
            4,
            format!(
                "internal invariant violation on instance {digest}: {}",
                violations.join("; ")
            ),
        ));
    }

    write_file(output, &report::analysis_report(&analysis, &digest).to_document())?;

    let mut tightest = ("classical", analysis.bounds.classical);
    for (name, value) in [
        ("central", Some(analysis.bounds.central)),
        ("case", analysis.bounds.case.as_ref().map(|c| c.bound)),
        (
            "sin_theta",
            analysis.bounds.case.as_ref().and_then(|c| c.sin_theta_bound),
        ),
    ] {
        if let Some(value) = value {
            if value < tightest.1 {
                tightest = (name, value);
            }
        }
    }
    println!(
        "{}: exact = {:.10}, tightest bound = {} ({:.10}), slack = {:.3e}",
        analysis.label,
        analysis.angles.distance,
        tightest.0,
        tightest.1,
        tightest.1 - analysis.angles.distance,
    );
    Ok(())
}

fn cmd_mu_scan(cli: &Cli, input: &Path, output: &Path, points: usize) -> Result<(), Failure> {
    if points < 3 {
        return Err(Failure::new(
            2,
            format!("--points must be at least 3, got {points}"),
        ));
    }
    let options = analysis_options(cli.tol_spec, cli.grid_points)?;
    let instance = load_instance(input)?;
    let spec = instance
        .to_spec()
        .map_err(|e| library_failure(e, "invalid instance"))?;
    let pair = assemble(&spec, options.eps_factor)
        .map_err(|e| library_failure(e, "cannot assemble instance"))?;
    let geometry = detect_gap(pair.decomp_a(), pair.j(), instance.hint, options.eps_factor)
        .map_err(|e| library_failure(e, "gap detection failed"))?;
    let evaluator = RelativeBoundEvaluator::new(&pair)
        .map_err(|e| library_failure(e, "cannot prepare the shift evaluator"))?;
    let rows = scan_table(&evaluator, &geometry, points, options.eps_factor)
        .map_err(|e| library_failure(e, "shift scan failed"))?;
    let optimum = optimize_shift(&evaluator, &geometry, options.grid_points, options.eps_factor)
        .map_err(|e| library_failure(e, "shift optimization failed"))?;

    write_file(output, &report::mu_scan_csv(&rows, &optimum))?;
    println!(
        "{}: {} grid points over [{:.10}, {:.10}], v_min = {:.10} at mu_star = {:.10}",
        instance.label,
        rows.len(),
        rows[0].mu,
        rows[rows.len() - 1].mu,
        optimum.v_min,
        optimum.mu_star,
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_suite(
    cli: &Cli,
    seed: u64,
    count: usize,
    geometry: &str,
    dims: (usize, usize),
    target_v: f64,
    output: &Path,
    slack_floor: Option<f64>,
    form_samples: usize,
) -> Result<(), Failure> {
    let geometry = GeneratorGeometry::parse(geometry)
        .map_err(|e| Failure::new(2, format!("invalid flags: {e}")))?;
    let config = GeneratorConfig::new(geometry, dims.0, dims.1, target_v, count, seed);
    config
        .validate()
        .map_err(|e| Failure::new(2, format!("invalid flags: {e}")))?;
    let options = SuiteOptions {
        analysis: analysis_options(cli.tol_spec, cli.grid_points)?,
        vad_samples: form_samples,
        slack_floor: slack_floor.unwrap_or(-SLACK_TOLERANCE),
    };

    let result = run_property_suite(std::slice::from_ref(&config), &options)
        .map_err(|e| library_failure(e, "suite failed to run"))?;

    write_file(output, &report::suite_csv(&result.rows))?;
    let summary_path = summary_sidecar_path(output);
    write_file(
        &summary_path,
        &report::suite_summary_json(&config, &result.summary).to_document(),
    )?;

    println!(
        "suite: {} instances, {} passed, {} failed (summary: {})",
        result.summary.total,
        result.summary.passed,
        result.summary.failed,
        summary_path.display(),
    );
    if result.summary.pass {
        Ok(())
    } else {
        let mut details: Vec<String> = result
            .rows
            .iter()
            .filter(|r| !r.pass)
            .take(5)
            .map(|r| {
                format!(
                    "{}: {}",
                    r.id,
                    r.error.as_deref().unwrap_or("unspecified violation")
                )
            })
            .collect();
        if result.summary.failed > details.len() {
            details.push(format!("... and {} more", result.summary.failed - details.len()));
        }
        Err(Failure::new(
            1,
            format!(
                "{} of {} instances violated a property:\n  {}",
                result.summary.failed,
                result.summary.total,
                details.join("\n  ")
            ),
        ))
    }
}

fn summary_sidecar_path(output: &Path) -> PathBuf {
    let mut name = output
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "suite".to_string());
    name.push_str(".summary.json");
    output.with_file_name(name)
}

fn cmd_sharpness(
    cli: &Cli,
    alpha: f64,
    beta: f64,
    w_grid: &[f64],
    output: &Path,
) -> Result<(), Failure> {
    if w_grid.is_empty() {
        return Err(Failure::new(2, "--w-grid must contain at least one coupling"));
    }
    if !(alpha < beta) || !alpha.is_finite() || !beta.is_finite() {
        return Err(Failure::new(
            2,
            format!("gap edges must satisfy alpha < beta, got ({alpha}, {beta})"),
        ));
    }
    let options = analysis_options(cli.tol_spec, cli.grid_points)?;
    let rows = sharpness_study(alpha, beta, w_grid, &options)
        .map_err(|e| library_failure(e, "sharpness study failed"))?;

    write_file(output, &report::sharpness_csv(&rows))?;

    let mut worst: Option<(f64, f64)> = None;
    for row in &rows {
        let mut excess = row.slack_central.abs();
        if let Some(slack_case) = row.slack_case {
            excess = excess.max(slack_case.abs());
        }
        if excess > SHARPNESS_ASSERTION_TOLERANCE
            && worst.map(|(_, e)| excess > e).unwrap_or(true)
        {
            worst = Some((row.w, excess));
        }
    }
    println!(
        "sharpness: {} rows over ({:.10}, {:.10}); max |slack| = {:.3e}",
        rows.len(),
        alpha,
        beta,
        rows.iter()
            .map(|r| r.slack_central.abs().max(r.slack_case.map(f64::abs).unwrap_or(0.0)))
            .fold(0.0f64, f64::max),
    );
    match worst {
        None => Ok(()),
        Some((w, excess)) => Err(Failure::new(
            1,
            format!(
                "sharpness assertion failed at w = {w}: bound misses the exact rotation by {excess:.3e}"
            ),
        )),
    }
}
