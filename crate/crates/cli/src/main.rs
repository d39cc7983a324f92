//! Command-line front end: generate instances, decide orthogonality
//! preservation and conformality, decompose T = λV, run the grid labs, and
//! execute the acceptance battery. All reports are JSON (floats at 17
//! significant digits), so identical invocations are byte-identical.
//!
//! Exit codes: 0 all checks pass, 1 a verdict or property failed, 2 input or
//! parse error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::Rng;
use serde_json::{json, Map, Value};

use cstarmod::algebra::{AlgebraSignature, CentralElement, CentralProjection};
use cstarmod::json as schema;
use cstarmod::module::ModuleSignature;
use cstarmod::operator::{make_scaled_isometry, ModuleOperator};
use cstarmod::rng::seeded_rng;
use cstarmod::suite::run_acceptance_suite;
use cstarmod::theorems::{
    decide_conformal, decide_cstar_conformal, decide_orthogonality_preserving,
    decompose_lambda_v, sampled_conformal_check, sampled_cstar_conformal_check, sampled_op_check,
    DEFAULT_TOL,
};

#[derive(Parser)]
#[command(
    name = "cstarmod",
    about = "Orthogonality-preserving and conformal module operators over finite-dimensional C*-algebras",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random (algebra, module, operator) triple with declared ground truth.
    Gen(GenArgs),
    /// Decide orthogonality preservation for an operator file.
    Check(CheckArgs),
    /// Decompose an orthogonality-preserving operator as T = λV.
    Decompose(DecomposeArgs),
    /// Decide C*-conformality and conformality, with sampled cross-checks.
    Conformal(ConformalArgs),
    /// Multiplication-by-t experiment on a uniform grid of (0,1].
    Example1(Example1Args),
    /// Phase-winding experiment for the oscillating multiplier.
    Example2(Example2Args),
    /// Run the full acceptance battery.
    Suite(SuiteArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Algebra signature as comma-separated block dimensions, e.g. "2,3".
    #[arg(long, default_value = "1,1")]
    blocks: String,
    /// Module masks: one 0/1 list per component, ';'-separated, e.g. "1,1;1,0".
    /// Defaults to two full components.
    #[arg(long)]
    components: Option<String>,
    /// λ per block (comma list). Random in [0.5, 2) when omitted.
    #[arg(long)]
    lambda: Option<String>,
    /// Perturbation size ε; 0 keeps the instance exactly orthogonality-preserving.
    #[arg(long, default_value_t = 0.0)]
    perturb: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Operator file (bare operator object or a `gen` document).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Also run the sampled definitional oracle with this many trials.
    #[arg(long, default_value_t = 0)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ConformalArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Example1Args {
    /// Grid size N.
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Example2Args {
    /// Smallest grid point.
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    /// Number of samples.
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    /// json emits the full report; csv emits the divergence table.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Checks pass / verdict or property failed / parse or input error.
enum Outcome {
    Pass,
    Failed,
    BadInput(anyhow::Error),
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Pass) => ExitCode::from(0),
        Ok(Outcome::Failed) => ExitCode::from(1),
        Ok(Outcome::BadInput(e)) | Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Check(args) => cmd_check(args),
        Command::Decompose(args) => cmd_decompose(args),
        Command::Conformal(args) => cmd_conformal(args),
        Command::Example1(args) => cmd_example1(args),
        Command::Example2(args) => cmd_example2(args),
        Command::Suite(args) => cmd_suite(args),
    }
}

fn emit(output: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json(output: &Option<PathBuf>, value: &Value) -> anyhow::Result<()> {
    let mut text = schema::to_json_string(value);
    text.push('\n');
    emit(output, &text)
}

fn parse_blocks(spec: &str) -> anyhow::Result<AlgebraSignature> {
    let dims = spec
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("parsing --blocks '{spec}'"))?;
    Ok(AlgebraSignature::new(dims)?)
}

fn parse_components(
    spec: Option<&str>,
    algebra: &AlgebraSignature,
) -> anyhow::Result<ModuleSignature> {
    let components = match spec {
        None => vec![CentralProjection::full(algebra); 2],
        Some(spec) => spec
            .split(';')
            .map(|mask| {
                let bits = mask
                    .split(',')
                    .map(|b| match b.trim() {
                        "1" | "true" => Ok(true),
                        "0" | "false" => Ok(false),
                        other => Err(anyhow!("mask entry '{other}' is not 0/1")),
                    })
                    .collect::<anyhow::Result<Vec<_>>>()?;
                Ok(CentralProjection::new(algebra.clone(), bits)?)
            })
            .collect::<anyhow::Result<Vec<_>>>()?,
    };
    Ok(ModuleSignature::new(algebra.clone(), components)?)
}

fn cmd_gen(args: GenArgs) -> anyhow::Result<Outcome> {
    let algebra = match parse_blocks(&args.blocks) {
        Ok(a) => a,
        Err(e) => return Ok(Outcome::BadInput(e)),
    };
    let module = match parse_components(args.components.as_deref(), &algebra) {
        Ok(m) => m,
        Err(e) => return Ok(Outcome::BadInput(e)),
    };
    if !(args.perturb >= 0.0 && args.perturb.is_finite()) {
        return Ok(Outcome::BadInput(anyhow!("--perturb must be finite and ≥ 0")));
    }

    let mut rng = seeded_rng(args.seed);
    let lambda = match &args.lambda {
        Some(spec) => {
            let values = spec
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .with_context(|| format!("parsing --lambda '{spec}'"));
            match values {
                Ok(values) => match CentralElement::from_real(algebra.clone(), values) {
                    Ok(l) => l,
                    Err(e) => return Ok(Outcome::BadInput(e.into())),
                },
                Err(e) => return Ok(Outcome::BadInput(e)),
            }
        }
        None => {
            let values: Vec<f64> = (0..algebra.num_blocks())
                .map(|_| rng.random_range(0.5..2.0))
                .collect();
            CentralElement::from_real(algebra.clone(), values)?
        }
    };

    let isometry_seed: u64 = rng.random();
    let mut operator = match make_scaled_isometry(&module, &lambda, isometry_seed) {
        Ok(op) => op,
        Err(e) => return Ok(Outcome::BadInput(e.into())),
    };
    let ground_truth = if args.perturb > 0.0 {
        let direction = ModuleOperator::random_direction(&module, &mut rng);
        operator = operator.add(&direction.scale(Complex64::new(args.perturb, 0.0)));
        json!({
            "kind": "perturbed",
            "epsilon": args.perturb,
            "lambda": lambda.scalars().iter().map(|z| z.re).collect::<Vec<_>>(),
        })
    } else {
        json!({
            "kind": "scaled_isometry",
            "lambda": lambda.scalars().iter().map(|z| z.re).collect::<Vec<_>>(),
        })
    };

    let doc = json!({
        "schema": schema::SCHEMA_VERSION,
        "seed": args.seed,
        "algebra": schema::algebra_signature_to_value(&algebra),
        "module": schema::module_signature_to_value(&module),
        "operator": schema::operator_to_value(&operator),
        "ground_truth": ground_truth,
    });
    emit_json(&args.output, &doc)?;
    Ok(Outcome::Pass)
}

fn read_operator(path: &PathBuf) -> anyhow::Result<ModuleOperator> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value = schema::parse(&text)?;
    let op_value = value.get("operator").unwrap_or(&value);
    Ok(schema::operator_from_value(op_value)?)
}

fn cmd_check(args: CheckArgs) -> anyhow::Result<Outcome> {
    let op = match read_operator(&args.input) {
        Ok(op) => op,
        Err(e) => return Ok(Outcome::BadInput(e)),
    };
    let cert = decide_orthogonality_preserving(&op, args.tol);
    let mut doc = match schema::certificate_to_value(&cert) {
        Value::Object(map) => map,
        _ => Map::new(),
    };
    if args.trials > 0 {
        let sampled = sampled_op_check(&op, args.trials, args.seed);
        doc.insert("sampled".into(), schema::sampled_op_check_to_value(&sampled));
    }
    emit_json(&args.output, &Value::Object(doc))?;
    Ok(if cert.verdict { Outcome::Pass } else { Outcome::Failed })
}

fn cmd_decompose(args: DecomposeArgs) -> anyhow::Result<Outcome> {
    let op = match read_operator(&args.input) {
        Ok(op) => op,
        Err(e) => return Ok(Outcome::BadInput(e)),
    };
    match decompose_lambda_v(&op, args.tol) {
        Ok(dec) => {
            let reconstruction_error = dec.reconstruct().sub(&op).norm();
            let doc = json!({
                "schema": schema::SCHEMA_VERSION,
                "lambda": dec.lambda.scalars().iter().map(|z| z.re).collect::<Vec<_>>(),
                "support": dec.support.mask(),
                "isometry": schema::operator_to_value(&dec.isometry),
                "reconstruction_error": reconstruction_error,
            });
            emit_json(&args.output, &doc)?;
            Ok(Outcome::Pass)
        }
        Err(e) => {
            let doc = json!({
                "schema": schema::SCHEMA_VERSION,
                "error": e.to_string(),
            });
            emit_json(&args.output, &doc)?;
            Ok(Outcome::Failed)
        }
    }
}

fn cmd_conformal(args: ConformalArgs) -> anyhow::Result<Outcome> {
    let op = match read_operator(&args.input) {
        Ok(op) => op,
        Err(e) => return Ok(Outcome::BadInput(e)),
    };
    let cstar = decide_cstar_conformal(&op, args.tol);
    let conformal = decide_conformal(&op, args.tol);
    let sampled_cstar = sampled_cstar_conformal_check(&op, args.trials, args.seed);
    let sampled = sampled_conformal_check(&op, args.trials, args.seed ^ 1);
    let doc = json!({
        "schema": schema::SCHEMA_VERSION,
        "cstar_conformal": cstar.verdict,
        "conformal": conformal.verdict,
        "scale": cstar.scale,
        "injective": cstar.injective,
        "certificate": schema::certificate_to_value(&cstar.certificate),
        "sampled_cstar": schema::sampled_conformal_to_value(&sampled_cstar),
        "sampled_conformal": schema::sampled_conformal_to_value(&sampled),
    });
    emit_json(&args.output, &doc)?;
    Ok(if cstar.verdict { Outcome::Pass } else { Outcome::Failed })
}

fn cmd_example1(args: Example1Args) -> anyhow::Result<Outcome> {
    match cstarmod::lab::example1_report(args.n) {
        Ok(report) => {
            emit_json(&args.output, &schema::example1_report_to_value(&report))?;
            // Expected shape: orthogonality-preserving, not conformal.
            Ok(if report.op_verdict && !report.conformal_verdict {
                Outcome::Pass
            } else {
                Outcome::Failed
            })
        }
        Err(e) => Ok(Outcome::BadInput(e.into())),
    }
}

fn cmd_example2(args: Example2Args) -> anyhow::Result<Outcome> {
    match cstarmod::lab::example2_polar_report(args.n, args.eps) {
        Ok(report) => {
            match args.format {
                Format::Json => {
                    emit_json(&args.output, &schema::example2_report_to_value(&report))?
                }
                Format::Csv => emit(&args.output, &report.divergence_csv())?,
            }
            Ok(Outcome::Pass)
        }
        Err(e) => Ok(Outcome::BadInput(e.into())),
    }
}

fn cmd_suite(args: SuiteArgs) -> anyhow::Result<Outcome> {
    let report = run_acceptance_suite(args.seed);
    for outcome in &report.outcomes {
        let status = if outcome.passed { "PASS" } else { "FAIL" };
        eprintln!(
            "{status} criterion {}: {} — {}",
            outcome.id, outcome.name, outcome.detail
        );
    }
    let doc = json!({
        "schema": schema::SCHEMA_VERSION,
        "seed": args.seed,
        "all_passed": report.all_passed(),
        "criteria": report.outcomes.iter().map(|o| json!({
            "id": o.id as u64,
            "name": o.name,
            "passed": o.passed,
            "detail": o.detail,
        })).collect::<Vec<_>>(),
    });
    emit_json(&args.output, &doc)?;
    Ok(if report.all_passed() {
        Outcome::Pass
    } else {
        Outcome::Failed
    })
}
