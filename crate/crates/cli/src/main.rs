//! `traceineq`: run verification suites, evaluate single instances, hunt for
//! counterexamples and print the inequality registry.
//!
//! Exit codes: 0 holds, 1 conjecture violated, 2 proved statement violated,
//! 3 usage or configuration error.

mod config;
mod error;
mod manifest;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use traceineq::catalog::{evaluate, lookup, registry, OperandKind};
use traceineq::hunter::{hunt_with_progress, HuntConfig};
use traceineq::report::{parse_real, Operand, Verdict, Witness};
use traceineq::suite::{check_suite, resolve, run_suite, VerifyConfig};
use traceineq::{ComplexMatrix, C64};

use crate::config::{parse_dims, parse_list, read_text};
use crate::error::CliError;
use crate::manifest::{results_dir, RunManifest};

const EXIT_OK: u8 = 0;
const EXIT_CONJECTURE: u8 = 1;
const EXIT_PROVED: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "traceineq",
    version,
    about = "Matrix rearrangement and trace inequality toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded verification suites (a suite name or `all`).
    Verify(VerifyArgs),
    /// Evaluate one inequality on matrices read from JSON files.
    Eval(EvalArgs),
    /// Randomized counterexample search.
    Hunt(HuntArgs),
    /// Print the inequality registry.
    Registry(RegistryArgs),
}

#[derive(Args)]
struct VerifyArgs {
    suite: String,
    /// `a..b` or a comma-separated list.
    #[arg(long)]
    dims: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    /// Results file (newline-delimited JSON).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Reuse the effective configuration recorded in a previous manifest.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct EvalArgs {
    id: String,
    #[arg(long = "A", alias = "X")]
    a: Option<PathBuf>,
    #[arg(long = "B", alias = "Y")]
    b: Option<PathBuf>,
    #[arg(long = "A1")]
    a1: Option<PathBuf>,
    #[arg(long = "A2")]
    a2: Option<PathBuf>,
    #[arg(long)]
    f: Option<PathBuf>,
    #[arg(long)]
    g: Option<PathBuf>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HuntArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct RegistryArgs {
    #[arg(long)]
    id: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Hunt(args) => cmd_hunt(args),
        Command::Registry(args) => cmd_registry(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::field("--workers", e))
}

fn list_flag(name: &str, value: &Option<String>) -> Result<Option<Vec<f64>>, CliError> {
    value
        .as_deref()
        .map(|v| parse_list(v).map_err(|e| CliError::field(format!("--{name}"), e)))
        .transpose()
}

fn real_flag(name: &str, value: &Option<String>) -> Result<Option<f64>, CliError> {
    value
        .as_deref()
        .map(|v| parse_real(v).map_err(|e| CliError::field(format!("--{name}"), e)))
        .transpose()
}

fn open_results(path: &Path) -> Result<BufWriter<File>, CliError> {
    let io = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    Ok(BufWriter::new(File::create(path).map_err(io)?))
}

fn write_line(out: &mut impl Write, path: &Path, value: &impl serde::Serialize) -> Result<(), CliError> {
    let line = serde_json::to_string(value).expect("results serialize");
    writeln!(out, "{line}")
        .and_then(|_| out.flush())
        .map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })
}

fn verify_config(
    args: &VerifyArgs,
    overrides: &mut BTreeMap<String, String>,
) -> Result<VerifyConfig, CliError> {
    let mut cfg = VerifyConfig::default();
    if let Some(path) = &args.config {
        let file = config::load(path)?;
        if let Some(q) = file.quadrature {
            cfg.quadrature = q;
        }
        if let Some(e) = file.ensembles {
            cfg.dims = e.dims.unwrap_or(cfg.dims);
            cfg.samples = e.samples.unwrap_or(cfg.samples);
            cfg.seed = e.seed.unwrap_or(cfg.seed);
        }
        if let Some(v) = file.tolerances.and_then(|t| t.verdict) {
            cfg.tolerance = v;
        }
    }
    if let Some(path) = &args.manifest {
        cfg = manifest::load_effective(path)?;
    }
    let mut note = |k: &str, v: &dyn ToString| {
        overrides.insert(k.to_string(), v.to_string());
    };
    if let Some(d) = &args.dims {
        cfg.dims = parse_dims(d).map_err(|e| CliError::field("--dims", e))?;
        note("dims", d);
    }
    if let Some(n) = args.samples {
        cfg.samples = n;
        note("samples", &n);
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
        note("seed", &s);
    }
    if let Some(t) = args.tol {
        cfg.tolerance = t;
        note("tol", &t);
    }
    for (name, raw, slot) in [
        ("p", &args.p, &mut cfg.p),
        ("r", &args.r, &mut cfg.r),
        ("s", &args.s, &mut cfg.s),
        ("t", &args.t, &mut cfg.t),
    ] {
        if let Some(list) = list_flag(name, raw)? {
            *slot = Some(list);
            note(name, raw.as_ref().expect("flag given"));
        }
    }
    Ok(cfg)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, CliError> {
    let started = Instant::now();
    let mut overrides = BTreeMap::new();
    let cfg = verify_config(&args, &mut overrides)?;
    let suites = resolve(&args.suite)?;
    for name in &suites {
        check_suite(name, &cfg)?;
    }
    let path = args
        .out
        .clone()
        .unwrap_or_else(|| results_dir().join(format!("verify-{}.ndjson", args.suite)));
    let mut out = open_results(&path)?;
    let pool = pool(args.workers)?;
    let mut totals = BTreeMap::from([
        ("evaluations", 0usize),
        ("violations", 0),
        ("evidence_violations", 0),
        ("errors", 0),
    ]);
    let mut min_margins = BTreeMap::new();
    for name in &suites {
        let section = pool.install(|| run_suite(name, &cfg))?;
        eprintln!(
            "{name}: {} evaluations, {} violations, {} errors",
            section.evaluations, section.violations, section.errors
        );
        if let Some(err) = &section.first_error {
            eprintln!("  first error: {err}");
        }
        *totals.get_mut("evaluations").unwrap() += section.evaluations;
        *totals.get_mut("violations").unwrap() += section.violations;
        *totals.get_mut("evidence_violations").unwrap() += section.evidence_violations;
        *totals.get_mut("errors").unwrap() += section.errors;
        min_margins.insert(name.to_string(), section.min_margin("").unwrap_or(f64::INFINITY));
        write_line(&mut out, &path, &section)?;
    }
    let code = if totals["violations"] > 0 || totals["errors"] > 0 {
        EXIT_PROVED
    } else {
        EXIT_OK
    };
    let summary = serde_json::json!({
        "summary": {
            "suites": suites,
            "totals": totals,
            "min_margin": min_margins,
            "exit_code": code,
        }
    });
    write_line(&mut out, &path, &summary)?;
    println!("{summary}");
    RunManifest::new(
        "verify",
        &args.suite,
        args.config.as_deref(),
        overrides,
        &path,
        &cfg,
    )
    .finish(code, started)
    .write()?;
    Ok(code)
}

fn operand_flag<'a>(args: &'a EvalArgs, name: &str) -> (&'static str, Option<&'a PathBuf>) {
    match name {
        "A" | "X" => ("--A", args.a.as_ref()),
        "B" | "Y" => ("--B", args.b.as_ref()),
        "A1" => ("--A1", args.a1.as_ref()),
        "A2" => ("--A2", args.a2.as_ref()),
        "f" => ("--f", args.f.as_ref()),
        _ => ("--g", args.g.as_ref()),
    }
}

/// A vector file is a JSON array of reals or of `[re, im]` pairs.
fn parse_vector(text: &str) -> Result<Vec<C64>, String> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Real(f64),
        Complex([f64; 2]),
    }
    let entries: Vec<Entry> = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if entries.is_empty() {
        return Err("vector is empty".into());
    }
    Ok(entries
        .into_iter()
        .map(|e| match e {
            Entry::Real(x) => C64::new(x, 0.0),
            Entry::Complex([re, im]) => C64::new(re, im),
        })
        .collect())
}

fn cmd_eval(args: EvalArgs) -> Result<u8, CliError> {
    let started = Instant::now();
    let entry = lookup(&args.id)?;
    let mut operands = BTreeMap::new();
    let mut overrides = BTreeMap::new();
    for &name in entry.operands {
        let (flag, path) = operand_flag(&args, name);
        let path = path.ok_or_else(|| CliError::field(flag, format!("required by {}", args.id)))?;
        overrides.insert(
            flag.trim_start_matches('-').to_string(),
            path.display().to_string(),
        );
        let text = read_text(path)?;
        let field = |e: &dyn ToString| CliError::field(format!("{flag} {}", path.display()), e.to_string());
        let op = match entry.operand_kind {
            OperandKind::Vector => Operand::vector(&parse_vector(&text).map_err(|e| field(&e))?),
            _ => Operand::Matrix(ComplexMatrix::from_json(&text).map_err(|e| field(&e))?),
        };
        operands.insert(name.to_string(), op);
    }
    let mut params = BTreeMap::new();
    for (name, raw) in [
        ("p", &args.p),
        ("r", &args.r),
        ("s", &args.s),
        ("t", &args.t),
        ("lambda", &args.lambda),
    ] {
        if let Some(v) = real_flag(name, raw)? {
            params.insert(name.to_string(), v);
            overrides.insert(name.to_string(), raw.clone().expect("flag given"));
        }
    }
    let tol = args.tol.unwrap_or(traceineq::tolerances::DEFAULT_VERDICT_TOL);
    let report = evaluate(&args.id, &Witness::new(operands.clone()), &params)
        .map_err(|e| {
            // Name the operand that failed the Hermitian check when there is one.
            let culprit = matches!(e, traceineq::Error::NotHermitian { .. })
                .then(|| {
                    operands.iter().find(|(_, op)| match op {
                        Operand::Matrix(m) => !m.is_hermitian(traceineq::tolerances::HERMITIAN_INPUT_TOL),
                        Operand::Vector(_) => false,
                    })
                })
                .flatten();
            match culprit {
                Some((name, _)) => CliError::field(operand_flag(&args, name).0, e),
                None => CliError::field(args.id.clone(), e),
            }
        })?
        .with_tolerance(tol);
    let code = match report.verdict {
        Verdict::Violated if report.is_proved_violation() => EXIT_PROVED,
        Verdict::Violated => EXIT_CONJECTURE,
        _ => EXIT_OK,
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    println!("{text}");
    let path = args
        .out
        .clone()
        .unwrap_or_else(|| results_dir().join(format!("eval-{}.json", args.id)));
    let mut out = open_results(&path)?;
    write_line(&mut out, &path, &report)?;
    let effective = serde_json::json!({ "params": report.params, "tolerance": tol });
    RunManifest::new("eval", &args.id, None, overrides, &path, &effective)
        .finish(code, started)
        .write()?;
    Ok(code)
}

fn cmd_hunt(args: HuntArgs) -> Result<u8, CliError> {
    let started = Instant::now();
    let file = config::load(&args.config)?;
    let mut cfg: HuntConfig = file
        .hunt
        .ok_or_else(|| CliError::Config(format!("{}: missing [hunt] section", args.config.display())))?;
    if let Some(v) = file.tolerances.and_then(|t| t.verdict) {
        cfg.tolerance = v;
    }
    let mut overrides = BTreeMap::new();
    if let Some(n) = args.restarts {
        cfg.restarts = n;
        overrides.insert("restarts".to_string(), n.to_string());
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
        overrides.insert("seed".to_string(), s.to_string());
    }
    cfg.validate()?;
    let path = args
        .out
        .clone()
        .unwrap_or_else(|| results_dir().join(format!("hunt-{}.ndjson", cfg.inequality_id)));
    let mut out = open_results(&path)?;
    let pool = pool(args.workers)?;
    let record = pool.install(|| {
        hunt_with_progress(&cfg, &|r| {
            eprintln!(
                "restart {} (dim {}): best relative slack {:.3e} at step {}, {} violations",
                r.restart, r.dim, r.best_relative_slack, r.best_step, r.violations
            );
        })
    })?;
    for summary in &record.restarts {
        write_line(&mut out, &path, summary)?;
    }
    write_line(&mut out, &path, &record)?;
    let code = if record.proved_violation() {
        EXIT_PROVED
    } else if record.found_violation() {
        EXIT_CONJECTURE
    } else {
        EXIT_OK
    };
    println!(
        "{}",
        serde_json::json!({
            "inequality_id": cfg.inequality_id,
            "trials": record.trials,
            "violations": record.violations,
            "min_relative_slack": record.best_report.relative_slack,
            "params": record.best_report.params,
            "provenance": record.provenance,
            "results": path.display().to_string(),
            "exit_code": code,
        })
    );
    RunManifest::new(
        "hunt",
        &cfg.inequality_id,
        Some(&args.config),
        overrides,
        &path,
        &cfg,
    )
    .finish(code, started)
    .write()?;
    Ok(code)
}

fn cmd_registry(args: RegistryArgs) -> Result<u8, CliError> {
    let text = match &args.id {
        Some(id) => serde_json::to_string_pretty(&lookup(id)?),
        None => serde_json::to_string_pretty(&registry()),
    }
    .expect("registry serializes");
    println!("{text}");
    Ok(EXIT_OK)
}
