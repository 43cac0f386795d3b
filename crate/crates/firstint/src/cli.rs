//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::builder::{analyze, Analysis, BuildConfig, FirstIntegral};
use crate::error::Error;
use crate::report::SCHEMA_VERSION;
use crate::system::{parse_spec, SystemSpec};
use crate::verify::{verify_integrals, VerificationReport, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNSOLVABLE: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Analyze,
    Verify,
    Emit,
}

#[derive(Debug, Parser)]
#[command(name = "firstint", version, about = "first integrals of constant-coefficient linear systems")]
pub struct CliConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// system spec (json)
    pub input: PathBuf,
    /// write the json report here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// structural tolerance for rank and eigen decisions
    #[arg(long, value_parser = positive_f64)]
    pub tol: Option<f64>,
    #[arg(long, value_parser = positive_usize)]
    pub trajectories: Option<usize>,
    #[arg(long, value_parser = positive_f64)]
    pub step: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// report every candidate integral, not only the selected general integral
    #[arg(long)]
    pub exhaustive: bool,
    /// exit with code 3 when the system is not completely solvable
    #[arg(long)]
    pub require_solvable: bool,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("expected a positive integer, got {s:?}")),
    }
}

#[derive(Serialize)]
struct IntegralOut<'a> {
    #[serde(flatten)]
    integral: &'a FirstIntegral,
    selected: bool,
}

#[derive(Serialize)]
struct Report<'a> {
    schema_version: u32,
    command: Command,
    seed: u64,
    system: SystemSummary,
    analysis: &'a Analysis,
    general_integral: Vec<String>,
    integrals: Vec<IntegralOut<'a>>,
    verification: Option<&'a VerificationReport>,
}

#[derive(Serialize)]
struct SystemSummary {
    kind: String,
    n: usize,
    m: usize,
    forced: bool,
    tol: f64,
}

#[derive(Serialize)]
struct ErrorOut {
    error: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    at: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residuals: Option<Vec<f64>>,
    exit_code: i32,
}

fn error_json(e: &Error, code: i32) -> String {
    let (kind, at, residuals) = match e {
        Error::Input { at, .. } => ("input", Some(at.clone()), None),
        Error::Numerical { residuals, .. } => ("numerical", None, Some(residuals.clone())),
        Error::Structural { .. } => ("structural", None, None),
        Error::Precondition { .. } => ("precondition", None, None),
        Error::Domain { .. } => ("domain", None, None),
    };
    let out = ErrorOut { error: kind, message: e.to_string(), at, residuals, exit_code: code };
    serde_json::to_string(&out).unwrap_or_else(|_| format!("{{\"error\":\"{kind}\"}}"))
}

/// Result of one invocation: exit code plus the text destined for each stream.
#[derive(Debug, Clone, Default)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    /// the json report, also written to --out when given
    pub report: Option<String>,
}

fn fail(e: &Error, code: i32) -> CliOutput {
    CliOutput { code, stderr: error_json(e, code) + "\n", ..Default::default() }
}

fn load(cfg: &CliConfig) -> Result<SystemSpec, Error> {
    let bytes = std::fs::read(&cfg.input).map_err(|e| Error::input("input", format!("cannot read {}: {e}", cfg.input.display())))?;
    let mut spec = parse_spec(&bytes)?;
    if let Some(t) = cfg.tol {
        spec.tol = t;
    }
    Ok(spec)
}

fn summary(spec: &SystemSpec, a: &Analysis, integrals: &[FirstIntegral], ver: Option<&VerificationReport>) -> String {
    let mut s = String::new();
    s += &format!("system: {:?} n={} m={}\n", spec.kind, spec.n, spec.m);
    s += &format!(
        "solvable: {} (commutator residual {:.3e})\n",
        a.verdict.solvable, a.verdict.max_commutator_residual
    );
    if let Some(asm) = &a.assembly {
        s += &format!(
            "general integral: rank {}/{} with {} autonomous and {} time-dependent\n",
            asm.rank,
            asm.target_total,
            asm.autonomous_count,
            asm.selected.len() - asm.autonomous_count
        );
    }
    for (i, f) in integrals.iter().enumerate() {
        s += &format!("F{} = {}\n", i + 1, f.render());
    }
    for w in &a.warnings {
        s += &format!("warning: {w}\n");
    }
    if let Some(v) = ver {
        for (i, c) in v.integrals.iter().enumerate() {
            s += &format!(
                "F{}: lie {:.2e} drift {:.2e} {}\n",
                i + 1,
                c.max_lie_residual,
                c.max_trajectory_drift,
                if c.passed { "ok" } else { "FAIL" }
            );
        }
        if let Some(g) = v.path_independence_gap {
            s += &format!("path independence gap: {g:.3e}\n");
        }
        let state = match (a.verdict.solvable, v.passed) {
            (false, _) => "skipped, the system is not completely solvable",
            (true, true) => "passed",
            (true, false) => "failed",
        };
        s += &format!("verification: {state}\n");
    }
    s
}

/// Run one already-parsed invocation.
pub fn execute(cfg: &CliConfig) -> CliOutput {
    let spec = match load(cfg) {
        Ok(s) => s,
        Err(e) => return fail(&e, EXIT_INPUT),
    };
    let bcfg = BuildConfig { seed: cfg.seed, exhaustive: cfg.exhaustive, ..Default::default() };
    let analysis = match analyze(&spec, &bcfg) {
        Ok(a) => a,
        Err(e @ Error::Input { .. }) => return fail(&e, EXIT_INPUT),
        Err(e) => return fail(&e, EXIT_VERIFY),
    };
    let unsolvable = !analysis.verdict.solvable;
    let selected = analysis.assembly.as_ref().map(|a| a.selected.clone()).unwrap_or_default();
    let chosen = analysis.integrals();
    let listed: Vec<IntegralOut> = if cfg.exhaustive {
        analysis.candidates.iter().enumerate().map(|(i, f)| IntegralOut { integral: f, selected: selected.contains(&i) }).collect()
    } else {
        selected.iter().map(|&i| IntegralOut { integral: &analysis.candidates[i], selected: true }).collect()
    };

    let mut vcfg = VerifyConfig { seed: cfg.seed, ..Default::default() };
    if let Some(n) = cfg.trajectories {
        vcfg.trajectories = n;
    }
    if let Some(h) = cfg.step {
        vcfg.step = h;
    }
    let verification = if cfg.command == Command::Verify {
        match verify_integrals(&spec, &analysis.verdict, &chosen, &vcfg) {
            Ok(v) => Some(v),
            Err(e) => return fail(&e, EXIT_VERIFY),
        }
    } else {
        None
    };

    let mut out = CliOutput::default();
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: cfg.command,
        seed: cfg.seed,
        system: SystemSummary {
            kind: format!("{:?}", spec.kind).to_lowercase(),
            n: spec.n,
            m: spec.m,
            forced: spec.has_forcing(),
            tol: spec.tol,
        },
        analysis: &analysis,
        general_integral: chosen.iter().map(|f| f.render()).collect(),
        integrals: listed,
        verification: verification.as_ref(),
    };
    let json = if cfg.command == Command::Emit {
        #[derive(Serialize)]
        struct Emit<'a> {
            schema_version: u32,
            integrals: Vec<IntegralOut<'a>>,
        }
        serde_json::to_string_pretty(&Emit { schema_version: SCHEMA_VERSION, integrals: report.integrals })
    } else {
        serde_json::to_string_pretty(&report)
    };
    let json = match json {
        Ok(j) => j + "\n",
        Err(e) => return fail(&Error::structural(e.to_string()), EXIT_VERIFY),
    };

    if cfg.command == Command::Emit {
        let exprs: Vec<&FirstIntegral> =
            if cfg.exhaustive { analysis.candidates.iter().collect() } else { selected.iter().map(|&i| &analysis.candidates[i]).collect() };
        for f in exprs {
            out.stdout += &f.render();
            out.stdout.push('\n');
        }
    } else if cfg.out.is_some() {
        out.stdout = summary(&spec, &analysis, &chosen, verification.as_ref());
    } else {
        out.stdout = json.clone();
    }
    out.report = Some(json);

    out.code = if unsolvable && (cfg.require_solvable || cfg.command == Command::Verify) {
        let e = Error::precondition(match analysis.verdict.offending_pair {
            Some((a, b)) => format!("system is not completely solvable (directions {} and {} do not commute)", a + 1, b + 1),
            None => "system is not completely solvable (forcing is incompatible)".to_string(),
        });
        out.stderr = error_json(&e, EXIT_UNSOLVABLE) + "\n";
        EXIT_UNSOLVABLE
    } else if verification.as_ref().is_some_and(|v| !v.passed) {
        out.stderr = error_json(&Error::numerical("verification failed", vec![]), EXIT_VERIFY) + "\n";
        EXIT_VERIFY
    } else {
        EXIT_OK
    };
    out
}

/// Parse argv, run, write streams and the --out file; returns the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match CliConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let err = Error::input("argv", e.to_string().trim().to_string());
            eprintln!("{}", error_json(&err, EXIT_INPUT));
            return EXIT_INPUT;
        }
    };
    let out = execute(&cfg);
    if let (Some(path), Some(report)) = (&cfg.out, &out.report) {
        if let Err(e) = std::fs::write(path, report) {
            let err = Error::input("--out", format!("cannot write {}: {e}", path.display()));
            eprintln!("{}", error_json(&err, EXIT_INPUT));
            return EXIT_INPUT;
        }
    }
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    out.code
}
