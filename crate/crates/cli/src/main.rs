use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use g2calib::lab::{run_deformation, DeformationSpec};
use g2calib::plane::{classify_plane, Frame};
use g2calib::verify::{run_verify, Backend, VerifyConfig};
use g2calib::{Error, Vector7};
use serde::{Deserialize, Serialize};

const EXIT_INPUT: u8 = 1;
const EXIT_DEGENERATE: u8 = 2;
const EXIT_FAILED: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

#[derive(Debug, Parser)]
#[command(
    name = "g2calib",
    version,
    about = "G2 calibrated geometry: plane classification, identity checks, deformation experiments"
)]
struct Cli {
    /// Seed for the random batches.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of random samples per batch.
    #[arg(long, global = true, default_value_t = 1000)]
    samples: usize,
    /// Pass/fail tolerance (verify: 1e-9, deform: 1e-4 unless set here or in the spec).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Scalar backend (verify defaults to exact, deform is floating only).
    #[arg(long, global = true, value_enum)]
    backend: Option<BackendArg>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include per-point form values in deformation reports.
    #[arg(long, global = true)]
    dump_points: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify the plane spanned by 3 or 4 vectors (JSON file, or stdin).
    Classify { input: Option<PathBuf> },
    /// Run the identity suite.
    Verify,
    /// Run a deformation experiment (JSON spec file, or stdin).
    Deform { spec: Option<PathBuf> },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum FrameInput {
    Wrapped { vectors: Vec<Vec<f64>> },
    Bare(Vec<Vec<f64>>),
}

#[derive(Serialize)]
struct ClassifyReport<'a> {
    vectors: &'a [Vec<f64>],
    #[serde(flatten)]
    class: g2calib::plane::PlaneClass,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn read_input(path: &Option<PathBuf>) -> Result<String, Failure> {
    match path {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p)
            .map_err(|e| Failure::new(EXIT_INPUT, format!("cannot read {}: {e}", p.display()))),
        _ => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::new(EXIT_INPUT, format!("cannot read stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn emit<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("serialization failed: {e}")))?;
    text.push('\n');
    match out {
        Some(p) => fs::write(p, text)
            .map_err(|e| Failure::new(EXIT_INPUT, format!("cannot write {}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::new(EXIT_INPUT, format!("cannot write stdout: {e}"))),
    }
}

fn classify(cli: &Cli, input: &Option<PathBuf>) -> Result<u8, Failure> {
    let text = read_input(input)?;
    let parsed: FrameInput = serde_json::from_str(&text)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("malformed frame JSON: {e}")))?;
    let rows = match parsed {
        FrameInput::Wrapped { vectors } | FrameInput::Bare(vectors) => vectors,
    };
    if rows.len() != 3 && rows.len() != 4 {
        return Err(Failure::new(
            EXIT_INPUT,
            format!("expected 3 or 4 vectors, got {}", rows.len()),
        ));
    }
    let vectors = rows
        .iter()
        .map(|r| {
            if r.len() != 7 {
                return Err(Failure::new(
                    EXIT_INPUT,
                    format!("vector of length {} (expected 7)", r.len()),
                ));
            }
            Vector7::try_from_slice(r).map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let frame = Frame::new(vectors).map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))?;
    let class = classify_plane(&frame).map_err(|e| match e {
        Error::DegenerateFrame { .. } => Failure::new(EXIT_DEGENERATE, e.to_string()),
        other => Failure::new(EXIT_INPUT, other.to_string()),
    })?;
    emit(
        &cli.out,
        &ClassifyReport {
            vectors: &rows,
            class,
        },
    )?;
    Ok(0)
}

fn verify(cli: &Cli) -> Result<u8, Failure> {
    let tolerance = cli.tolerance.unwrap_or(1e-9);
    if !(tolerance >= 0.0 && tolerance.is_finite()) {
        return Err(Failure::new(
            EXIT_INPUT,
            format!("invalid tolerance {tolerance}"),
        ));
    }
    let cfg = VerifyConfig {
        seed: cli.seed,
        samples: cli.samples,
        tolerance,
        backend: match cli.backend {
            Some(BackendArg::Float) => Backend::Float,
            _ => Backend::Exact,
        },
    };
    let report = run_verify(&cfg);
    emit(&cli.out, &report)?;
    Ok(if report.all_pass { 0 } else { EXIT_FAILED })
}

#[derive(Serialize)]
struct DeformOutput {
    tolerance: f64,
    pass: bool,
    #[serde(flatten)]
    report: g2calib::lab::DeformationReport,
}

fn deform(cli: &Cli, spec_path: &Option<PathBuf>) -> Result<u8, Failure> {
    if cli.backend == Some(BackendArg::Exact) {
        return Err(Failure::new(
            EXIT_INPUT,
            "deform runs on the floating backend only",
        ));
    }
    let text = read_input(spec_path)?;
    let spec: DeformationSpec = serde_json::from_str(&text)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("malformed deformation spec: {e}")))?;
    let tolerance = cli.tolerance.or(spec.tolerance).unwrap_or(1e-4);
    let report = run_deformation(&spec, cli.dump_points)
        .map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))?;
    let pass = report.passes(tolerance);
    emit(
        &cli.out,
        &DeformOutput {
            tolerance,
            pass,
            report,
        },
    )?;
    Ok(if pass { 0 } else { EXIT_FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Classify { input } => classify(&cli, input),
        Command::Verify => verify(&cli),
        Command::Deform { spec } => deform(&cli, spec),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
