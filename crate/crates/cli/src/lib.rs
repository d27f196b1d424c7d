//! Command-line frontend for `hermite-obs-core`: configuration merging,
//! dispatch to the numerical modules and bit-stable report emission.

pub mod commands;
pub mod config;
pub mod emit;

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand};
use serde_json::json;

use config::{load_config, merge, Flags, Resolved, RunConfig};
use emit::{emit, sha256_hex, to_json, Bundle, Outcome};
use hermite_obs_core::gram::{DEFAULT_C_KOV, DEFAULT_C_SOBOLEV};
use hermite_obs_core::poly::tail_constant_cn;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONTRACT: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(hermite_obs_core::Error),
    Io(String),
}

impl From<hermite_obs_core::Error> for CliError {
    fn from(e: hermite_obs_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(hermite_obs_core::Error::PrecisionCeiling { .. }) => EXIT_PRECISION,
            CliError::Core(_) => EXIT_CONTRACT,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "hermite-obs", version, about = "Spectral inequalities on Hermite spaces and Galerkin-scale controllability")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the graded-lexicographic basis of E_N, optionally evaluated at points.
    Basis(Flags),
    /// Restriction Gram matrix of a region on E_N.
    Gram(Flags),
    /// Spectral constant C_N(ω) with the matching theoretical bound.
    Constant(Flags),
    /// C_N over a list of cutoffs with growth fits.
    Scaling(Flags),
    /// Theoretical bounds over a list of cutoffs.
    Bounds(Flags),
    /// Remez constants for a degree and measure ratio.
    Remez(Flags),
    /// Bernstein and weighted estimates on a seeded random expansion.
    Bernstein(Flags),
    /// Tail constant c_n and single Hermite function tails.
    Tails(Flags),
    /// Hamilton map and singular space of a quadratic symbol.
    Symbol(Flags),
    /// Weyl quantization of a symbol on E_N.
    Quantize(Flags),
    /// Truncated semigroup and dissipation of high modes.
    Evolve(Flags),
    /// Observability constants; several horizons give a blowup study.
    Observability(Flags),
    /// HUM or staircase control synthesis.
    Control(Flags),
    /// Randomized property suites.
    Verify(Flags),
}

impl Command {
    fn parts(&self) -> (&'static str, &Flags) {
        match self {
            Command::Basis(f) => ("basis", f),
            Command::Gram(f) => ("gram", f),
            Command::Constant(f) => ("constant", f),
            Command::Scaling(f) => ("scaling", f),
            Command::Bounds(f) => ("bounds", f),
            Command::Remez(f) => ("remez", f),
            Command::Bernstein(f) => ("bernstein", f),
            Command::Tails(f) => ("tails", f),
            Command::Symbol(f) => ("symbol", f),
            Command::Quantize(f) => ("quantize", f),
            Command::Evolve(f) => ("evolve", f),
            Command::Observability(f) => ("observability", f),
            Command::Control(f) => ("control", f),
            Command::Verify(f) => ("verify", f),
        }
    }
}

fn dispatch(name: &str, r: &Resolved) -> Result<Bundle, CliError> {
    match name {
        "basis" => commands::basis(r),
        "gram" => commands::gram(r),
        "constant" => commands::constant(r),
        "scaling" => commands::scaling(r),
        "bounds" => commands::bounds(r),
        "remez" => commands::remez(r),
        "bernstein" => commands::bernstein(r),
        "tails" => commands::tails(r),
        "symbol" => commands::symbol(r),
        "quantize" => commands::quantize(r),
        "evolve" => commands::evolve_cmd(r),
        "observability" => commands::observability(r),
        "control" => commands::control(r),
        "verify" => commands::verify(r),
        other => Err(CliError::Usage(format!("unknown subcommand `{other}`"))),
    }
}

/// Output of one invocation.
pub struct RunOutput {
    pub code: i32,
    /// JSON document printed on stdout.
    pub stdout: String,
    /// Human-readable summary and diagnostics.
    pub stderr: String,
}

fn provenance(command: &str, r: &Resolved) -> serde_json::Value {
    let config = r.hashed_config();
    let hash = sha256_hex(to_json(config.clone()).as_bytes());
    let c_n = tail_constant_cn(r.n).map(|c| c.c_n).unwrap_or(f64::NAN);
    json!({
        "tool": "hermite-obs",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "config_hash": hash,
        "seed": r.seed,
        "defaults": {
            "C_sobolev": r.config.c_sobolev.unwrap_or(DEFAULT_C_SOBOLEV),
            "C_kov": r.config.c_kov.unwrap_or(DEFAULT_C_KOV),
            "c_n": c_n,
            "precision_start_bits": r.policy.start_bits,
            "precision_max_bits": r.policy.max_bits,
        },
    })
}

fn execute(cli: Cli) -> Result<(i32, String, String), CliError> {
    let (name, flags) = cli.command.parts();
    let file = match &flags.config {
        Some(p) => load_config(p)?,
        None => RunConfig::default(),
    };
    let (merged, warnings) = merge(name, file, flags)?;
    let resolved = Resolved::new(merged, warnings)?;
    let bundle = hermite_obs_core::with_precision(resolved.policy.start_bits, || dispatch(name, &resolved))?;
    let doc = json!({
        "provenance": provenance(name, &resolved),
        "result": bundle.result,
        "warnings": resolved.warnings,
        "outcome": match bundle.outcome {
            Outcome::Ok => "ok",
            Outcome::PrecisionCeiling => "precision_ceiling",
            Outcome::Failed => "failed",
        },
    });
    let text = to_json(doc);
    let mut stderr = String::new();
    for w in &resolved.warnings {
        stderr.push_str(&format!("warning: {w}\n"));
    }
    stderr.push_str(&bundle.summary);
    if let Some(dir) = &resolved.config.out {
        let plot = resolved.flag(resolved.config.plot_data);
        emit(name, &text, &bundle, dir, resolved.flag(resolved.config.mkdirs), plot)?;
    }
    let code = match bundle.outcome {
        Outcome::Ok => EXIT_OK,
        Outcome::PrecisionCeiling => EXIT_PRECISION,
        Outcome::Failed => EXIT_CONTRACT,
    };
    Ok((code, text, stderr))
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            return RunOutput { code, stdout: String::new(), stderr: e.render().to_string() };
        }
    };
    match execute(cli) {
        Ok((code, stdout, stderr)) => RunOutput { code, stdout, stderr },
        Err(e) => RunOutput { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

/// Writes a [`RunOutput`] to the process streams.
pub fn print(out: &RunOutput) {
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
}
