//! `sharpthresh` experiment driver.

mod commands;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use sharpthresh::error::Category;

use crate::output::Format;

pub const WORKERS_ENV: &str = "SHARPTHRESH_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "sharpthresh", version, about = "Influences, spectra, sharp thresholds and Johnson-Mehl percolation")]
struct Cli {
    /// JSON file with default values for the subcommand's flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file, written atomically; stdout when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-coordinate influences of a function on a product space.
    Influence(commands::InfluenceArgs),
    /// Walsh spectrum of the dyadic lift and the concentration search.
    Spectrum(commands::SpectrumArgs),
    #[command(subcommand)]
    Threshold(ThresholdCommand),
    #[command(subcommand)]
    Ineq(IneqCommand),
    #[command(subcommand)]
    Jm(JmCommand),
    /// Runs the acceptance battery and prints a pass/fail table.
    Accept(commands::AcceptArgs),
}

#[derive(Debug, Subcommand)]
enum ThresholdCommand {
    /// g(h) along the three-point path.
    Curve(commands::CurveArgs),
    /// Sharp-threshold certificate for one event.
    Verify(commands::VerifyArgs),
}

#[derive(Debug, Subcommand)]
enum IneqCommand {
    /// One inequality on one instance at a given constant.
    Check(commands::CheckArgs),
    /// Extremal constant over a test family.
    Frontier(commands::FrontierArgs),
}

#[derive(Debug, Subcommand)]
enum JmCommand {
    /// Crossing frequencies over a grid of colour probabilities.
    Sweep(commands::SweepArgs),
    /// PPM image of one coloured tessellation.
    Render(commands::RenderArgs),
}

#[derive(Debug)]
pub struct CliError {
    pub category: &'static str,
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn schema(message: impl Into<String>) -> Self {
        Self { category: "schema", code: 2, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self { category: "io", code: 5, message: message.into() }
    }

    pub fn acceptance(message: impl Into<String>) -> Self {
        Self { category: "acceptance", code: 6, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.category, self.message)
    }
}

impl From<sharpthresh::Error> for CliError {
    fn from(e: sharpthresh::Error) -> Self {
        let (category, code) = match e.category() {
            Category::Schema => ("schema", 2),
            Category::SizeLimit => ("size_limit", 3),
            Category::Hypothesis => ("hypothesis", 4),
            Category::Other => ("runtime", 1),
        };
        Self { category, code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::io(e.to_string())
    }
}

/// Flag values layered over the config file.
pub struct Layers {
    config: Map<String, Value>,
    command: &'static str,
}

impl Layers {
    /// Deserializes `T` from the config object with every set flag on top.
    pub fn resolve<T: Serialize + DeserializeOwned>(&self, flags: &T) -> Result<T, CliError> {
        let mut merged = self.config.clone();
        if let Some(cmd) = merged.remove("command") {
            if cmd.as_str() != Some(self.command) {
                return Err(CliError::schema(format!(
                    "config is for command {cmd}, running {:?}",
                    self.command
                )));
            }
        }
        let Value::Object(set) = serde_json::to_value(flags).expect("flags serialize") else {
            unreachable!("argument structs serialize to objects")
        };
        for (k, v) in set {
            if v.is_null() || v == Value::Bool(false) || v == Value::Array(Vec::new()) {
                continue;
            }
            merged.insert(k, v);
        }
        serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::schema(format!("config: {e}")))
    }
}

fn load_config(path: Option<&PathBuf>) -> Result<Map<String, Value>, CliError> {
    let Some(path) = path else {
        return Ok(Map::new());
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(CliError::schema(format!("{}: config must be a JSON object", path.display()))),
        Err(e) => Err(CliError::schema(format!("{}: {e}", path.display()))),
    }
}

fn configure_workers() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::schema(format!("{WORKERS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::io(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_workers()?;
    let mut config = load_config(cli.config.as_ref())?;
    let output = match (cli.output, config.remove("output")) {
        (Some(p), _) => Some(p),
        (None, Some(Value::String(p))) => Some(PathBuf::from(p)),
        (None, Some(v)) => return Err(CliError::schema(format!("output must be a path, got {v}"))),
        (None, None) => None,
    };
    let format = match (cli.format, config.remove("format")) {
        (Some(f), _) => f,
        (None, Some(v)) => serde_json::from_value(v).map_err(|e| CliError::schema(format!("format: {e}")))?,
        (None, None) => Format::Csv,
    };
    let command = match &cli.command {
        Command::Influence(_) => "influence",
        Command::Spectrum(_) => "spectrum",
        Command::Threshold(ThresholdCommand::Curve(_)) => "threshold curve",
        Command::Threshold(ThresholdCommand::Verify(_)) => "threshold verify",
        Command::Ineq(IneqCommand::Check(_)) => "ineq check",
        Command::Ineq(IneqCommand::Frontier(_)) => "ineq frontier",
        Command::Jm(JmCommand::Sweep(_)) => "jm sweep",
        Command::Jm(JmCommand::Render(_)) => "jm render",
        Command::Accept(_) => "accept",
    };
    let layers = Layers { config, command };
    let emit_report = |(report, resolved): (output::Report, Value)| -> Result<(), CliError> {
        let bytes = report.render(command, &resolved, format)?;
        output::emit(&bytes, output.as_deref())
    };
    match &cli.command {
        Command::Influence(a) => emit_report(commands::influence(&layers.resolve(a)?)?),
        Command::Spectrum(a) => emit_report(commands::spectrum(&layers.resolve(a)?)?),
        Command::Threshold(ThresholdCommand::Curve(a)) => emit_report(commands::curve(&layers.resolve(a)?)?),
        Command::Threshold(ThresholdCommand::Verify(a)) => emit_report(commands::verify(&layers.resolve(a)?)?),
        Command::Ineq(IneqCommand::Check(a)) => emit_report(commands::ineq_check(&layers.resolve(a)?)?),
        Command::Ineq(IneqCommand::Frontier(a)) => emit_report(commands::frontier(&layers.resolve(a)?)?),
        Command::Jm(JmCommand::Sweep(a)) => emit_report(commands::sweep(&layers.resolve(a)?)?),
        Command::Jm(JmCommand::Render(a)) => {
            let path = output
                .as_deref()
                .ok_or_else(|| CliError::schema("jm render writes a binary image and needs --output"))?;
            let bytes = commands::render(&layers.resolve(a)?)?;
            output::emit(&bytes, Some(path))
        }
        Command::Accept(a) => {
            let (report, resolved, passed) = commands::accept(&layers.resolve(a)?)?;
            emit_report((report, resolved))?;
            if passed {
                Ok(())
            } else {
                Err(CliError::acceptance("one or more criteria failed"))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code)
        }
    }
}
