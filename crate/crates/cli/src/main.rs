mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{merge, FlagValues, RunConfig};
use crate::error::CliError;
use crate::report::{emit, Format};

/// Compile, simulate and verify holonomic gates on a three-level Lambda system.
#[derive(Debug, Parser)]
#[command(name = "holoq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pick a scheme for a target and print its parameters and predicted gate.
    Compile,
    /// Integrate the pulse program numerically.
    Simulate,
    /// Integrate numerically and check the result against the closed form.
    Verify,
    /// Evaluate the program over a list of values of one variable.
    Sweep(SweepArgs),
    /// List the schemes reaching a target with their resource counts.
    Compare,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Rotation or drive axis: x, y, z or theta,phi in radians.
    #[arg(long, global = true, allow_hyphen_values = true)]
    axis: Option<String>,
    /// Second axis of the two-loop scheme.
    #[arg(long, global = true, allow_hyphen_values = true)]
    axis2: Option<String>,
    /// Target rotation angle.
    #[arg(long, global = true, allow_hyphen_values = true)]
    angle: Option<f64>,
    /// Phase shift of the second segment.
    #[arg(long, global = true, allow_hyphen_values = true)]
    eta: Option<f64>,
    /// Detuning ratio of the off-resonant scheme.
    #[arg(long, global = true)]
    ratio: Option<f64>,
    /// single-pi, two-loop, off-resonant or l2.
    #[arg(long, global = true)]
    scheme: Option<String>,
    /// square, gaussian, sin2 or sampled:FILE.
    #[arg(long, global = true)]
    shape: Option<String>,
    /// Duration of each pulse.
    #[arg(long, global = true)]
    duration: Option<f64>,
    /// Comma-separated segment areas of a single loop.
    #[arg(long, global = true, allow_hyphen_values = true)]
    areas: Option<String>,
    /// Initial integrator step count.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Verification tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Reject non-square pulses for the off-resonant scheme.
    #[arg(long, global = true)]
    strict: bool,
    /// JSON run configuration; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path prefix; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// eta, ratio, nu or area.
    #[arg(long)]
    variable: Option<String>,
    /// Comma-separated values.
    #[arg(long, allow_hyphen_values = true)]
    values: Option<String>,
}

fn env_tolerance() -> Result<Option<f64>, CliError> {
    match std::env::var("HOLOQ_TOL") {
        Ok(s) => s
            .trim()
            .parse::<f64>()
            .map(Some)
            .map_err(|_| CliError::Invalid(format!("HOLOQ_TOL `{s}` is not a number"))),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    let (variable, values) = match &cli.command {
        Command::Sweep(s) => (s.variable.clone(), s.values.clone()),
        _ => (None, None),
    };
    let flags = FlagValues {
        axis: g.axis.clone(),
        axis2: g.axis2.clone(),
        angle: g.angle,
        eta: g.eta,
        ratio: g.ratio,
        scheme: g.scheme.clone(),
        shape: g.shape.clone(),
        duration: g.duration,
        areas: g.areas.clone(),
        steps: g.steps,
        tol: g.tol,
        tol_env: env_tolerance()?,
        strict: g.strict,
        variable,
        values,
    };
    let config = g.config.as_deref().map(RunConfig::load).transpose()?;
    let config_dir = g.config.as_deref().and_then(|p| p.parent());
    let req = merge(&flags, config, config_dir)?;

    let (output, failure) = match cli.command {
        Command::Compile => (commands::cmd_compile(&req)?, None),
        Command::Simulate => (commands::cmd_simulate(&req)?, None),
        Command::Verify => commands::cmd_verify(&req)?,
        Command::Sweep(_) => (commands::cmd_sweep(&req)?, None),
        Command::Compare => (commands::cmd_compare(&req)?, None),
    };
    emit(&output, g.format, g.out.as_deref())?;
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("holoq: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
