//! Thin command-line front end; all logic lives in the library's `cli`
//! module.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use chronoq::cli::{
    self, cmd_figures, cmd_probe, cmd_simulate, cmd_sweep, parse_phase, InitialCondition,
    OutputFormat, RunConfig,
};
use chronoq::error::Error;
use chronoq::integrate::{IntegratorConfig, Method};
use chronoq::model::SystemParameters;

#[derive(Parser)]
#[command(
    name = "chronoq",
    about = "Driven two-qubit spin dynamics: signed-time evolution, figure data and gate probes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one trajectory and write it as CSV or JSON
    Simulate(SimulateArgs),
    /// Emit the five figure data files over [-T, T] plus a manifest
    Figures(FiguresArgs),
    /// Detect the gate time and report the forward/backward probe
    Probe(ProbeArgs),
    /// Probe the gate across a list of values for one parameter
    Sweep(SweepArgs),
}

/// Flags shared by every subcommand: physical constants, integrator knobs
/// and an optional JSON config file (flags win on conflict).
#[derive(Args, Default)]
struct CommonArgs {
    /// JSON config file with the same field names as the flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long)]
    w1: Option<f64>,
    #[arg(long)]
    w2: Option<f64>,
    #[arg(long)]
    j: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    /// Drive phase of qubit 1; accepts pi-expressions like `pi/2`
    #[arg(long)]
    phi1: Option<String>,
    /// Drive phase of qubit 2; accepts pi-expressions like `pi/4`
    #[arg(long)]
    phi2: Option<String>,

    /// Integration method: fixed_rk4 or adaptive_45
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    sample_stride: Option<usize>,
}

/// Optional JSON mirror of the common flags.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    w1: Option<f64>,
    w2: Option<f64>,
    j: Option<f64>,
    omega: Option<f64>,
    phi1: Option<serde_json::Value>,
    phi2: Option<serde_json::Value>,
    method: Option<String>,
    dt: Option<f64>,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    sample_stride: Option<usize>,
    t_start: Option<f64>,
    t_end: Option<f64>,
    initial: Option<InitialCondition>,
    horizon: Option<f64>,
    threshold: Option<f64>,
}

fn phase_value(v: &serde_json::Value) -> Result<f64, Error> {
    match v {
        serde_json::Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::Config("phase is not a finite number".to_string())),
        serde_json::Value::String(s) => parse_phase(s),
        other => Err(Error::Config(format!("bad phase value {other}"))),
    }
}

fn parse_method(s: &str) -> Result<Method, Error> {
    match s {
        "fixed_rk4" => Ok(Method::FixedRk4),
        "adaptive_45" => Ok(Method::Adaptive45),
        other => Err(Error::Usage(format!(
            "unknown method '{other}' (expected fixed_rk4 or adaptive_45)"
        ))),
    }
}

struct Resolved {
    params: SystemParameters,
    integrator: IntegratorConfig,
    file: FileConfig,
}

fn resolve_common(common: &CommonArgs) -> Result<Resolved, Error> {
    let file: FileConfig = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        }
        None => FileConfig::default(),
    };

    let mut params = SystemParameters::default();
    let mut integrator = IntegratorConfig::default();

    // file config first, then flags on top
    if let Some(v) = file.w1 {
        params.w1 = v;
    }
    if let Some(v) = file.w2 {
        params.w2 = v;
    }
    if let Some(v) = file.j {
        params.j = v;
    }
    if let Some(v) = file.omega {
        params.omega = v;
    }
    if let Some(v) = &file.phi1 {
        params.phi1 = phase_value(v)?;
    }
    if let Some(v) = &file.phi2 {
        params.phi2 = phase_value(v)?;
    }
    if let Some(v) = &file.method {
        integrator.method = parse_method(v)?;
    }
    if let Some(v) = file.dt {
        integrator.dt = v;
    }
    if let Some(v) = file.rel_tol {
        integrator.rel_tol = v;
    }
    if let Some(v) = file.abs_tol {
        integrator.abs_tol = v;
    }
    if let Some(v) = file.sample_stride {
        integrator.sample_stride = v;
    }

    if let Some(v) = common.w1 {
        params.w1 = v;
    }
    if let Some(v) = common.w2 {
        params.w2 = v;
    }
    if let Some(v) = common.j {
        params.j = v;
    }
    if let Some(v) = common.omega {
        params.omega = v;
    }
    if let Some(v) = &common.phi1 {
        params.phi1 = parse_phase(v)?;
    }
    if let Some(v) = &common.phi2 {
        params.phi2 = parse_phase(v)?;
    }
    if let Some(v) = &common.method {
        integrator.method = parse_method(v)?;
    }
    if let Some(v) = common.dt {
        integrator.dt = v;
    }
    if let Some(v) = common.rel_tol {
        integrator.rel_tol = v;
    }
    if let Some(v) = common.abs_tol {
        integrator.abs_tol = v;
    }
    if let Some(v) = common.sample_stride {
        integrator.sample_stride = v;
    }

    params.validate()?;
    integrator.validate()?;
    Ok(Resolved {
        params,
        integrator,
        file,
    })
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, allow_hyphen_values = true)]
    t_start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t_end: Option<f64>,
    /// Basis state (00, 01, 10, 11) or eight comma-separated re,im values
    #[arg(long)]
    initial: Option<String>,
    /// Output file path
    #[arg(long, default_value = "trajectory.csv")]
    out: PathBuf,
    /// csv or json
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct FiguresArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value = "figures")]
    out_dir: PathBuf,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Args)]
struct ProbeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// SystemParameters field to vary: w1, w2, j, omega, phi1 or phi2
    #[arg(long)]
    axis: String,
    /// Comma-separated list of values for the axis
    #[arg(long, allow_hyphen_values = true)]
    values: String,
    #[arg(long, default_value = "sweep.csv")]
    out: PathBuf,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    threshold: Option<f64>,
}

const DEFAULT_HORIZON: f64 = 2000.0;
const DEFAULT_THRESHOLD: f64 = 0.99;
const PROBE_MIRROR_BAR: f64 = 1e-5;

fn parse_initial(s: &str) -> Result<InitialCondition, Error> {
    match s {
        "00" | "01" | "10" | "11" => Ok(InitialCondition::Named(s.to_string())),
        other => {
            let parts: Vec<f64> = other
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Usage(format!("bad amplitude '{p}' in --initial")))
                })
                .collect::<Result<_, _>>()?;
            if parts.len() != 8 {
                return Err(Error::Usage(format!(
                    "--initial needs a basis name or 8 re,im values, got {} numbers",
                    parts.len()
                )));
            }
            Ok(InitialCondition::Amplitudes(std::array::from_fn(|k| {
                [parts[2 * k], parts[2 * k + 1]]
            })))
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate(args) => {
            let resolved = resolve_common(&args.common)?;
            let t_start = args.t_start.or(resolved.file.t_start).unwrap_or(0.0);
            let t_end = args
                .t_end
                .or(resolved.file.t_end)
                .ok_or_else(|| Error::Usage("simulate needs --t-end".to_string()))?;
            let initial = match &args.initial {
                Some(s) => parse_initial(s)?,
                None => resolved
                    .file
                    .initial
                    .clone()
                    .unwrap_or(InitialCondition::Named("10".to_string())),
            };
            let output_format = match args.format.as_str() {
                "csv" => OutputFormat::Csv,
                "json" => OutputFormat::Json,
                other => return Err(Error::Usage(format!("unknown format '{other}'"))),
            };
            let config = RunConfig {
                params: resolved.params,
                integrator: resolved.integrator,
                t_start,
                t_end,
                initial,
                output_path: args.out,
                output_format,
            };
            let summary = cmd_simulate(&config)?;
            let p = summary.final_populations;
            println!(
                "wrote {} ({} samples); t_final = {}, populations = [{:.6}, {:.6}, {:.6}, {:.6}], max |norm2 - 1| = {:.3e}",
                summary.output_path.display(),
                summary.samples,
                summary.t_final,
                p[0],
                p[1],
                p[2],
                p[3],
                summary.max_norm_error
            );
            Ok(())
        }
        Command::Figures(args) => {
            let resolved = resolve_common(&args.common)?;
            let horizon = args
                .horizon
                .or(resolved.file.horizon)
                .unwrap_or(DEFAULT_HORIZON);
            let threshold = args
                .threshold
                .or(resolved.file.threshold)
                .unwrap_or(DEFAULT_THRESHOLD);
            let manifest = cmd_figures(
                &resolved.params,
                &resolved.integrator,
                horizon,
                threshold,
                &args.out_dir,
            )?;
            if !manifest.gate_found {
                eprintln!("warning: {}", manifest.note);
            }
            println!(
                "wrote {} files to {} (gate_found = {}, T = {}, peak = {})",
                manifest.files.len() + 1,
                args.out_dir.display(),
                manifest.gate_found,
                manifest.gate_time,
                manifest.peak_population
            );
            Ok(())
        }
        Command::Probe(args) => {
            let resolved = resolve_common(&args.common)?;
            let horizon = args
                .horizon
                .or(resolved.file.horizon)
                .unwrap_or(DEFAULT_HORIZON);
            let threshold = args
                .threshold
                .or(resolved.file.threshold)
                .unwrap_or(DEFAULT_THRESHOLD);
            let report = cmd_probe(&resolved.params, &resolved.integrator, horizon, threshold)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("serialization cannot fail")
            );
            if report.mirror_residual > PROBE_MIRROR_BAR {
                return Err(Error::Numerical(format!(
                    "mirror residual {} exceeds {PROBE_MIRROR_BAR}",
                    report.mirror_residual
                )));
            }
            Ok(())
        }
        Command::Sweep(args) => {
            let resolved = resolve_common(&args.common)?;
            let horizon = args
                .horizon
                .or(resolved.file.horizon)
                .unwrap_or(DEFAULT_HORIZON);
            let threshold = args
                .threshold
                .or(resolved.file.threshold)
                .unwrap_or(DEFAULT_THRESHOLD);
            let values: Vec<f64> = args
                .values
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Usage(format!("bad sweep value '{v}'")))
                })
                .collect::<Result<_, _>>()?;
            let rows = cmd_sweep(
                &resolved.params,
                &resolved.integrator,
                &args.axis,
                &values,
                horizon,
                threshold,
                &args.out,
            )?;
            println!(
                "wrote {} rows to {}",
                rows.len(),
                cli::resolve_output_path(&args.out).display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
