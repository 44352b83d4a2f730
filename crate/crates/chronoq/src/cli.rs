//! Command implementations behind the `chronoq` binary: simulation runs,
//! figure-data emission, gate probes, and parameter sweeps. All output is
//! deterministic flat files for external plotting.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, best_peak_seen, find_gate_time, GateProbeReport};
use crate::error::Error;
use crate::integrate::{evolve, IntegratorConfig, Trajectory};
use crate::model::{SystemParameters, TwoQubitState};

/// Environment variable naming a directory under which relative output
/// paths are resolved.
pub const OUT_DIR_ENV: &str = "CHRONOQ_OUT";

pub const CSV_HEADER: &str =
    "t,p00,p01,p10,p11,norm2,re_c0,im_c0,re_c1,im_c1,re_c2,im_c2,re_c3,im_c3";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Initial condition: a named basis state or four explicit amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialCondition {
    Named(String),
    Amplitudes([[f64; 2]; 4]),
}

impl InitialCondition {
    pub fn resolve(&self) -> Result<TwoQubitState, Error> {
        let state = match self {
            InitialCondition::Named(name) => match name.as_str() {
                "00" => TwoQubitState::basis(0),
                "01" => TwoQubitState::basis(1),
                "10" => TwoQubitState::basis(2),
                "11" => TwoQubitState::basis(3),
                other => {
                    return Err(Error::Usage(format!(
                        "unknown basis state '{other}' (expected 00, 01, 10 or 11)"
                    )))
                }
            },
            InitialCondition::Amplitudes(pairs) => TwoQubitState::new(std::array::from_fn(|k| {
                Complex64::new(pairs[k][0], pairs[k][1])
            })),
        };
        let n2 = state.norm_sqr();
        if (n2 - 1.0).abs() > 1e-9 {
            return Err(Error::Usage(format!(
                "initial state must be normalized (norm^2 = {n2})"
            )));
        }
        Ok(state)
    }
}

/// Everything one `simulate` run needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: SystemParameters,
    pub integrator: IntegratorConfig,
    pub t_start: f64,
    pub t_end: f64,
    pub initial: InitialCondition,
    pub output_path: PathBuf,
    pub output_format: OutputFormat,
}

/// Parse a phase literal: a plain number or an expression in `pi` using only
/// `*`, `/` and a leading `-` (e.g. `pi/2`, `-pi/4`, `3*pi/2`).
pub fn parse_phase(input: &str) -> Result<f64, Error> {
    let s = input.trim();
    let usage = |msg: &str| Error::Usage(format!("bad phase expression '{input}': {msg}"));
    let (negate, s) = match s.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, s),
    };
    if s.is_empty() {
        return Err(usage("empty"));
    }
    let mut value = 1.0f64;
    let mut op = '*';
    let mut rest = s;
    loop {
        let split = rest.find(['*', '/']).unwrap_or(rest.len());
        let token = rest[..split].trim();
        let factor = if token == "pi" {
            std::f64::consts::PI
        } else {
            token
                .parse::<f64>()
                .map_err(|_| usage(&format!("invalid token '{token}'")))?
        };
        match op {
            '*' => value *= factor,
            '/' => {
                if factor == 0.0 {
                    return Err(usage("division by zero"));
                }
                value /= factor;
            }
            _ => unreachable!(),
        }
        if split == rest.len() {
            break;
        }
        op = rest.as_bytes()[split] as char;
        rest = rest[split + 1..].trim();
        if rest.is_empty() {
            return Err(usage("trailing operator"));
        }
    }
    Ok(if negate { -value } else { value })
}

/// Resolve `path` under `CHRONOQ_OUT` when it is relative and the variable
/// is set.
pub fn resolve_output_path(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Ok(base) = std::env::var(OUT_DIR_ENV) {
            if !base.is_empty() {
                return PathBuf::from(base).join(path);
            }
        }
    }
    path.to_path_buf()
}

// 17 significant digits round-trips f64 exactly.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_row(t: f64, state: &TwoQubitState) -> String {
    let p = analysis::populations(state);
    let mut row = String::new();
    let _ = write!(
        row,
        "{},{},{},{},{},{}",
        fmt_f64(t),
        fmt_f64(p[0]),
        fmt_f64(p[1]),
        fmt_f64(p[2]),
        fmt_f64(p[3]),
        fmt_f64(state.norm_sqr()),
    );
    for amp in &state.amps {
        let _ = write!(row, ",{},{}", fmt_f64(amp.re), fmt_f64(amp.im));
    }
    row
}

/// Serialize trajectory samples in the canonical CSV schema.
pub fn trajectory_to_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(64 * (traj.samples.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (t, state) in &traj.samples {
        out.push_str(&csv_row(*t, state));
        out.push('\n');
    }
    out
}

/// Parse a CSV produced by [`trajectory_to_csv`] back into samples.
pub fn parse_trajectory_csv(text: &str) -> Result<Vec<(f64, TwoQubitState)>, Error> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        _ => return Err(Error::Config("missing or unexpected CSV header".to_string())),
    }
    let mut samples = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad number '{f}' on line {}", lineno + 2)))
            })
            .collect::<Result<_, _>>()?;
        if fields.len() != 14 {
            return Err(Error::Config(format!(
                "expected 14 columns, got {} on line {}",
                fields.len(),
                lineno + 2
            )));
        }
        let amps = std::array::from_fn(|k| Complex64::new(fields[6 + 2 * k], fields[7 + 2 * k]));
        samples.push((fields[0], TwoQubitState::new(amps)));
    }
    Ok(samples)
}

#[derive(Debug, Clone, Serialize)]
struct JsonSample {
    t: f64,
    populations: [f64; 4],
    norm2: f64,
    amps: [[f64; 2]; 4],
}

fn trajectory_to_json(traj: &Trajectory) -> String {
    let rows: Vec<JsonSample> = traj
        .samples
        .iter()
        .map(|(t, s)| JsonSample {
            t: *t,
            populations: analysis::populations(s),
            norm2: s.norm_sqr(),
            amps: std::array::from_fn(|k| [s.amps[k].re, s.amps[k].im]),
        })
        .collect();
    serde_json::to_string_pretty(&rows).expect("serialization cannot fail")
}

/// Summary line data for a completed simulate run.
#[derive(Debug, Clone, Serialize)]
pub struct SimulateSummary {
    pub output_path: PathBuf,
    pub samples: usize,
    pub t_final: f64,
    pub final_populations: [f64; 4],
    pub max_norm_error: f64,
}

/// Run one trajectory and write it to the configured path.
pub fn cmd_simulate(config: &RunConfig) -> Result<SimulateSummary, Error> {
    let initial = config.initial.resolve()?;
    let traj = evolve(
        &config.params,
        &initial,
        config.t_start,
        config.t_end,
        &config.integrator,
    )?;
    let body = match config.output_format {
        OutputFormat::Csv => trajectory_to_csv(&traj),
        OutputFormat::Json => trajectory_to_json(&traj),
    };
    let path = resolve_output_path(&config.output_path);
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(&path, body)?;
    let (t_final, last) = traj.samples.last().expect("non-empty trajectory");
    Ok(SimulateSummary {
        output_path: path,
        samples: traj.samples.len(),
        t_final: *t_final,
        final_populations: analysis::populations(last),
        max_norm_error: traj.max_norm_error(),
    })
}

/// Manifest written alongside the figure data files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiguresManifest {
    pub params: SystemParameters,
    pub integrator: IntegratorConfig,
    pub horizon: f64,
    pub threshold: f64,
    pub gate_found: bool,
    /// Detected gate time, or the full horizon when no gate was found.
    pub gate_time: f64,
    pub peak_population: f64,
    /// Whether the attained peak reaches the 0.99 operational bar for the
    /// "population transfer equals one" condition.
    pub peak_reaches_unity: bool,
    pub note: String,
    pub files: Vec<String>,
}

/// Emit the five figure data files over [−T, T] plus a manifest.
///
/// fig1: (t, norm²). fig2..fig5: (t, |C_k|²) for k = 0..3.
pub fn cmd_figures(
    params: &SystemParameters,
    integrator: &IntegratorConfig,
    horizon: f64,
    threshold: f64,
    out_dir: &Path,
) -> Result<FiguresManifest, Error> {
    let detected = find_gate_time(params, integrator, horizon, threshold)?;
    let (gate_found, gate_time, peak_population) = match detected {
        Some(peak) => (true, peak.time, peak.population),
        None => (false, horizon, best_peak_seen(params, integrator, horizon)?),
    };

    // figure-scale sampling: on the order of a few thousand rows per file
    let steps = (gate_time / integrator.dt).ceil();
    let stride = ((steps / 2000.0).ceil() as usize).max(1);
    let fig_config = IntegratorConfig {
        sample_stride: stride,
        ..*integrator
    };
    let initial = analysis::cnot_initial();
    let forward = evolve(params, &initial, 0.0, gate_time, &fig_config)?;
    let backward = evolve(params, &initial, 0.0, -gate_time, &fig_config)?;

    // merged time axis: backward samples reversed, then forward without the
    // duplicate t = 0 row
    let merged: Vec<&(f64, TwoQubitState)> = backward
        .samples
        .iter()
        .rev()
        .chain(forward.samples.iter().skip(1))
        .collect();

    let dir = resolve_output_path(out_dir);
    fs::create_dir_all(&dir)?;
    let mut files = Vec::new();

    let mut fig1 = String::from("t,norm2\n");
    for (t, s) in &merged {
        let _ = writeln!(fig1, "{},{}", fmt_f64(*t), fmt_f64(s.norm_sqr()));
    }
    fs::write(dir.join("fig1_norm.csv"), fig1)?;
    files.push("fig1_norm.csv".to_string());

    for k in 0..4 {
        let name = format!("fig{}_p{}{}.csv", k + 2, k / 2, k % 2);
        let mut body = format!("t,p{}{}\n", k / 2, k % 2);
        for (t, s) in &merged {
            let _ = writeln!(body, "{},{}", fmt_f64(*t), fmt_f64(s.amps[k].norm_sqr()));
        }
        fs::write(dir.join(&name), body)?;
        files.push(name);
    }

    let peak_reaches_unity = gate_found && peak_population >= 0.99;
    let note = if !gate_found {
        format!(
            "no |C3|^2 peak reached threshold {threshold} within horizon {horizon}; \
             figures span the full horizon"
        )
    } else if peak_reaches_unity {
        format!("population transfer peak {peak_population} at |t| = {gate_time}")
    } else {
        format!(
            "population transfer peak {peak_population} at |t| = {gate_time} stays below \
             unity: the drive on the |10>-|11> transition is detuned by w2, capping the \
             transfer at Omega^2/(Omega^2 + w2^2)"
        )
    };

    let manifest = FiguresManifest {
        params: *params,
        integrator: *integrator,
        horizon,
        threshold,
        gate_found,
        gate_time,
        peak_population,
        peak_reaches_unity,
        note,
        files,
    };
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).expect("serialization cannot fail"),
    )?;
    Ok(manifest)
}

/// Run the forward/backward gate probe. Exit-code policy lives in the binary.
pub fn cmd_probe(
    params: &SystemParameters,
    integrator: &IntegratorConfig,
    horizon: f64,
    threshold: f64,
) -> Result<GateProbeReport, Error> {
    analysis::cnot_probe(params, integrator, horizon, threshold)
}

/// One output row of [`cmd_sweep`].
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub found: bool,
    pub gate_time: Option<f64>,
    pub peak: f64,
    pub max_norm_error: f64,
}

fn with_axis(params: &SystemParameters, axis: &str, value: f64) -> Result<SystemParameters, Error> {
    let mut p = *params;
    match axis {
        "w1" => p.w1 = value,
        "w2" => p.w2 = value,
        "j" => p.j = value,
        "omega" => p.omega = value,
        "phi1" => p.phi1 = value,
        "phi2" => p.phi2 = value,
        other => {
            return Err(Error::Usage(format!(
                "unknown sweep axis '{other}' (expected w1, w2, j, omega, phi1 or phi2)"
            )))
        }
    }
    p.validate()?;
    Ok(p)
}

/// Probe the gate once per axis value and write a CSV table. Row order
/// matches the input value order.
pub fn cmd_sweep(
    params: &SystemParameters,
    integrator: &IntegratorConfig,
    axis: &str,
    values: &[f64],
    horizon: f64,
    threshold: f64,
    output_path: &Path,
) -> Result<Vec<SweepRow>, Error> {
    if values.is_empty() {
        return Err(Error::Usage("sweep needs at least one value".to_string()));
    }
    // validate the axis before doing any work
    with_axis(params, axis, values[0])?;

    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        let p = with_axis(params, axis, value)?;
        let row = match analysis::cnot_probe(&p, integrator, horizon, threshold) {
            Ok(report) => SweepRow {
                value,
                found: true,
                gate_time: Some(report.gate_time),
                peak: report.peak_population_forward,
                max_norm_error: report.max_norm_error,
            },
            Err(Error::GateNotFound { best_peak }) => {
                let traj = evolve(
                    &p,
                    &analysis::cnot_initial(),
                    0.0,
                    horizon,
                    integrator,
                )?;
                SweepRow {
                    value,
                    found: false,
                    gate_time: None,
                    peak: best_peak,
                    max_norm_error: traj.max_norm_error(),
                }
            }
            Err(other) => return Err(other),
        };
        rows.push(row);
    }

    let mut body = format!("{axis},found,gate_time,peak,max_norm_error\n");
    for row in &rows {
        let _ = writeln!(
            body,
            "{},{},{},{},{}",
            fmt_f64(row.value),
            row.found,
            row.gate_time.map(fmt_f64).unwrap_or_default(),
            fmt_f64(row.peak),
            fmt_f64(row.max_norm_error),
        );
    }
    let path = resolve_output_path(output_path);
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(&path, body)?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn phase_expressions() {
        assert_eq!(parse_phase("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_phase("-pi/4").unwrap(), -PI / 4.0);
        assert_eq!(parse_phase("3*pi/2").unwrap(), 3.0 * PI / 2.0);
        assert_eq!(parse_phase("0.25").unwrap(), 0.25);
        assert_eq!(parse_phase("pi").unwrap(), PI);
        assert_eq!(parse_phase("2*pi").unwrap(), 2.0 * PI);
        assert!(parse_phase("pi+1").is_err());
        assert!(parse_phase("tau/2").is_err());
        assert!(parse_phase("pi/").is_err());
        assert!(parse_phase("").is_err());
        assert!(parse_phase("pi/0").is_err());
    }

    #[test]
    fn initial_condition_resolution() {
        assert_eq!(
            InitialCondition::Named("10".into()).resolve().unwrap(),
            TwoQubitState::basis(2)
        );
        assert!(InitialCondition::Named("20".into()).resolve().is_err());
        let s = InitialCondition::Amplitudes([[0.6, 0.0], [0.0, 0.8], [0.0, 0.0], [0.0, 0.0]])
            .resolve()
            .unwrap();
        assert!((s.norm_sqr() - 1.0).abs() <= 1e-15);
        // unnormalized inputs are rejected
        assert!(
            InitialCondition::Amplitudes([[1.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, 0.0]])
                .resolve()
                .is_err()
        );
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let traj = evolve(
            &SystemParameters::default(),
            &analysis::cnot_initial(),
            0.0,
            25.0,
            &IntegratorConfig {
                sample_stride: 100,
                ..IntegratorConfig::default()
            },
        )
        .unwrap();
        let text = trajectory_to_csv(&traj);
        let parsed = parse_trajectory_csv(&text).unwrap();
        assert_eq!(parsed.len(), traj.samples.len());
        for ((t0, s0), (t1, s1)) in traj.samples.iter().zip(parsed.iter()) {
            assert_eq!(t0.to_bits(), t1.to_bits());
            for k in 0..4 {
                assert_eq!(s0.amps[k].re.to_bits(), s1.amps[k].re.to_bits());
                assert_eq!(s0.amps[k].im.to_bits(), s1.amps[k].im.to_bits());
            }
        }
    }

    #[test]
    fn unknown_sweep_axis_is_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let r = cmd_sweep(
            &SystemParameters::default(),
            &IntegratorConfig::default(),
            "coupling",
            &[0.1],
            100.0,
            0.9,
            &dir.path().join("sweep.csv"),
        );
        assert!(matches!(r, Err(Error::Usage(_))));
    }

    #[test]
    fn simulate_backward_emits_decreasing_times() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.csv");
        let config = RunConfig {
            params: SystemParameters::default(),
            integrator: IntegratorConfig {
                sample_stride: 10,
                ..IntegratorConfig::default()
            },
            t_start: 0.0,
            t_end: -50.0,
            initial: InitialCondition::Named("10".into()),
            output_path: out.clone(),
            output_format: OutputFormat::Csv,
        };
        let summary = cmd_simulate(&config).unwrap();
        assert_eq!(summary.t_final, -50.0);
        let parsed = parse_trajectory_csv(&fs::read_to_string(out).unwrap()).unwrap();
        assert!(parsed.windows(2).all(|w| w[1].0 < w[0].0));
    }

    #[test]
    fn simulate_without_drive_keeps_p10() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.csv");
        let config = RunConfig {
            params: SystemParameters {
                omega: 0.0,
                ..SystemParameters::default()
            },
            integrator: IntegratorConfig {
                sample_stride: 50,
                ..IntegratorConfig::default()
            },
            t_start: 0.0,
            t_end: 100.0,
            initial: InitialCondition::Named("10".into()),
            output_path: out.clone(),
            output_format: OutputFormat::Csv,
        };
        cmd_simulate(&config).unwrap();
        let text = fs::read_to_string(out).unwrap();
        for line in text.lines().skip(1) {
            let p10: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
            assert!((p10 - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn sweep_omega_zero_reports_not_found() {
        let dir = tempfile::tempdir().unwrap();
        let rows = cmd_sweep(
            &SystemParameters::default(),
            &IntegratorConfig {
                sample_stride: 10,
                ..IntegratorConfig::default()
            },
            "omega",
            &[0.0],
            200.0,
            0.9,
            &dir.path().join("sweep.csv"),
        )
        .unwrap();
        assert_eq!(rows.len(), 1);
        assert!(!rows[0].found);
        assert!(rows[0].peak <= 1e-12);
    }

    #[test]
    fn sweep_j_of_either_sign() {
        let dir = tempfile::tempdir().unwrap();
        let rows = cmd_sweep(
            &SystemParameters::default(),
            &IntegratorConfig {
                sample_stride: 10,
                ..IntegratorConfig::default()
            },
            "j",
            &[-0.0015, 0.0015],
            400.0,
            0.9,
            &dir.path().join("sweep.csv"),
        )
        .unwrap();
        assert_eq!(rows.len(), 2);
        for row in &rows {
            assert!(row.max_norm_error <= 1e-8);
        }
    }

    #[test]
    fn figures_emit_five_files_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = cmd_figures(
            &SystemParameters::default(),
            &IntegratorConfig::default(),
            400.0,
            0.9,
            dir.path(),
        )
        .unwrap();
        assert!(manifest.gate_found);
        assert_eq!(manifest.files.len(), 5);
        for name in &manifest.files {
            assert!(dir.path().join(name).exists(), "missing {name}");
        }
        assert!(dir.path().join("manifest.json").exists());

        // fig4 (|C2|^2) starts at 1 at t = 0
        let fig4 = fs::read_to_string(dir.path().join("fig4_p10.csv")).unwrap();
        let row0 = fig4
            .lines()
            .skip(1)
            .find(|l| l.starts_with("0.0000000000000000e0,"))
            .expect("t = 0 row");
        let p: f64 = row0.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(p, 1.0);

        // fig1 norm stays within 1e-8 of unity
        let fig1 = fs::read_to_string(dir.path().join("fig1_norm.csv")).unwrap();
        for line in fig1.lines().skip(1) {
            let n2: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert!((n2 - 1.0).abs() <= 1e-8);
        }
    }

    #[test]
    fn figures_without_gate_cover_horizon() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = cmd_figures(
            &SystemParameters {
                omega: 0.0,
                ..SystemParameters::default()
            },
            &IntegratorConfig::default(),
            100.0,
            0.9,
            dir.path(),
        )
        .unwrap();
        assert!(!manifest.gate_found);
        assert_eq!(manifest.gate_time, 100.0);
        assert!(manifest.note.contains("no |C3|^2 peak"));
    }
}
