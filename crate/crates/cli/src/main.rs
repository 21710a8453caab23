//! `cprsim`: scenario-driven runner for the coherent-population-return
//! models in `cpr-core`.
//!
//! Exit codes: 0 on success, 2 for configuration problems, 3 when a
//! propagation fails numerically, 1 for I/O or internal faults.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use cpr_core::adiabaticity::{assess, critical_rabi, AdiabaticityReport};
use cpr_core::jaynes_cummings::{jcm_integrator, simulate_jcm_with, JcmHamiltonian};
use cpr_core::three_level::{
    scan_probe_detuning_with, simulate_probe_with, ProbeScanResult, ThreeLevelParams,
};
use cpr_core::two_level::simulate_cpr_with;
use cpr_core::{Integrator, PulseEnvelope, TimeGrid, Trajectory};

use cpr_cli::error::CliError;
use cpr_cli::output::{
    self, csv_bytes, trajectory_csv, AdiabaticityInfo, FailureInfo, IntegratorInfo, Manifest,
    ScanInfo,
};
use cpr_cli::scenario::{self, parse_scenario, BuiltScenario, Scenario};

#[derive(Parser)]
#[command(
    name = "cprsim",
    version,
    about = "Coherent population return simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write CSV plus manifest artifacts
    Run {
        /// Scenario JSON file
        scenario: PathBuf,
        /// Output directory (default: current directory)
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Fixed integrator substep, replacing the automatic step policy
        #[arg(long, value_name = "X")]
        dt: Option<f64>,
        /// Worker threads for scan scenarios (default: all cores)
        #[arg(long, value_name = "N")]
        workers: Option<usize>,
    },
    /// Scan the probe detuning of a probe scenario
    Scan {
        /// Scenario JSON file with model "probe" or "probe-scan"
        scenario: PathBuf,
        /// Parameter to scan; only "deltaS" is available
        #[arg(long, value_name = "NAME")]
        param: String,
        #[arg(long, value_name = "A")]
        from: f64,
        #[arg(long, value_name = "B")]
        to: f64,
        #[arg(long, value_name = "K")]
        points: usize,
        /// Output directory (default: current directory)
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores)
        #[arg(long, value_name = "N")]
        workers: Option<usize>,
    },
    /// Evaluate the pulsed adiabaticity criterion for a detuning and width
    Adiabaticity {
        /// Detuning (inverse time units)
        #[arg(long, value_name = "X", allow_hyphen_values = true)]
        delta: f64,
        /// Pulse width (time units)
        #[arg(long, value_name = "Y")]
        tau: f64,
        #[arg(long, value_enum, default_value_t = ShapeArg::Sech)]
        shape: ShapeArg,
        /// Peak coupling (default: the critical value sqrt(2)|delta|, or 1
        /// at zero detuning)
        #[arg(long, value_name = "W")]
        peak: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Sech,
    Gaussian,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            scenario,
            out,
            dt,
            workers,
        } => cmd_run(&scenario, out, dt, workers),
        Command::Scan {
            scenario,
            param,
            from,
            to,
            points,
            out,
            workers,
        } => cmd_scan(&scenario, &param, from, to, points, out, workers),
        Command::Adiabaticity {
            delta,
            tau,
            shape,
            peak,
        } => cmd_adiabaticity(delta, tau, shape, peak),
    };
    if let Err(e) = outcome {
        eprintln!("cprsim: {e}");
        std::process::exit(e.exit_code());
    }
}

/// `--dt` swaps the spectral-bound step policy for a fixed substep; the
/// conditioning offset of the base settings is kept.
fn override_integrator(base: Integrator, dt: Option<f64>) -> Result<Integrator, CliError> {
    match dt {
        None => Ok(base),
        Some(x) if x.is_finite() && x > 0.0 => Ok(Integrator {
            max_step_product: f64::INFINITY,
            max_substep: Some(x),
            ..base
        }),
        Some(x) => Err(CliError::config(format!(
            "--dt must be positive and finite, got {x}"
        ))),
    }
}

fn with_pool<T: Send>(
    workers: Option<usize>,
    job: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match workers {
        None => Ok(job()),
        Some(0) => Err(CliError::config("--workers must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

fn out_dir(out: Option<PathBuf>) -> PathBuf {
    out.unwrap_or_else(|| PathBuf::from("."))
}

fn probe_warnings(params: &ThreeLevelParams) -> Vec<String> {
    let warnings = params.warnings();
    for warning in &warnings {
        eprintln!("cprsim: warning: {warning}");
    }
    warnings
}

fn write_trajectory_artifacts(
    dir: &Path,
    scenario: &Scenario,
    traj: &Trajectory,
    warnings: Vec<String>,
    started: Instant,
) -> Result<(), CliError> {
    let stem = scenario.output_stem();
    let manifest = Manifest {
        scenario,
        outputs: vec![format!("{stem}.csv")],
        integrator: Some(IntegratorInfo::from_trajectory(traj)),
        scan: None,
        adiabaticity: None,
        warnings,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    };
    let (csv_path, _) = output::write_artifacts(dir, stem, &trajectory_csv(traj), &manifest)?;
    println!("wrote {}", csv_path.display());
    Ok(())
}

fn scan_csv(scan: &ProbeScanResult) -> String {
    let rows =
        (0..scan.delta_s.len()).map(|k| vec![scan.delta_s[k], scan.p2_final[k], scan.p2_max[k]]);
    csv_bytes(&["deltaS", "P2_final", "P2_max"], rows)
}

/// Writes the scan artifacts, then reports failed points as an integration
/// failure so the partial output is preserved alongside a nonzero exit.
fn write_scan_artifacts(
    dir: &Path,
    scenario: &Scenario,
    stem: &str,
    scan: &ProbeScanResult,
    warnings: Vec<String>,
    started: Instant,
) -> Result<(), CliError> {
    let argmax = scan.argmax_final();
    let manifest = Manifest {
        scenario,
        outputs: vec![format!("{stem}.csv")],
        integrator: None,
        scan: Some(ScanInfo {
            param: "deltaS",
            from: *scan.delta_s.first().expect("nonempty scan"),
            to: *scan.delta_s.last().expect("nonempty scan"),
            points: scan.delta_s.len(),
            argmax_index: argmax,
            argmax_delta_s: argmax.map(|k| scan.delta_s[k]),
            failures: scan
                .failures
                .iter()
                .map(|f| FailureInfo {
                    index: f.index,
                    delta_s: f.delta_s,
                    message: f.message.clone(),
                })
                .collect(),
        }),
        adiabaticity: None,
        warnings,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    };
    let (csv_path, _) = output::write_artifacts(dir, stem, &scan_csv(scan), &manifest)?;
    println!("wrote {}", csv_path.display());
    if let Some(first) = scan.failures.first() {
        return Err(CliError::Integration(format!(
            "{} of {} scan points failed; first at deltaS = {}: {}",
            scan.failures.len(),
            scan.delta_s.len(),
            first.delta_s,
            first.message,
        )));
    }
    Ok(())
}

fn adiabaticity_csv(report: &AdiabaticityReport) -> String {
    let rows = (0..report.times.len()).map(|k| vec![report.times[k], report.omega[k], report.f[k]]);
    csv_bytes(&["t", "Omega", "f"], rows)
}

fn finite(value: f64) -> Option<f64> {
    value.is_finite().then_some(value)
}

fn cmd_run(
    scenario_path: &Path,
    out: Option<PathBuf>,
    dt: Option<f64>,
    workers: Option<usize>,
) -> Result<(), CliError> {
    let scenario = parse_scenario(scenario_path)?;
    let built = scenario.build()?;
    let dir = out_dir(out);
    let started = Instant::now();
    match built {
        BuiltScenario::Cpr(params) => {
            let integrator = override_integrator(Integrator::default(), dt)?;
            let traj = simulate_cpr_with(&params, &integrator)?;
            write_trajectory_artifacts(&dir, &scenario, &traj, Vec::new(), started)
        }
        BuiltScenario::Jcm(params) => {
            let h = JcmHamiltonian::new(&params);
            let integrator = override_integrator(jcm_integrator(&h), dt)?;
            let traj = simulate_jcm_with(&params, &integrator)?;
            write_trajectory_artifacts(&dir, &scenario, &traj, Vec::new(), started)
        }
        BuiltScenario::Probe(params) => {
            let warnings = probe_warnings(&params);
            let integrator = override_integrator(Integrator::default(), dt)?;
            let traj = simulate_probe_with(&params, &integrator)?;
            write_trajectory_artifacts(&dir, &scenario, &traj, warnings, started)
        }
        BuiltScenario::ProbeScan { base, detunings } => {
            let warnings = probe_warnings(&base);
            let integrator = override_integrator(Integrator::default(), dt)?;
            let scan = with_pool(workers, || {
                scan_probe_detuning_with(&base, &detunings, &integrator)
            })??;
            write_scan_artifacts(
                &dir,
                &scenario,
                scenario.output_stem(),
                &scan,
                warnings,
                started,
            )
        }
        BuiltScenario::Adiabaticity {
            envelope,
            delta,
            grid,
        } => {
            if dt.is_some() {
                eprintln!("cprsim: warning: --dt has no effect on an adiabaticity scenario");
            }
            let report = assess(&envelope, delta, &grid)?;
            let stem = scenario.output_stem();
            let manifest = Manifest {
                scenario: &scenario,
                outputs: vec![format!("{stem}.csv")],
                integrator: None,
                scan: None,
                adiabaticity: Some(AdiabaticityInfo {
                    f_max_numeric: report.f_max_numeric,
                    f_max_analytic: finite(report.f_max_analytic),
                    margin: finite(report.margin),
                    adiabatic: report.adiabatic,
                }),
                warnings: Vec::new(),
                wall_time_seconds: started.elapsed().as_secs_f64(),
            };
            let (csv_path, _) =
                output::write_artifacts(&dir, stem, &adiabaticity_csv(&report), &manifest)?;
            println!("wrote {}", csv_path.display());
            Ok(())
        }
    }
}

fn cmd_scan(
    scenario_path: &Path,
    param: &str,
    from: f64,
    to: f64,
    points: usize,
    out: Option<PathBuf>,
    workers: Option<usize>,
) -> Result<(), CliError> {
    if param != "deltaS" {
        return Err(CliError::config(format!(
            "unknown scan parameter \"{param}\"; available: deltaS"
        )));
    }
    let scenario = parse_scenario(scenario_path)?;
    let base = match scenario.build()? {
        BuiltScenario::Probe(params) => params,
        BuiltScenario::ProbeScan { base, .. } => base,
        _ => {
            return Err(CliError::config(format!(
                "scan needs a \"probe\" or \"probe-scan\" scenario, got \"{}\"",
                scenario.model
            )))
        }
    };
    let detunings = scenario::linspace(from, to, points)?;
    let warnings = probe_warnings(&base);
    let dir = out_dir(out);
    let started = Instant::now();
    let integrator = Integrator::default();
    let scan = with_pool(workers, || {
        scan_probe_detuning_with(&base, &detunings, &integrator)
    })??;
    let stem = format!("{}-scan", scenario.output_stem());
    write_scan_artifacts(&dir, &scenario, &stem, &scan, warnings, started)
}

fn cmd_adiabaticity(
    delta: f64,
    tau: f64,
    shape: ShapeArg,
    peak: Option<f64>,
) -> Result<(), CliError> {
    let peak = peak.unwrap_or_else(|| {
        let critical = critical_rabi(delta);
        if critical > 0.0 {
            critical
        } else {
            1.0
        }
    });
    let envelope = match shape {
        ShapeArg::Sech => PulseEnvelope::sech(peak, 0.0, tau),
        ShapeArg::Gaussian => PulseEnvelope::gaussian(peak, 0.0, tau),
    }?;
    let grid = TimeGrid::new(-8.0 * tau, 8.0 * tau, 4000)?;
    let report = assess(&envelope, delta, &grid)?;
    println!("peak = {}", peak);
    println!("f_max_numeric = {}", report.f_max_numeric);
    println!("f_max_analytic = {}", report.f_max_analytic);
    println!("margin = {}", report.margin);
    println!("adiabatic = {}", report.adiabatic);
    Ok(())
}
