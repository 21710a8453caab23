//! Artifact writers: CSV tables (header row, 12 significant digits, '.'
//! decimal separator, CRLF line endings) and the JSON run manifest.  CSV
//! content is a pure function of the scenario, so identical inputs yield
//! byte-identical files; the manifest additionally carries the wall time.

use std::path::{Path, PathBuf};

use serde::Serialize;

use cpr_core::Trajectory;

use crate::error::CliError;
use crate::scenario::Scenario;

/// `{:.11e}` prints one leading digit plus eleven fractional ones.
pub fn format_value(value: f64) -> String {
    format!("{value:.11e}")
}

pub fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push_str("\r\n");
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let mut first = true;
        for value in row {
            if !first {
                text.push(',');
            }
            text.push_str(&format_value(value));
            first = false;
        }
        text.push_str("\r\n");
    }
    text
}

/// Time column plus every attached observable, in attachment order.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let names: Vec<&str> = std::iter::once("t")
        .chain(traj.observable_names())
        .collect();
    let columns: Vec<&[f64]> = names[1..]
        .iter()
        .map(|name| traj.observable(name).expect("listed by observable_names"))
        .collect();
    let rows = (0..traj.grid().len()).map(|k| {
        let mut row = Vec::with_capacity(names.len());
        row.push(traj.grid().at(k));
        row.extend(columns.iter().map(|c| c[k]));
        row
    });
    csv_bytes(&names, rows)
}

#[derive(Serialize)]
pub struct IntegratorInfo {
    pub substep_dt: f64,
    pub substeps_per_interval: usize,
    pub max_norm_drift: f64,
}

impl IntegratorInfo {
    pub fn from_trajectory(traj: &Trajectory) -> Self {
        Self {
            substep_dt: traj.substep_dt(),
            substeps_per_interval: traj.substeps_per_interval(),
            max_norm_drift: traj.max_norm_drift(),
        }
    }
}

#[derive(Serialize)]
pub struct FailureInfo {
    pub index: usize,
    pub delta_s: f64,
    pub message: String,
}

#[derive(Serialize)]
pub struct ScanInfo {
    pub param: &'static str,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax_delta_s: Option<f64>,
    pub failures: Vec<FailureInfo>,
}

#[derive(Serialize)]
pub struct AdiabaticityInfo {
    pub f_max_numeric: f64,
    /// Closed-form sech reference; omitted at zero detuning where it is
    /// unbounded.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_max_analytic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    pub adiabatic: bool,
}

#[derive(Serialize)]
pub struct Manifest<'a> {
    pub scenario: &'a Scenario,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adiabaticity: Option<AdiabaticityInfo>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub wall_time_seconds: f64,
}

pub fn write_artifacts(
    out_dir: &Path,
    stem: &str,
    csv: &str,
    manifest: &Manifest<'_>,
) -> Result<(PathBuf, PathBuf), CliError> {
    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join(format!("{stem}.csv"));
    let manifest_path = out_dir.join(format!("{stem}.manifest.json"));
    std::fs::write(&csv_path, csv)?;
    let mut text = serde_json::to_string_pretty(manifest)
        .map_err(|e| CliError::Internal(format!("manifest serialization: {e}")))?;
    text.push('\n');
    std::fs::write(&manifest_path, text)?;
    Ok((csv_path, manifest_path))
}
