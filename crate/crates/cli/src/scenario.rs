//! Scenario files: strict JSON descriptions of a model family, its
//! parameters, the recording grid, and the output naming.
//!
//! Parsing is two-phase: the outer shape is read with unknown keys rejected,
//! then the `params` block is decoded against the schema the `model` field
//! selects, again rejecting unknown keys.  All physical validation is
//! delegated to the core constructors so a scenario that parses here either
//! builds cleanly or fails with the core's diagnostic before any propagation
//! starts.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use cpr_core::jaynes_cummings::{JcmBasis, JcmParams};
use cpr_core::three_level::ThreeLevelParams;
use cpr_core::two_level::TwoLevelParams;
use cpr_core::{PulseEnvelope, TimeGrid};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Cpr,
    Jcm,
    Probe,
    ProbeScan,
    Adiabaticity,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Model::Cpr => "cpr",
            Model::Jcm => "jcm",
            Model::Probe => "probe",
            Model::ProbeScan => "probe-scan",
            Model::Adiabaticity => "adiabaticity",
        };
        f.write_str(name)
    }
}

/// Unit label for the time axis; purely cosmetic, the dynamics are
/// unit-agnostic with hbar = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    Fs,
    Ns,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn to_grid(self) -> Result<TimeGrid, CliError> {
        Ok(TimeGrid::new(self.t_start, self.t_end, self.steps)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeName {
    Gaussian,
    GaussianRaw,
    Sech,
    Constant,
}

/// Envelope description; `center`/`width` are required for the pulsed
/// shapes and rejected for `constant`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeSpec {
    pub shape: ShapeName,
    pub peak: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
}

impl EnvelopeSpec {
    pub fn to_envelope(&self) -> Result<PulseEnvelope, CliError> {
        if self.shape == ShapeName::Constant {
            if self.center.is_some() || self.width.is_some() {
                return Err(CliError::config(
                    "a constant envelope takes no \"center\" or \"width\"",
                ));
            }
            return Ok(PulseEnvelope::constant(self.peak)?);
        }
        let center = self
            .center
            .ok_or_else(|| CliError::config("pulsed envelope is missing \"center\""))?;
        self.build_pulsed(center)
    }

    /// Builds with an externally supplied center; the spec itself must not
    /// carry one.  Used for the probe pulse, whose position is given as a
    /// delay relative to the pump.
    pub fn to_envelope_centered(&self, center: f64) -> Result<PulseEnvelope, CliError> {
        if self.center.is_some() {
            return Err(CliError::config(
                "the probe envelope takes no \"center\"; set \"probe_delay\" instead",
            ));
        }
        if self.shape == ShapeName::Constant {
            return Err(CliError::config(
                "the probe envelope must be a pulsed shape",
            ));
        }
        self.build_pulsed(center)
    }

    fn build_pulsed(&self, center: f64) -> Result<PulseEnvelope, CliError> {
        let width = self
            .width
            .ok_or_else(|| CliError::config("pulsed envelope is missing \"width\""))?;
        let envelope = match self.shape {
            ShapeName::Gaussian => PulseEnvelope::gaussian(self.peak, center, width),
            ShapeName::GaussianRaw => PulseEnvelope::gaussian_raw(self.peak, center, width),
            ShapeName::Sech => PulseEnvelope::sech(self.peak, center, width),
            ShapeName::Constant => unreachable!("handled by the callers"),
        };
        Ok(envelope?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CprSpec {
    pub pulse: EnvelopeSpec,
    pub detuning: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JcmSpec {
    pub omega_l1: f64,
    pub omega_l2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub g1: EnvelopeSpec,
    pub g2: EnvelopeSpec,
    pub n: u32,
    pub m: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub pump: EnvelopeSpec,
    pub probe: EnvelopeSpec,
    /// Probe center relative to the pump center; defaults to coincident.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_delay: Option<f64>,
    pub delta_p: f64,
    pub delta_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeScanSpec {
    pub pump: EnvelopeSpec,
    pub probe: EnvelopeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_delay: Option<f64>,
    pub delta_p: f64,
    pub delta_s_from: f64,
    pub delta_s_to: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdiabaticitySpec {
    pub delta: f64,
    pub tau: f64,
    #[serde(default = "default_adiabaticity_shape")]
    pub shape: ShapeName,
    /// Peak coupling; defaults to the critical value `sqrt(2) |delta|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak: Option<f64>,
}

fn default_adiabaticity_shape() -> ShapeName {
    ShapeName::Sech
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ModelParams {
    Cpr(CprSpec),
    Jcm(JcmSpec),
    Probe(ProbeSpec),
    ProbeScan(ProbeScanSpec),
    Adiabaticity(AdiabaticitySpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub stem: String,
    pub format: OutputFormat,
}

/// A fully parsed scenario; `Serialize` reproduces the input shape so the
/// manifest echo round-trips to an equal value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub model: Model,
    pub time_unit: TimeUnit,
    pub grid: GridSpec,
    pub params: ModelParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    model: Model,
    time_unit: TimeUnit,
    grid: GridSpec,
    params: serde_json::Value,
    #[serde(default)]
    output: Option<OutputSpec>,
}

pub fn parse_scenario_value(value: serde_json::Value) -> Result<Scenario, CliError> {
    let raw: RawScenario =
        serde_json::from_value(value).map_err(|e| CliError::config(format!("scenario: {e}")))?;
    let context =
        |e: serde_json::Error| CliError::config(format!("params for model \"{}\": {e}", raw.model));
    let params = match raw.model {
        Model::Cpr => ModelParams::Cpr(serde_json::from_value(raw.params).map_err(context)?),
        Model::Jcm => ModelParams::Jcm(serde_json::from_value(raw.params).map_err(context)?),
        Model::Probe => ModelParams::Probe(serde_json::from_value(raw.params).map_err(context)?),
        Model::ProbeScan => {
            ModelParams::ProbeScan(serde_json::from_value(raw.params).map_err(context)?)
        }
        Model::Adiabaticity => {
            ModelParams::Adiabaticity(serde_json::from_value(raw.params).map_err(context)?)
        }
    };
    Ok(Scenario {
        name: raw.name,
        model: raw.model,
        time_unit: raw.time_unit,
        grid: raw.grid,
        params,
        output: raw.output,
    })
}

pub fn parse_scenario_str(text: &str) -> Result<Scenario, CliError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::config(format!("invalid JSON: {e}")))?;
    parse_scenario_value(value)
}

pub fn parse_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read scenario {}: {e}", path.display())))?;
    parse_scenario_str(&text)
}

impl Scenario {
    /// File stem for the artifacts: explicit output block, else the name.
    pub fn output_stem(&self) -> &str {
        self.output.as_ref().map_or(&self.name, |o| &o.stem)
    }
}

/// Scenario translated into core types, ready to execute.
pub enum BuiltScenario {
    Cpr(TwoLevelParams),
    Jcm(JcmParams),
    Probe(ThreeLevelParams),
    ProbeScan {
        base: ThreeLevelParams,
        detunings: Vec<f64>,
    },
    Adiabaticity {
        envelope: PulseEnvelope,
        delta: f64,
        grid: TimeGrid,
    },
}

pub fn linspace(from: f64, to: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if points == 0 {
        return Err(CliError::config("a scan needs at least one point"));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    let step = (to - from) / (points - 1) as f64;
    Ok((0..points).map(|k| from + k as f64 * step).collect())
}

fn probe_base(
    pump: &EnvelopeSpec,
    probe: &EnvelopeSpec,
    probe_delay: Option<f64>,
    delta_p: f64,
    delta_s: f64,
    grid: TimeGrid,
) -> Result<ThreeLevelParams, CliError> {
    let pump = pump.to_envelope()?;
    let probe = probe.to_envelope_centered(pump.center() + probe_delay.unwrap_or(0.0))?;
    Ok(ThreeLevelParams::new(pump, probe, delta_p, delta_s, grid)?)
}

impl Scenario {
    pub fn build(&self) -> Result<BuiltScenario, CliError> {
        let grid = self.grid.to_grid()?;
        match &self.params {
            ModelParams::Cpr(spec) => {
                let envelope = spec.pulse.to_envelope()?;
                Ok(BuiltScenario::Cpr(TwoLevelParams::new(
                    envelope,
                    spec.detuning,
                    grid,
                )?))
            }
            ModelParams::Jcm(spec) => {
                let basis = JcmBasis::new(spec.n, spec.m)?;
                Ok(BuiltScenario::Jcm(JcmParams::new(
                    spec.omega_l1,
                    spec.omega_l2,
                    spec.delta1,
                    spec.delta2,
                    spec.g1.to_envelope()?,
                    spec.g2.to_envelope()?,
                    basis,
                    grid,
                )?))
            }
            ModelParams::Probe(spec) => Ok(BuiltScenario::Probe(probe_base(
                &spec.pump,
                &spec.probe,
                spec.probe_delay,
                spec.delta_p,
                spec.delta_s,
                grid,
            )?)),
            ModelParams::ProbeScan(spec) => {
                let detunings = linspace(spec.delta_s_from, spec.delta_s_to, spec.points)?;
                let base = probe_base(
                    &spec.pump,
                    &spec.probe,
                    spec.probe_delay,
                    spec.delta_p,
                    spec.delta_s_from,
                    grid,
                )?;
                Ok(BuiltScenario::ProbeScan { base, detunings })
            }
            ModelParams::Adiabaticity(spec) => {
                if spec.shape == ShapeName::Constant {
                    return Err(CliError::config(
                        "adiabaticity needs a localized pulse shape (sech or gaussian)",
                    ));
                }
                let peak = spec
                    .peak
                    .unwrap_or_else(|| cpr_core::adiabaticity::critical_rabi(spec.delta));
                let envelope = EnvelopeSpec {
                    shape: spec.shape,
                    peak,
                    center: Some(0.0),
                    width: Some(spec.tau),
                }
                .to_envelope()?;
                Ok(BuiltScenario::Adiabaticity {
                    envelope,
                    delta: spec.delta,
                    grid,
                })
            }
        }
    }
}
