//! Run configuration: a JSON document, optionally patched by `--set` and
//! command-line flags, then validated into a typed [`RunConfig`].

use std::path::{Path, PathBuf};

use critsense::fock::{ModeCount, ProbeSpec};
use critsense::models::{
    apt, lmg, qrm_effective, AptParameters, LmgParameters, ModelSpec, QrmParameters,
};
use critsense::oracle::{OracleConfig, TruncationPolicy};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelId {
    Qrm,
    Lmg,
    Apt,
    RabiFull,
}

impl ModelId {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::Qrm => "qrm",
            ModelId::Lmg => "lmg",
            ModelId::Apt => "apt",
            ModelId::RabiFull => "rabi-full",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
    /// Distances to the critical value, log-spaced from `start` down to
    /// `stop`; the grid is `λc - d`.
    ApproachCritical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
    /// Multiply `start`/`stop` by the critical value (linear and log only).
    #[serde(default)]
    pub relative_to_critical: bool,
}

/// A single value, an explicit list, or a generated grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Axis {
    Value(f64),
    Values(Vec<f64>),
    Grid(GridSpec),
}

impl Axis {
    /// Expands the axis. `critical` is needed for grids tied to `λc`.
    pub fn points(&self, critical: Option<f64>) -> Result<Vec<f64>, String> {
        let pts = match self {
            Axis::Value(v) => vec![*v],
            Axis::Values(v) => v.clone(),
            Axis::Grid(g) => expand_grid(g, critical)?,
        };
        if pts.is_empty() {
            return Err("axis has no points".into());
        }
        if pts.iter().any(|v| !v.is_finite()) {
            return Err("axis values must be finite".into());
        }
        if pts.len() > 1 {
            let up = pts.windows(2).all(|w| w[1] > w[0]);
            let down = pts.windows(2).all(|w| w[1] < w[0]);
            if !(up || down) {
                return Err("axis values must be strictly monotone".into());
            }
        }
        Ok(pts)
    }
}

fn expand_grid(g: &GridSpec, critical: Option<f64>) -> Result<Vec<f64>, String> {
    if g.count == 0 {
        return Err("grid count must be >= 1".into());
    }
    let need_critical = || critical.ok_or_else(|| "grid refers to a critical value but the model has none".to_string());
    let scale = if g.relative_to_critical { need_critical()? } else { 1.0 };
    let lerp = |a: f64, b: f64, k: usize| {
        if g.count == 1 {
            a
        } else {
            a + (b - a) * k as f64 / (g.count - 1) as f64
        }
    };
    match g.spacing {
        Spacing::Linear => Ok((0..g.count).map(|k| scale * lerp(g.start, g.stop, k)).collect()),
        Spacing::Log => {
            if !(g.start > 0.0 && g.stop > 0.0) {
                return Err("log grid needs start, stop > 0".into());
            }
            Ok((0..g.count).map(|k| scale * lerp(g.start.ln(), g.stop.ln(), k).exp()).collect())
        }
        Spacing::ApproachCritical => {
            let c = need_critical()?;
            if !(g.start > 0.0 && g.stop > 0.0) {
                return Err("approach-critical grid needs distances start, stop > 0".into());
            }
            Ok((0..g.count).map(|k| c - lerp(g.start.ln(), g.stop.ln(), k).exp()).collect())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BrachistochroneConfig {
    pub g_tilde: Vec<f64>,
    pub time: Axis,
}

impl Default for BrachistochroneConfig {
    fn default() -> Self {
        let stop = std::f64::consts::PI / (1.0f64 - 0.95 * 0.95).sqrt();
        Self {
            g_tilde: vec![0.950, 0.980, 0.990, 0.999],
            time: Axis::Grid(GridSpec {
                start: 0.0,
                stop,
                count: 201,
                spacing: Spacing::Linear,
                relative_to_critical: false,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Randomised cases per algebra identity.
    pub cases: usize,
    /// Random (model, λ, t) points for oracle concordance.
    pub oracle_points: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { cases: 1000, oracle_points: 12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<ModelId>,
    #[serde(default = "empty_object")]
    pub params: Value,
    #[serde(default)]
    pub estimand: Option<Axis>,
    #[serde(default)]
    pub time: Option<Axis>,
    /// Outer loop over the anisotropy ratio in sweeps.
    #[serde(default)]
    pub zeta: Option<Axis>,
    #[serde(default)]
    pub probe: Option<ProbeSpec>,
    #[serde(default = "adaptive")]
    pub cutoff: TruncationPolicy,
    /// Drop the `h_x` term exactly at the critical point.
    #[serde(default)]
    pub compat_drop_critical_hx: bool,
    #[serde(default = "one")]
    pub nu: u32,
    #[serde(default)]
    pub with_oracle: bool,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub brachistochrone: BrachistochroneConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one_usize", skip_serializing)]
    pub jobs: usize,
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

fn adaptive() -> TruncationPolicy {
    TruncationPolicy::Adaptive
}

fn one() -> u32 {
    1
}

fn one_usize() -> usize {
    1
}

/// Splits `a.b.c=value`; the value is JSON when it parses, else a string.
pub fn parse_assignment(s: &str) -> Result<(Vec<String>, Value), CliError> {
    let (key, raw) = s
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("--set expects key=value, got `{s}`")))?;
    let path: Vec<String> = key.split('.').map(str::to_string).collect();
    if path.iter().any(String::is_empty) {
        return Err(CliError::Config(format!("--set has an empty path segment in `{key}`")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok((path, value))
}

pub fn apply_assignment(root: &mut Value, path: &[String], value: Value) -> Result<(), CliError> {
    let mut node = root;
    for (k, seg) in path.iter().enumerate() {
        let obj = node.as_object_mut().ok_or_else(|| {
            CliError::Config(format!("--set {}: `{}` is not an object", path.join("."), path[..k].join(".")))
        })?;
        if k + 1 == path.len() {
            obj.insert(seg.clone(), value);
            return Ok(());
        }
        node = obj.entry(seg.clone()).or_insert_with(empty_object);
    }
    unreachable!("path is non-empty")
}

fn decode<T: DeserializeOwned>(value: Value, what: &str) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let at = if path == "." { what.to_string() } else { format!("{what}.{path}") };
        CliError::Config(format!("{at}: {}", e.inner()))
    })
}

/// Reads the file (if any), applies `--set` overrides, and decodes.
pub fn load(path: Option<&Path>, sets: &[String]) -> Result<RunConfig, CliError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?,
        None => "{}".to_string(),
    };
    let label = path.map_or_else(|| "config".to_string(), |p| p.display().to_string());
    if sets.is_empty() {
        // Straight from text so that errors carry line and column.
        let de = &mut serde_json::Deserializer::from_str(&text);
        return serde_path_to_error::deserialize(de).map_err(|e| {
            CliError::Config(format!("{label}: field `{}`: {}", e.path(), e.inner()))
        });
    }
    let mut root: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{label}: {e}")))?;
    if !root.is_object() {
        return Err(CliError::Config(format!("{label}: top level must be a JSON object")));
    }
    for s in sets {
        let (p, v) = parse_assignment(s)?;
        apply_assignment(&mut root, &p, v)?;
    }
    decode(root, "config")
}

/// Model identity plus whatever the subcommands need to build it.
#[derive(Debug, Clone)]
pub enum ResolvedModel {
    Effective(ModelSpec),
    /// Full spin-boson Rabi model; `spec` is its effective counterpart.
    RabiFull { params: QrmParameters, spec: ModelSpec },
}

impl ResolvedModel {
    pub fn spec(&self) -> &ModelSpec {
        match self {
            ResolvedModel::Effective(m) => m,
            ResolvedModel::RabiFull { spec, .. } => spec,
        }
    }
}

impl RunConfig {
    pub fn model_id(&self) -> Result<ModelId, CliError> {
        self.model.ok_or_else(|| CliError::Config("no model given (set `model` or pass --model)".into()))
    }

    pub fn qrm_params(&self) -> Result<QrmParameters, CliError> {
        let p: QrmParameters = decode(self.params.clone(), "params")?;
        p.validate().map_err(|e| CliError::Config(format!("params: {e}")))?;
        Ok(p)
    }

    /// Builds the model, with the QRM anisotropy optionally overridden.
    pub fn resolve_model(&self, zeta: Option<f64>) -> Result<ResolvedModel, CliError> {
        let id = self.model_id()?;
        let bad = |e: critsense::Error| CliError::Config(format!("params: {e}"));
        Ok(match id {
            ModelId::Qrm | ModelId::RabiFull => {
                let mut p = self.qrm_params()?;
                if let Some(z) = zeta {
                    p.zeta = z;
                }
                let spec = qrm_effective(&p).map_err(bad)?;
                if id == ModelId::Qrm {
                    ResolvedModel::Effective(spec)
                } else {
                    if p.qubit_omega.is_none() {
                        return Err(CliError::Config("params.qubit_omega is required for rabi-full".into()));
                    }
                    ResolvedModel::RabiFull { params: p, spec }
                }
            }
            ModelId::Lmg => {
                self.reject_zeta(zeta)?;
                let p: LmgParameters = decode(self.params.clone(), "params")?;
                ResolvedModel::Effective(lmg(&p).map_err(bad)?)
            }
            ModelId::Apt => {
                self.reject_zeta(zeta)?;
                let p: AptParameters = decode(self.params.clone(), "params")?;
                ResolvedModel::Effective(apt(&p).map_err(bad)?)
            }
        })
    }

    fn reject_zeta(&self, zeta: Option<f64>) -> Result<(), CliError> {
        match zeta {
            Some(_) => Err(CliError::Config("a zeta axis only applies to qrm and rabi-full".into())),
            None => Ok(()),
        }
    }

    pub fn probe_for(&self, modes: ModeCount) -> ProbeSpec {
        self.probe.clone().unwrap_or(match modes {
            ModeCount::One => ProbeSpec::Canonical,
            ModeCount::Two => ProbeSpec::Vacuum,
        })
    }

    /// Estimand values; defaults to the nominal parameter.
    pub fn estimand_points(&self, model: &ModelSpec) -> Result<Vec<f64>, CliError> {
        match &self.estimand {
            Some(axis) => axis
                .points(model.critical.first().copied())
                .map_err(|e| CliError::Config(format!("estimand: {e}"))),
            None => Ok(vec![model.nominal]),
        }
    }

    pub fn time_points(&self, default: f64) -> Result<Vec<f64>, CliError> {
        let pts = match &self.time {
            Some(axis) => axis.points(None).map_err(|e| CliError::Config(format!("time: {e}")))?,
            None => vec![default],
        };
        if pts.iter().any(|&t| t < 0.0) {
            return Err(CliError::Config("time: values must be >= 0".into()));
        }
        Ok(pts)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.nu == 0 {
            return Err(CliError::Config("nu must be >= 1".into()));
        }
        if self.jobs == 0 {
            return Err(CliError::Config("jobs must be >= 1".into()));
        }
        if let TruncationPolicy::Fixed(n) = self.cutoff {
            if n < 2 {
                return Err(CliError::Config("cutoff.fixed must be >= 2".into()));
            }
        }
        self.oracle.validate().map_err(|e| CliError::Config(format!("oracle: {e}")))?;
        Ok(())
    }
}
