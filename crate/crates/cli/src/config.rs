//! Experiment configuration: a single JSON document.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use bdp_ldp::estimate::{GuideOptions, McOptions, Method, TubeProblem};
use bdp_ldp::ldp::QuadratureSpec;
use bdp_ldp::model::{RateModel, ScalingScheme, SlowlyVarying, TargetFunction, DEFAULT_TARGET_RESOLUTION};
use bdp_ldp::sim::{DEFAULT_GUIDE_CELLS, DEFAULT_MAX_JUMPS};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Free-form provenance notes; ignored by every command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    pub model: ModelSpec,
    pub target: TargetSpec,
    pub scaling: ScalingScheme,
    pub epsilon: f64,
    /// Horizon used by `estimate` and, without `t_list`, by `lower-bound`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub t_list: Vec<f64>,
    #[serde(default = "default_method")]
    pub method: Method,
    pub n: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_jumps")]
    pub max_jumps: usize,
    #[serde(default = "default_panels")]
    pub quadrature_panels: usize,
    #[serde(default = "default_resolution")]
    pub tube_resolution: usize,
    #[serde(default)]
    pub guide: GuideSpec,
    /// Horizons at which `check-scaling` evaluates `r(T)`.
    #[serde(default = "default_scaling_grid")]
    pub scaling_grid: Vec<f64>,
    /// Reference-walk samples for the `lower-bound` cross-check (0 skips it).
    #[serde(default)]
    pub lower_bound_samples: u64,
    #[serde(default, skip_serializing_if = "OutputSpec::is_empty")]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub l: f64,
    /// Death exponent; absent for a pure-birth model (`μ ≡ 0`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default)]
    pub y: SlowlyVarying,
    #[serde(default)]
    pub z: SlowlyVarying,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lambda_overrides: BTreeMap<u64, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub mu_overrides: BTreeMap<u64, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TargetSpec {
    Power { a: f64, p: f64 },
    PiecewiseLinear { nodes: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuideSpec {
    #[serde(default = "default_base_intensity")]
    pub base_intensity: f64,
    #[serde(default = "default_cells")]
    pub cells: usize,
}

impl Default for GuideSpec {
    fn default() -> Self {
        GuideSpec {
            base_intensity: default_base_intensity(),
            cells: default_cells(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<PathBuf>,
}

impl OutputSpec {
    fn is_empty(&self) -> bool {
        self.estimate.is_none() && self.sweep.is_none()
    }
}

fn default_method() -> Method {
    Method::Direct
}

fn default_max_jumps() -> usize {
    DEFAULT_MAX_JUMPS
}

fn default_panels() -> usize {
    bdp_ldp::ldp::DEFAULT_PANELS
}

fn default_resolution() -> usize {
    DEFAULT_TARGET_RESOLUTION
}

fn default_base_intensity() -> f64 {
    1.0
}

fn default_cells() -> usize {
    DEFAULT_GUIDE_CELLS
}

fn default_scaling_grid() -> Vec<f64> {
    (2..=8).map(|k| 10f64.powi(k)).collect()
}

/// A rejected configuration, located by field path and, when it can be
/// found, by line in the source document.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.field.is_empty(), self.line) {
            // parser messages already carry their position
            (true, _) => f.write_str(&self.message),
            (false, Some(line)) => write!(f, "{} (line {line}): {}", self.field, self.message),
            (false, None) => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// A validated configuration with the library objects built.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub model: RateModel,
    pub target: TargetFunction,
    pub quad: QuadratureSpec,
}

impl Experiment {
    /// Parses and validates a JSON document.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| ConfigError {
            field: String::new(),
            line: Some(e.line()),
            message: e.to_string(),
        })?;
        Experiment::new(config).map_err(|mut e| {
            e.line = locate(text, &e.field);
            e
        })
    }

    pub fn new(config: ExperimentConfig) -> Result<Self, ConfigError> {
        let model = build_model(&config.model)?;
        let target = build_target(&config.target, config.tube_resolution)?;
        config.scaling.validate().map_err(|e| err("scaling", e))?;
        if !(config.epsilon.is_finite() && config.epsilon > 0.0) {
            return Err(err("epsilon", "must be finite and positive"));
        }
        if let Some(h) = config.horizon {
            if !(h.is_finite() && h > 0.0) {
                return Err(err("horizon", "must be finite and positive"));
            }
        }
        if config.t_list.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(err("t_list", "horizons must be finite and positive"));
        }
        if config.t_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(err("t_list", "horizons must be strictly ascending"));
        }
        if config.n == 0 {
            return Err(err("n", "must be at least 1"));
        }
        let quad = QuadratureSpec::new(config.quadrature_panels).map_err(|e| err("quadrature_panels", e))?;
        if config.tube_resolution < 2 {
            return Err(err("tube_resolution", "must be at least 2"));
        }
        let g = config.guide;
        if !(g.base_intensity.is_finite() && g.base_intensity > 0.0) {
            return Err(err("guide.base_intensity", "must be finite and positive"));
        }
        if g.cells == 0 {
            return Err(err("guide.cells", "must be at least 1"));
        }
        if config.scaling_grid.iter().any(|t| !(t.is_finite() && *t > 1.0)) {
            return Err(err("scaling_grid", "horizons must be finite and above 1"));
        }
        if config.scaling_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(err("scaling_grid", "horizons must be strictly ascending"));
        }
        Ok(Experiment {
            config,
            model,
            target,
            quad,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.config.seed = seed;
        self
    }

    pub fn mc_options(&self) -> McOptions {
        McOptions::new(self.config.n, self.config.seed).with_max_jumps(self.config.max_jumps)
    }

    pub fn guide_options(&self) -> GuideOptions {
        GuideOptions {
            base_intensity: self.config.guide.base_intensity,
            cells: self.config.guide.cells,
        }
    }

    pub fn problem(&self, horizon: f64) -> TubeProblem {
        TubeProblem {
            model: self.model.clone(),
            scheme: self.config.scaling,
            target: self.target.clone(),
            epsilon: self.config.epsilon,
            horizon,
        }
    }

    pub fn horizon(&self) -> Result<f64, ConfigError> {
        self.config.horizon.ok_or_else(|| err("horizon", "required by this command"))
    }

    pub fn t_list(&self) -> Result<&[f64], ConfigError> {
        if self.config.t_list.is_empty() {
            return Err(err("t_list", "required by this command"));
        }
        Ok(&self.config.t_list)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.config).expect("config serializes")
    }
}

fn err(field: &str, message: impl fmt::Display) -> ConfigError {
    ConfigError {
        field: field.to_string(),
        line: None,
        message: message.to_string(),
    }
}

fn build_model(spec: &ModelSpec) -> Result<RateModel, ConfigError> {
    let base = match spec.m {
        Some(m) => RateModel::new(spec.l, m, spec.y, spec.z),
        None => RateModel::pure_birth(spec.l, spec.y),
    }
    .map_err(|e| err("model", e))?;
    if spec.m.is_none() && !spec.mu_overrides.is_empty() {
        return Err(err("model.mu_overrides", "a pure-birth model (no m) has no death rates"));
    }
    base.with_lambda_overrides(spec.lambda_overrides.iter().map(|(&k, &v)| (k, v)))
        .map_err(|e| err("model.lambda_overrides", e))?
        .with_mu_overrides(spec.mu_overrides.iter().map(|(&k, &v)| (k, v)))
        .map_err(|e| err("model.mu_overrides", e))
}

fn build_target(spec: &TargetSpec, resolution: usize) -> Result<TargetFunction, ConfigError> {
    let f = match spec {
        TargetSpec::Power { a, p } => TargetFunction::power(*a, *p),
        TargetSpec::PiecewiseLinear { nodes } => {
            TargetFunction::piecewise_linear(nodes.iter().map(|n| (n[0], n[1])).collect())
        }
    }
    .map_err(|e| err("target", e))?;
    let membership = f.validate(resolution.max(2));
    if !membership.member {
        return Err(err("target", membership.to_string()));
    }
    Ok(f)
}

/// Line of the innermost key of `field` (a dotted path), searched after the
/// line of each enclosing key.
fn locate(text: &str, field: &str) -> Option<usize> {
    if field.is_empty() {
        return None;
    }
    let mut from = 0;
    for key in field.split('.') {
        let needle = format!("\"{key}\"");
        let at = text[from..].find(&needle)? + from;
        from = at + needle.len();
    }
    let at = from.checked_sub(1)?;
    Some(text[..at].matches('\n').count() + 1)
}
