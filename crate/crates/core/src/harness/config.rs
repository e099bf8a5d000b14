use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphSpec};
use crate::recon::{BpParams, SupportModel};
use crate::rng::fnv1a;
use crate::sampler::Growth;
use crate::spectral::{dct_basis, gft_basis, OrthoBasis};

/// Sparsity basis used by an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    #[default]
    GftNormalized,
    GftCombinatorial,
    Dct,
}

impl BasisKind {
    pub fn build(self, g: &Graph) -> Result<OrthoBasis> {
        match self {
            BasisKind::GftNormalized => gft_basis(g, true),
            BasisKind::GftCombinatorial => gft_basis(g, false),
            BasisKind::Dct => dct_basis(g.n()),
        }
    }
}

/// Samplers an experiment can compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    ProposedRepeat,
    ProposedInsert,
    Uniform,
    Weighted,
    Minpinv,
    Successive,
}

impl SamplerKind {
    pub const ALL: [SamplerKind; 6] = [
        SamplerKind::ProposedRepeat,
        SamplerKind::ProposedInsert,
        SamplerKind::Uniform,
        SamplerKind::Weighted,
        SamplerKind::Minpinv,
        SamplerKind::Successive,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            SamplerKind::ProposedRepeat => "proposed-repeat",
            SamplerKind::ProposedInsert => "proposed-insert",
            SamplerKind::Uniform => "uniform",
            SamplerKind::Weighted => "weighted",
            SamplerKind::Minpinv => "minpinv",
            SamplerKind::Successive => "successive",
        }
    }

    pub fn growth(self) -> Option<Growth> {
        match self {
            SamplerKind::ProposedRepeat => Some(Growth::RepeatDominating),
            SamplerKind::ProposedInsert => Some(Growth::InsertNew),
            _ => None,
        }
    }

    /// Whether the sampler needs the signal support to build its operator.
    pub fn needs_support(self) -> bool {
        matches!(self, SamplerKind::Weighted | SamplerKind::Minpinv)
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalConfig {
    pub k: usize,
    #[serde(default = "default_model")]
    pub model: SupportModel,
}

fn default_model() -> SupportModel {
    SupportModel::Random
}

/// The swept variable: `{"m": [...]}` or `{"sigma": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sweep {
    M(Vec<usize>),
    Sigma(Vec<f64>),
}

impl Sweep {
    pub fn len(&self) -> usize {
        match self {
            Sweep::M(v) => v.len(),
            Sweep::Sigma(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn strictly_increasing(&self) -> bool {
        match self {
            Sweep::M(v) => v.windows(2).all(|w| w[0] < w[1]),
            Sweep::Sigma(v) => v.windows(2).all(|w| w[0] < w[1]),
        }
    }
}

fn default_trials() -> usize {
    1
}

/// Configuration shared by the known- and unknown-support sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    #[serde(default)]
    pub graph_seed: u64,
    #[serde(default)]
    pub basis: BasisKind,
    pub signal: SignalConfig,
    pub samplers: Vec<SamplerKind>,
    pub sweep: Sweep,
    /// Number of measurements for a sigma sweep.
    #[serde(default)]
    pub m: Option<usize>,
    /// Noise level for an m sweep.
    #[serde(default)]
    pub sigma: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Keep one operator per (sampler, m) for every trial and sweep value.
    #[serde(default)]
    pub fixed_operator: bool,
    #[serde(default)]
    pub solver: BpParams,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.graph.validate()?;
        let n = self.graph.node_count();
        if self.trials == 0 {
            return invalid("trials must be at least 1");
        }
        if self.samplers.is_empty() {
            return invalid("at least one sampler is required");
        }
        let mut seen = HashSet::new();
        for s in &self.samplers {
            if !seen.insert(*s) {
                return invalid(format!("sampler {s} listed twice"));
            }
        }
        if self.signal.k == 0 || self.signal.k > n {
            return invalid(format!("sparsity {} must be in 1..={n}", self.signal.k));
        }
        if self.sweep.is_empty() || !self.sweep.strictly_increasing() {
            return invalid("sweep values must be nonempty and strictly increasing");
        }
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return invalid("sigma must be finite and nonnegative");
        }
        match &self.sweep {
            Sweep::M(ms) => {
                if ms[0] == 0 {
                    return invalid("m values must be positive");
                }
                if self.m.is_some() {
                    return invalid("fixed m is only used by sigma sweeps");
                }
            }
            Sweep::Sigma(sigmas) => {
                if sigmas.iter().any(|s| !s.is_finite() || *s < 0.0) {
                    return invalid("sigma values must be finite and nonnegative");
                }
                match self.m {
                    None | Some(0) => return invalid("a sigma sweep needs a positive m"),
                    Some(_) => {}
                }
            }
        }
        Ok(())
    }

    /// `(m, sigma)` for each sweep value, in sweep order.
    pub fn cells(&self) -> Vec<(usize, f64)> {
        match &self.sweep {
            Sweep::M(ms) => ms.iter().map(|&m| (m, self.sigma)).collect(),
            Sweep::Sigma(sigmas) => {
                let m = self.m.unwrap_or(0);
                sigmas.iter().map(|&s| (m, s)).collect()
            }
        }
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}

/// Median condition numbers on Erdős–Rényi graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionConfig {
    pub n: usize,
    pub edge_probabilities: Vec<f64>,
    pub k: usize,
    pub m: Vec<usize>,
    #[serde(default = "default_model")]
    pub model: SupportModel,
    #[serde(default)]
    pub basis: BasisKind,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ConditionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return invalid("trials must be at least 1");
        }
        if self.k == 0 || self.k > self.n {
            return invalid(format!("sparsity {} must be in 1..={}", self.k, self.n));
        }
        if self.m.is_empty() || self.m[0] == 0 || !self.m.windows(2).all(|w| w[0] < w[1]) {
            return invalid("m values must be positive and strictly increasing");
        }
        if self.edge_probabilities.is_empty() {
            return invalid("at least one edge probability is required");
        }
        for &p in &self.edge_probabilities {
            GraphSpec::ErdosRenyi { n: self.n, p }.validate()?;
        }
        Ok(())
    }
}

/// Dominating-set size against the hop count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DominatingConfig {
    pub graphs: Vec<GraphSpec>,
    #[serde(default)]
    pub graph_seed: u64,
    pub p_max: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl DominatingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p_max == 0 {
            return invalid("p_max must be at least 1");
        }
        if self.graphs.is_empty() {
            return invalid("at least one graph is required");
        }
        self.graphs.iter().try_for_each(GraphSpec::validate)
    }
}

fn default_repetitions() -> usize {
    3
}

/// Wall-clock sampling time per method and m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuntimeConfig {
    pub graph: GraphSpec,
    #[serde(default)]
    pub graph_seed: u64,
    #[serde(default)]
    pub basis: BasisKind,
    /// Size of the low-frequency support handed to support-aware methods.
    pub k: usize,
    pub methods: Vec<SamplerKind>,
    pub m: Vec<usize>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl RuntimeConfig {
    pub fn validate(&self) -> Result<()> {
        self.graph.validate()?;
        let n = self.graph.node_count();
        if self.repetitions == 0 {
            return invalid("repetitions must be at least 1");
        }
        if self.k == 0 || self.k > n {
            return invalid(format!("sparsity {} must be in 1..={n}", self.k));
        }
        if self.methods.is_empty() {
            return invalid("at least one method is required");
        }
        if self.m.is_empty() || self.m[0] == 0 || !self.m.windows(2).all(|w| w[0] < w[1]) {
            return invalid("m values must be positive and strictly increasing");
        }
        Ok(())
    }
}

fn default_wsn_n() -> usize {
    250
}
fn default_radius() -> f64 {
    0.2
}
fn default_bs_factor() -> f64 {
    5.0
}
fn default_redraws() -> usize {
    64
}

/// Sensor-network data gathering: sensors in the unit square, a base
/// station `base_station_factor` side lengths away.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WsnScenario {
    #[serde(default = "default_wsn_n")]
    pub n: usize,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_bs_factor")]
    pub base_station_factor: f64,
    pub k: usize,
    #[serde(default = "default_model")]
    pub model: SupportModel,
    pub cluster_heads: Vec<usize>,
    pub m: Vec<usize>,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub solver: BpParams,
    /// Cap on cluster-head re-draws per trial.
    #[serde(default = "default_redraws")]
    pub max_redraws: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl WsnScenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius <= std::f64::consts::SQRT_2) {
            return invalid("radius must lie in (0, sqrt 2]");
        }
        if !self.base_station_factor.is_finite() || self.base_station_factor <= 0.0 {
            return invalid("base-station distance factor must be positive");
        }
        if self.trials == 0 {
            return invalid("trials must be at least 1");
        }
        if self.k == 0 || self.k > self.n {
            return invalid(format!("sparsity {} must be in 1..={}", self.k, self.n));
        }
        if self.m.is_empty() || self.m[0] == 0 || !self.m.windows(2).all(|w| w[0] < w[1]) {
            return invalid("m values must be positive and strictly increasing");
        }
        if self.m[self.m.len() - 1] > self.n {
            return invalid("m cannot exceed the number of sensors");
        }
        for &c in &self.cluster_heads {
            if c == 0 || c > self.n {
                return invalid(format!("cluster-head count {c} must be in 1..={}", self.n));
            }
        }
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return invalid("sigma must be finite and nonnegative");
        }
        Ok(())
    }

    /// Distance from every sensor to the base station (unit square side).
    pub fn base_station_distance(&self) -> f64 {
        self.base_station_factor
    }
}

/// FNV-1a of the canonical JSON form, printed in CSV metadata.
pub fn config_hash<T: Serialize>(config: &T) -> u64 {
    let json = serde_json::to_string(config).unwrap_or_default();
    fnv1a(json.as_bytes())
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
