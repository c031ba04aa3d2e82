//! JSON experiment configuration. Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::data::Task;
use super::output::digest;
use super::train::{LossKind, TrainConfig};
use crate::bounds::Constants;
use crate::complexity::OptimizerConfig;
use crate::error::{Error, Result};
use crate::network::{NetworkDocument, NetworkSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Estimate,
    RankSweep,
    DepthSweep,
    Counterexample,
    DiameterCheck,
    BoundTable,
    Collapse,
    Gap,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Estimate => "estimate",
            ExperimentKind::RankSweep => "rank_sweep",
            ExperimentKind::DepthSweep => "depth_sweep",
            ExperimentKind::Counterexample => "counterexample",
            ExperimentKind::DiameterCheck => "diameter_check",
            ExperimentKind::BoundTable => "bound_table",
            ExperimentKind::Collapse => "collapse",
            ExperimentKind::Gap => "gap",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub m: usize,
    pub d: usize,
    #[serde(rename = "R")]
    pub radius: f64,
    pub seed: u64,
    #[serde(default)]
    pub task: Task,
}

/// Optimizer settings; a missing step size resolves to `0.1 / Π B_i` for the
/// network being searched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerSettings {
    pub step_size: Option<f64>,
    pub iterations: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            step_size: None,
            iterations: OptimizerConfig::DEFAULT_ITERATIONS,
            restarts: OptimizerConfig::DEFAULT_RESTARTS,
            seed: 0,
        }
    }
}

impl OptimizerSettings {
    pub fn resolve(&self, spec: &NetworkSpec) -> OptimizerConfig {
        let default = OptimizerConfig::default_for(spec, self.seed);
        OptimizerConfig {
            step_size: self.step_size.unwrap_or(default.step_size),
            iterations: self.iterations,
            restarts: self.restarts,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RankSweepConfig {
    /// Rank caps to sweep; default `1, 2, 4, …` up to `min(d, h)`.
    pub ranks: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DepthSweepConfig {
    pub max_depth: usize,
    pub rank: usize,
    pub width: usize,
    pub spectral_cap: f64,
    /// Monte Carlo estimates are run for depths up to this value (0 disables).
    pub mc_max_depth: usize,
    /// Sample sizes for the bound columns; default `[data.m]`.
    pub m_values: Vec<usize>,
}

impl Default for DepthSweepConfig {
    fn default() -> Self {
        Self { max_depth: 20, rank: 2, width: 64, spectral_cap: 1.0, mc_max_depth: 0, m_values: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RandomSpecsConfig {
    pub count: usize,
    pub max_depth: usize,
    pub max_width: usize,
    pub min_spectral_cap: f64,
    pub max_spectral_cap: f64,
}

impl Default for RandomSpecsConfig {
    fn default() -> Self {
        Self { count: 100, max_depth: 4, max_width: 32, min_spectral_cap: 0.5, max_spectral_cap: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GapConfig {
    pub n_seeds: usize,
    pub m_test: usize,
    pub train: TrainConfig,
}

impl Default for GapConfig {
    fn default() -> Self {
        Self {
            n_seeds: 20,
            m_test: 2048,
            train: TrainConfig {
                epochs: 30,
                learning_rate: 0.5,
                batch_size: 32,
                seed: 0,
                label_noise: 0.0,
                loss: LossKind::Ramp,
            },
        }
    }
}

fn default_draws() -> usize {
    OptimizerConfig::DEFAULT_DRAWS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Set by the CLI subcommand when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ExperimentKind>,
    /// Network template; weights are used only by `bound_table`.
    pub network: NetworkDocument,
    pub data: DataConfig,
    #[serde(default)]
    pub optimizer: OptimizerSettings,
    #[serde(default = "default_draws")]
    pub n_draws: usize,
    #[serde(default)]
    pub constants: Constants,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub rank_sweep: RankSweepConfig,
    #[serde(default)]
    pub depth_sweep: DepthSweepConfig,
    /// Random specs for `diameter_check`.
    #[serde(default)]
    pub diameter_check: RandomSpecsConfig,
    /// Random twin configurations for `collapse`.
    #[serde(default = "collapse_defaults")]
    pub collapse: RandomSpecsConfig,
    #[serde(default)]
    pub gap: GapConfig,
}

fn collapse_defaults() -> RandomSpecsConfig {
    RandomSpecsConfig { count: 50, max_depth: 4, max_width: 16, min_spectral_cap: 0.5, max_spectral_cap: 1.5 }
}

fn config_error(path: &str, message: impl Into<String>) -> Error {
    Error::Config { path: path.into(), message: message.into() }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de)
            .map_err(|e| config_error(&e.path().to_string(), e.inner().to_string()))?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Digest of the canonical JSON with the output path removed.
    pub fn digest(&self) -> Result<String> {
        let mut c = self.clone();
        c.output = None;
        Ok(digest(&serde_json::to_vec(&c)?))
    }

    pub fn kind(&self) -> Result<ExperimentKind> {
        self.kind.ok_or_else(|| config_error("kind", "experiment kind is required"))
    }

    pub fn template(&self) -> Result<NetworkSpec> {
        self.network.spec().map_err(|e| config_error("network", e.to_string()))
    }

    /// Checks every section the selected experiment reads.
    pub fn validate(&self) -> Result<()> {
        let kind = self.kind()?;
        let spec = self.template()?;
        if self.network.weights.is_some() {
            self.network.to_parts().map_err(|e| config_error("network.weights", e.to_string()))?;
        }
        if self.data.m == 0 || self.data.d == 0 {
            return Err(config_error("data", "m and d must be at least 1"));
        }
        if !(self.data.radius > 0.0) || !self.data.radius.is_finite() {
            return Err(config_error("data.R", "radius must be positive"));
        }
        self.constants.validate().map_err(|e| config_error("constants", e.to_string()))?;
        self.optimizer.resolve(&spec).validate().map_err(|e| config_error("optimizer", e.to_string()))?;
        if self.n_draws < 2 {
            return Err(config_error("n_draws", "need at least 2 draws"));
        }
        let needs_input_match =
            matches!(kind, ExperimentKind::Estimate | ExperimentKind::RankSweep | ExperimentKind::Counterexample
                | ExperimentKind::BoundTable | ExperimentKind::Gap);
        if needs_input_match && spec.input_dim() != self.data.d {
            return Err(config_error(
                "network.dims",
                format!("input width {} differs from data.d = {}", spec.input_dim(), self.data.d),
            ));
        }
        match kind {
            ExperimentKind::RankSweep | ExperimentKind::Counterexample if spec.depth() != 1 => {
                Err(config_error("network.dims", "this experiment needs a single-layer network"))
            }
            ExperimentKind::RankSweep => {
                let k = spec.dims()[0].min(spec.dims()[1]);
                match &self.rank_sweep.ranks {
                    Some(r) if r.is_empty() || r.iter().any(|&r| r == 0 || r > k) => {
                        Err(config_error("rank_sweep.ranks", format!("ranks must lie in 1..={k}")))
                    }
                    _ => Ok(()),
                }
            }
            ExperimentKind::DepthSweep => {
                let ds = &self.depth_sweep;
                if ds.max_depth == 0 || ds.rank == 0 || ds.width == 0 {
                    return Err(config_error("depth_sweep", "max_depth, rank and width must be at least 1"));
                }
                if !(ds.spectral_cap >= 0.0) || !ds.spectral_cap.is_finite() {
                    return Err(config_error("depth_sweep.spectral_cap", "must be finite and >= 0"));
                }
                if ds.m_values.contains(&0) {
                    return Err(config_error("depth_sweep.m_values", "sample sizes must be positive"));
                }
                Ok(())
            }
            ExperimentKind::DiameterCheck => check_random_specs("diameter_check", &self.diameter_check, 1),
            ExperimentKind::Collapse => {
                check_random_specs("collapse", &self.collapse, 2)?;
                if self.data.m < 2 {
                    return Err(config_error("data.m", "collapse bound needs m >= 2"));
                }
                Ok(())
            }
            ExperimentKind::Gap => {
                let g = &self.gap;
                if g.n_seeds == 0 || g.m_test == 0 {
                    return Err(config_error("gap", "n_seeds and m_test must be at least 1"));
                }
                g.train.validate().map_err(|e| config_error("gap.train", e.to_string()))?;
                if spec.output_dim() != 1 {
                    return Err(config_error("network.dims", "gap experiment needs output width 1"));
                }
                if !matches!(self.data.task, Task::GaussianBlobs { classes: 2, .. } | Task::SphereUniform) {
                    return Err(config_error("data.task", "gap experiment needs a two-class task"));
                }
                if self.constants.lipschitz < g.train.loss.lipschitz() {
                    return Err(config_error(
                        "constants.lipschitz",
                        format!("loss is {}-Lipschitz", g.train.loss.lipschitz()),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

fn check_random_specs(path: &str, c: &RandomSpecsConfig, min_depth: usize) -> Result<()> {
    if c.count == 0 || c.max_depth < min_depth || c.max_width < 2 {
        return Err(config_error(
            path,
            format!("need count >= 1, max_depth >= {min_depth} and max_width >= 2"),
        ));
    }
    if !(c.min_spectral_cap >= 0.0 && c.min_spectral_cap <= c.max_spectral_cap && c.max_spectral_cap.is_finite()) {
        return Err(config_error(path, "need 0 <= min_spectral_cap <= max_spectral_cap"));
    }
    Ok(())
}
