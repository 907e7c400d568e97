//! Strict JSON configuration documents for the experiment driver.
//!
//! Every document carries a `version` field and rejects unknown keys so
//! hyperparameter typos fail loudly instead of silently using defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use mxdisc::benchmark::BenchmarkConfig;
use mxdisc::EigenMode;

pub const CONFIG_VERSION: u32 = 1;

fn default_version() -> u32 {
    CONFIG_VERSION
}

fn check_version(version: u32, what: &str) -> Result<()> {
    if version != CONFIG_VERSION {
        bail!("{what}: unsupported config version {version} (expected {CONFIG_VERSION})");
    }
    Ok(())
}

pub fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

/// `generate` input: a benchmark description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    pub benchmark: BenchmarkConfig,
}

impl GenerateConfig {
    pub fn validate(&self) -> Result<()> {
        check_version(self.version, "generate")?;
        self.benchmark.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    MxDsc,
    MxDcsc,
    Spectral,
    Consensus,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::MxDsc => "mx-dsc",
            Mode::MxDcsc => "mx-dcsc",
            Mode::Spectral => "spectral",
            Mode::Consensus => "consensus",
        }
    }
}

/// Embedding widths: selected automatically or pinned explicitly.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Dimensions {
    /// The literal string "auto".
    Auto(AutoTag),
    Explicit { kt1: usize, kt2: usize, kc: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AutoTag {
    Auto,
}

impl Default for Dimensions {
    fn default() -> Self {
        Dimensions::Auto(AutoTag::Auto)
    }
}

/// `detect` input: run one method on a pair of edge-list files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    pub mode: Mode,
    pub input1: PathBuf,
    #[serde(default)]
    pub input2: Option<PathBuf>,
    #[serde(default = "default_weight")]
    pub alpha: f64,
    #[serde(default = "default_weight")]
    pub beta: f64,
    #[serde(default = "default_weight")]
    pub gamma: f64,
    #[serde(default)]
    pub dimensions: Dimensions,
    /// Cluster count for the spectral / consensus baselines.
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub k_max: Option<usize>,
    #[serde(default = "default_merge_threshold")]
    pub merge_threshold: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub mean_aggregate: bool,
    #[serde(default)]
    pub eigen_mode: EigenMode,
    pub seeds: Vec<u64>,
}

fn default_weight() -> f64 {
    0.5
}

fn default_merge_threshold() -> f64 {
    mxdisc::model_selection::DEFAULT_MERGE_THRESHOLD
}

fn default_max_iter() -> usize {
    100
}

fn default_tol() -> f64 {
    1e-6
}

impl DetectConfig {
    pub fn validate(&self) -> Result<()> {
        check_version(self.version, "detect")?;
        if self.seeds.is_empty() {
            bail!("detect: seeds must be non-empty");
        }
        match self.mode {
            Mode::MxDsc | Mode::MxDcsc => {
                if self.input2.is_none() {
                    bail!("detect: mode {} needs input2", self.mode.as_str());
                }
            }
            Mode::Spectral | Mode::Consensus => {}
        }
        Ok(())
    }
}

/// `sweep` input: a parameter grid over generated instances.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    pub experiment: String,
    /// Benchmark template; the swept field is overwritten per grid point.
    pub base: BenchmarkConfig,
    pub vary: SweepParameter,
    pub values: Vec<f64>,
    pub seeds: Vec<u64>,
    pub methods: Vec<Mode>,
    #[serde(default = "default_weight")]
    pub alpha: f64,
    #[serde(default = "default_weight")]
    pub beta: f64,
    #[serde(default = "default_weight")]
    pub gamma: f64,
    /// "auto" selects dimensions per instance; "true" uses the generator's
    /// planted counts; an object pins them.
    #[serde(default = "default_sweep_dimensions")]
    pub dimensions: SweepDimensions,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub mean_aggregate: bool,
    #[serde(default)]
    pub eigen_mode: EigenMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Mu,
    P1,
    KShared,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepDimensions {
    Tag(SweepDimensionsTag),
    Explicit { kt1: usize, kt2: usize, kc: usize },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepDimensionsTag {
    Auto,
    True,
}

fn default_sweep_dimensions() -> SweepDimensions {
    SweepDimensions::Tag(SweepDimensionsTag::True)
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        check_version(self.version, "sweep")?;
        if self.values.is_empty() {
            bail!("sweep: values must be non-empty");
        }
        if self.seeds.is_empty() {
            bail!("sweep: seeds must be non-empty");
        }
        if self.methods.is_empty() {
            bail!("sweep: methods must be non-empty");
        }
        for m in &self.methods {
            if matches!(m, Mode::Spectral) {
                bail!("sweep: mode spectral is not a sweep method; use consensus");
            }
        }
        if matches!(self.vary, SweepParameter::KShared) {
            for v in &self.values {
                if v.fract() != 0.0 || *v < 0.0 {
                    bail!("sweep: k_shared values must be nonnegative integers, got {v}");
                }
            }
        }
        Ok(())
    }
}
