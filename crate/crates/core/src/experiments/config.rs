use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::macsim::MacConfig;
use crate::population::HashingMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    EstimationSweep,
    ThresholdSweep,
    MacSim,
    AnalysisTable,
    Validate,
}

/// Top-level experiment file. Every section has defaults, so an empty file
/// is a valid config; unknown keys anywhere are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// When set, the file may only be run by this subcommand.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<ExperimentKind>,
    pub seed: u64,
    /// Replications per sweep point.
    pub reps: u32,
    pub estimation: EstimationSweepConfig,
    pub threshold: ThresholdConfig,
    pub mac: MacExperimentConfig,
    pub analysis: AnalysisTableConfig,
    pub validate: ValidateConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: None,
            seed: 1,
            reps: 2000,
            estimation: EstimationSweepConfig::default(),
            threshold: ThresholdConfig::default(),
            mac: MacExperimentConfig::default(),
            analysis: AnalysisTableConfig::default(),
            validate: ValidateConfig::default(),
        }
    }
}

/// Slot counts of the three estimators against one activity probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimationSweepConfig {
    pub types: usize,
    /// `D`, nodes deployed per type.
    pub nodes_per_type: usize,
    pub bitmap_len: u32,
    pub s_w: u32,
    pub nested_broadcasts: bool,
    pub hashing: HashingMode,
    /// Activity probability per type; swept entries are overwritten.
    pub q: Vec<f64>,
    /// 1-based types whose `q` follows the sweep axis; empty means all.
    pub swept_types: Vec<usize>,
    pub q_from: f64,
    pub q_to: f64,
    pub q_step: f64,
}

impl Default for EstimationSweepConfig {
    fn default() -> Self {
        Self {
            types: 4,
            nodes_per_type: 100,
            bitmap_len: 18,
            s_w: 5,
            nested_broadcasts: false,
            hashing: HashingMode::Redraw,
            q: vec![0.1, 0.2, 0.75, 0.12],
            swept_types: vec![1],
            q_from: 0.05,
            q_to: 1.0,
            q_step: 0.05,
        }
    }
}

impl EstimationSweepConfig {
    /// Sweep values, endpoints included.
    pub fn axis(&self) -> Vec<f64> {
        let n = ((self.q_to - self.q_from) / self.q_step + 1e-9).floor() as usize;
        (0..=n).map(|k| round6(self.q_from + k as f64 * self.q_step)).collect()
    }

    /// Activity vector at sweep value `x`.
    pub fn q_at(&self, x: f64) -> Vec<f64> {
        (0..self.types)
            .map(|b| {
                if self.swept_types.is_empty() || self.swept_types.contains(&(b + 1)) {
                    x
                } else {
                    self.q[b]
                }
            })
            .collect()
    }

    fn check(&self) -> Result<()> {
        let at = |field: &str, msg: String| Err(config_err(&format!("estimation.{field}"), msg));
        if !(2..=12).contains(&self.types) {
            return at("types", format!("{} outside 2..=12", self.types));
        }
        if self.q.len() != self.types {
            return at("q", format!("{} entries for {} types", self.q.len(), self.types));
        }
        if let Some(b) = self.swept_types.iter().find(|&&b| b == 0 || b > self.types) {
            return at("swept_types", format!("type {b} outside 1..={}", self.types));
        }
        if self.q.iter().chain([&self.q_from, &self.q_to]).any(|q| !(0.0..=1.0).contains(q)) {
            return at("q", "probabilities must lie in [0,1]".into());
        }
        if self.q_step <= 0.0 || self.q_to < self.q_from {
            return at("q_step", "need q_step > 0 and q_from ≤ q_to".into());
        }
        check_estimation_common("estimation", self.bitmap_len, self.s_w, self.nodes_per_type)
    }
}

/// Bisection for the activity probability at which a method costs as many
/// slots as the repeated-LoF baseline. All types share one `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThresholdConfig {
    pub types: Vec<usize>,
    pub nodes_per_type: Vec<usize>,
    pub bitmap_len: u32,
    pub s_w: u32,
    pub nested_broadcasts: bool,
    pub hashing: HashingMode,
    /// Bisection stops when the bracket is narrower than this.
    pub tolerance: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            types: vec![4, 5, 6],
            nodes_per_type: vec![100],
            bitmap_len: 18,
            s_w: 5,
            nested_broadcasts: false,
            hashing: HashingMode::Redraw,
            tolerance: 0.002,
        }
    }
}

impl ThresholdConfig {
    fn check(&self) -> Result<()> {
        if self.types.is_empty() || self.types.iter().any(|t| !(2..=12).contains(t)) {
            return Err(config_err("threshold.types", "each entry must lie in 2..=12"));
        }
        if self.nodes_per_type.is_empty() {
            return Err(config_err("threshold.nodes_per_type", "at least one value is required"));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 0.5) {
            return Err(config_err("threshold.tolerance", "must lie in (0, 0.5)"));
        }
        for &d in &self.nodes_per_type {
            check_estimation_common("threshold", self.bitmap_len, self.s_w, d)?;
        }
        Ok(())
    }
}

/// λ sweep of the MAC simulator in both modes. Every class gets the same λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MacExperimentConfig {
    pub lambdas: Vec<f64>,
    pub frames: u64,
    pub warmup: u64,
    pub batches: usize,
    /// Also write one per-frame CSV per sweep point and mode.
    pub write_frames: bool,
    pub protocol: MacConfig,
}

impl Default for MacExperimentConfig {
    fn default() -> Self {
        Self {
            lambdas: vec![0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 2.0, 4.0],
            frames: 2000,
            warmup: 200,
            batches: 20,
            write_frames: false,
            protocol: MacConfig::default(),
        }
    }
}

impl MacExperimentConfig {
    fn check(&self) -> Result<()> {
        if self.lambdas.is_empty() || self.lambdas.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(config_err("mac.lambdas", "need at least one nonnegative rate"));
        }
        if self.warmup >= self.frames {
            return Err(config_err("mac.warmup", "must be smaller than mac.frames"));
        }
        if self.batches < 2 || (self.frames - self.warmup) < self.batches as u64 {
            return Err(config_err("mac.batches", "need 2 ≤ batches ≤ frames - warmup"));
        }
        self.protocol
            .validate()
            .map_err(|e| config_err("mac.protocol", strip_prefix(e)))
    }
}

/// Grid of closed forms next to their references.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisTableConfig {
    pub s_w: u32,
    /// Estimator grid: every combination of type count, per-type count and
    /// bitmap length; all types share the count.
    pub types: Vec<usize>,
    pub counts: Vec<u64>,
    pub bitmap_lens: Vec<u32>,
    /// Monte Carlo runs per estimator point.
    pub mc_runs: u32,
    /// `(W, d, n)` points of the single-channel model, with `n̂ = n`.
    pub mac_points: Vec<[u32; 3]>,
    pub process_samples: u64,
}

impl Default for AnalysisTableConfig {
    fn default() -> Self {
        Self {
            s_w: 5,
            types: vec![2, 3, 4],
            counts: vec![0, 1, 10, 100],
            bitmap_lens: vec![7, 10],
            mc_runs: 20_000,
            mac_points: vec![[50, 1, 5], [50, 5, 5], [50, 1, 20], [50, 5, 20]],
            process_samples: 100_000,
        }
    }
}

impl AnalysisTableConfig {
    fn check(&self) -> Result<()> {
        if self.s_w == 0 {
            return Err(config_err("analysis.s_w", "must be at least 1"));
        }
        if self.types.iter().any(|t| !(2..=12).contains(t)) {
            return Err(config_err("analysis.types", "each entry must lie in 2..=12"));
        }
        if self.bitmap_lens.iter().any(|&t| t == 0 || t > 31) {
            return Err(config_err("analysis.bitmap_lens", "each entry must lie in 1..=31"));
        }
        if self.mc_runs < 2 || self.process_samples < 2 {
            return Err(config_err("analysis.mc_runs", "Monte Carlo needs at least two samples"));
        }
        if self.mac_points.iter().any(|&[w, d, n]| w == 0 || d == 0 || n == 0) {
            return Err(config_err("analysis.mac_points", "W, d and n must be positive"));
        }
        Ok(())
    }
}

/// Sizes of the cross-checks run by `validate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateConfig {
    /// Shared realizations per type count for the estimator agreement check.
    pub equivalence_runs: u32,
    /// Monte Carlo runs per point for `E[K]` and `E[R]`.
    pub slot_mc_runs: u32,
    /// Samples per point for the single-channel process.
    pub process_samples: u64,
    /// Run the analytic-versus-process check of the single-channel model.
    pub frame_model: bool,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self {
            equivalence_runs: 10_000,
            slot_mc_runs: 100_000,
            process_samples: 100_000,
            frame_model: true,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| config_err("", e.to_string().trim_end()))?;
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let msg = e.into_inner().to_string();
            config_err(if path == "." { "" } else { &path }, msg.trim_end())
        })?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Resolved config as TOML, for output headers.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn check(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(config_err("reps", "must be at least 1"));
        }
        self.estimation.check()?;
        self.threshold.check()?;
        self.mac.check()?;
        self.analysis.check()
    }

    /// Rejects a file pinned to another experiment.
    pub fn require_kind(&self, kind: ExperimentKind) -> Result<()> {
        match self.kind {
            Some(k) if k != kind => Err(config_err("kind", format!("file is for {k:?}, not {kind:?}"))),
            _ => Ok(()),
        }
    }
}

fn check_estimation_common(section: &str, t: u32, s_w: u32, d: usize) -> Result<()> {
    if !(1..=31).contains(&t) {
        return Err(config_err(&format!("{section}.bitmap_len"), "must lie in 1..=31"));
    }
    if s_w == 0 {
        return Err(config_err(&format!("{section}.s_w"), "must be at least 1"));
    }
    if d == 0 {
        return Err(config_err(&format!("{section}.nodes_per_type"), "must be positive"));
    }
    Ok(())
}

fn config_err(path: &str, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.to_string(),
        message: message.into(),
    }
}

fn strip_prefix(e: Error) -> String {
    match e {
        Error::InvalidParameter(m) => m,
        other => other.to_string(),
    }
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}
