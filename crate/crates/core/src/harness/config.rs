//! Run configuration: a flat TOML table. Only `master_seed` is required;
//! every other key has a documented default (see `docs/config.md`).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{EstimatorParams, DEFAULT_CLAMP_EPS, DEFAULT_EPOCHS, DEFAULT_LEARNING_RATE};
use crate::fl::{
    partition_mode, FlSettings, Partition, DEFAULT_CENTER_SCALE, DEFAULT_FEATURE_DIM, DEFAULT_LOCAL_EPOCHS,
    DEFAULT_LOCAL_LR, DEFAULT_NOISE_RATE_BLURRED, DEFAULT_NUM_CLASSES, DEFAULT_SHARDS_PER_OWNER, DEFAULT_TEST_SIZE,
};
use crate::strategy::{StrategyKind, DEFAULT_CONST_BID, DEFAULT_RAND_MAX};
use crate::win_model::DEFAULT_NUM_BUCKETS;

pub const DEFAULT_BUDGET: f64 = 50.0;
pub const DEFAULT_BUDGET_SCALE: f64 = 0.01;
pub const DEFAULT_BOOTSTRAP_ROUNDS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionKind {
    Iid,
    Niid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub master_seed: u64,
    pub pool_size: usize,
    pub sample_min: u32,
    pub sample_max: u32,
    /// Budget for every agent, before `budget_scale`.
    pub budget: f64,
    /// Optional per-agent budgets (before `budget_scale`); overrides `budget`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budgets: Option<Vec<f64>>,
    pub budget_scale: f64,
    pub strategies: Vec<StrategyKind>,
    pub const_bid: f64,
    pub rand_max: f64,
    /// Fixed Lin coefficient; when absent it is set from the bootstrap history.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lin_coef: Option<f64>,
    pub estimator_lr: f64,
    pub estimator_epochs: usize,
    pub clamp_eps: f64,
    pub num_buckets: usize,
    pub bootstrap_rounds: usize,
    pub partition: PartitionKind,
    pub shards_per_owner: usize,
    pub noise_rate_blurred: f64,
    pub train_fl: bool,
    pub local_epochs: usize,
    pub local_lr: f64,
    pub feature_dim: usize,
    pub num_classes: usize,
    pub center_scale: f64,
    pub test_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub idx_train_images: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub idx_train_labels: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub idx_test_images: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub idx_test_labels: Option<PathBuf>,
    pub output_dir: PathBuf,
}

pub const KNOWN_KEYS: &[&str] = &[
    "master_seed",
    "pool_size",
    "sample_min",
    "sample_max",
    "budget",
    "budgets",
    "budget_scale",
    "strategies",
    "const_bid",
    "rand_max",
    "lin_coef",
    "estimator_lr",
    "estimator_epochs",
    "clamp_eps",
    "num_buckets",
    "bootstrap_rounds",
    "partition",
    "shards_per_owner",
    "noise_rate_blurred",
    "train_fl",
    "local_epochs",
    "local_lr",
    "feature_dim",
    "num_classes",
    "center_scale",
    "test_size",
    "idx_train_images",
    "idx_train_labels",
    "idx_test_images",
    "idx_test_labels",
    "output_dir",
];

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            master_seed: 0,
            pool_size: 100,
            sample_min: 1000,
            sample_max: 10_000,
            budget: DEFAULT_BUDGET,
            budgets: None,
            budget_scale: DEFAULT_BUDGET_SCALE,
            strategies: StrategyKind::ALL.to_vec(),
            const_bid: DEFAULT_CONST_BID,
            rand_max: DEFAULT_RAND_MAX,
            lin_coef: None,
            estimator_lr: DEFAULT_LEARNING_RATE,
            estimator_epochs: DEFAULT_EPOCHS,
            clamp_eps: DEFAULT_CLAMP_EPS,
            num_buckets: DEFAULT_NUM_BUCKETS,
            bootstrap_rounds: DEFAULT_BOOTSTRAP_ROUNDS,
            partition: PartitionKind::Iid,
            shards_per_owner: DEFAULT_SHARDS_PER_OWNER,
            noise_rate_blurred: DEFAULT_NOISE_RATE_BLURRED,
            train_fl: true,
            local_epochs: DEFAULT_LOCAL_EPOCHS,
            local_lr: DEFAULT_LOCAL_LR,
            feature_dim: DEFAULT_FEATURE_DIM,
            num_classes: DEFAULT_NUM_CLASSES,
            center_scale: DEFAULT_CENTER_SCALE,
            test_size: DEFAULT_TEST_SIZE,
            idx_train_images: None,
            idx_train_labels: None,
            idx_test_images: None,
            idx_test_labels: None,
            output_dir: PathBuf::from("out"),
        }
    }
}

fn suggest(key: &str) -> Option<String> {
    KNOWN_KEYS
        .iter()
        .map(|k| (strsim::levenshtein(key, k), *k))
        .filter(|(d, _)| *d <= 3)
        .min()
        .map(|(_, k)| k.to_string())
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(key, format!("must be a positive finite number, got {v}")))
    }
}

impl RunConfig {
    /// Default configuration with the given seed.
    pub fn with_seed(master_seed: u64) -> Self {
        RunConfig { master_seed, ..Default::default() }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(format!("malformed config: {}", e.message())))?;
        for key in table.keys() {
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::UnknownKey { key: key.clone(), suggestion: suggest(key) });
            }
        }
        if !table.contains_key("master_seed") {
            return Err(Error::invalid("master_seed", "required key is missing"));
        }
        let config: RunConfig = table.try_into().map_err(|e: toml::de::Error| {
            let msg = e.message().to_string();
            let key = KNOWN_KEYS
                .iter()
                .find(|k| msg.contains(&format!("`{k}`")))
                .copied()
                .unwrap_or("config");
            Error::invalid(key, msg)
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.pool_size < 2 {
            return Err(Error::invalid("pool_size", format!("need at least 2 owners, got {}", self.pool_size)));
        }
        if self.sample_min < 1 {
            return Err(Error::invalid("sample_min", "must be at least 1"));
        }
        if self.sample_max < self.sample_min {
            return Err(Error::invalid("sample_max", "must not be below sample_min"));
        }
        positive("budget", self.budget)?;
        positive("budget_scale", self.budget_scale)?;
        if self.strategies.is_empty() {
            return Err(Error::invalid("strategies", "need at least one agent"));
        }
        if let Some(b) = &self.budgets {
            if b.len() != self.strategies.len() {
                return Err(Error::invalid(
                    "budgets",
                    format!("{} budgets for {} strategies", b.len(), self.strategies.len()),
                ));
            }
            for &v in b {
                positive("budgets", v)?;
            }
        }
        positive("const_bid", self.const_bid)?;
        positive("rand_max", self.rand_max)?;
        if let Some(c) = self.lin_coef {
            positive("lin_coef", c)?;
        }
        positive("estimator_lr", self.estimator_lr)?;
        positive("clamp_eps", self.clamp_eps)?;
        if self.clamp_eps >= 1.0 {
            return Err(Error::invalid("clamp_eps", "must be below 1"));
        }
        if self.num_buckets < 2 {
            return Err(Error::invalid("num_buckets", "need at least 2 buckets"));
        }
        if !(0.0..=1.0).contains(&self.noise_rate_blurred) {
            return Err(Error::invalid("noise_rate_blurred", "must lie in [0, 1]"));
        }
        positive("local_lr", self.local_lr)?;
        if self.feature_dim == 0 {
            return Err(Error::invalid("feature_dim", "must be positive"));
        }
        if self.num_classes < 2 {
            return Err(Error::invalid("num_classes", "need at least 2 classes"));
        }
        positive("center_scale", self.center_scale)?;
        if self.test_size == 0 {
            return Err(Error::invalid("test_size", "must be positive"));
        }
        self.partition()?;
        let idx = [
            &self.idx_train_images,
            &self.idx_train_labels,
            &self.idx_test_images,
            &self.idx_test_labels,
        ];
        let set = idx.iter().filter(|p| p.is_some()).count();
        if set != 0 && set != idx.len() {
            return Err(Error::invalid(
                "idx_train_images",
                "the four idx_* paths must be given together",
            ));
        }
        Ok(())
    }

    pub fn partition(&self) -> Result<Partition> {
        partition_mode(self.partition == PartitionKind::Niid, self.shards_per_owner, self.num_classes)
    }

    /// Effective (scaled) budget of each agent, in agent order.
    pub fn agent_budgets(&self) -> Vec<f64> {
        match &self.budgets {
            Some(b) => b.iter().map(|v| v * self.budget_scale).collect(),
            None => vec![self.budget * self.budget_scale; self.strategies.len()],
        }
    }

    pub fn estimator_params(&self) -> EstimatorParams {
        EstimatorParams {
            learning_rate: self.estimator_lr,
            epochs: self.estimator_epochs,
            clamp_eps: self.clamp_eps,
        }
    }

    pub fn fl_settings(&self) -> Result<FlSettings> {
        Ok(FlSettings {
            partition: self.partition()?,
            noise_rate_blurred: self.noise_rate_blurred,
            local_epochs: self.local_epochs,
            local_lr: self.local_lr,
            num_classes: self.num_classes,
            feature_dim: self.feature_dim,
            center_scale: self.center_scale,
            test_size: self.test_size,
        })
    }

    pub fn uses_idx(&self) -> bool {
        self.idx_train_images.is_some()
    }
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    RunConfig::from_toml_str(&text)
}
