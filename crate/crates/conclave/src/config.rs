//! Run configuration: strict JSON with unknown fields rejected, validated
//! so every strategy reference resolves before anything runs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use conclave_core::rewards::{AchRewardMode, RewardWeights, Stage};

use crate::agents::AgentSpec;
use crate::orchestrator::{CandidateSelection, Strategy, TemplateSet};

#[derive(Debug, Error)]
#[error("config field {field}: {reason}")]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

impl ConfigError {
    fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self { field: field.into(), reason: reason.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seeds {
    /// Heterogeneous-pool sampling seed.
    #[serde(default)]
    pub pool: u64,
    /// Prompt-variant sampling seed (curriculum draws).
    #[serde(default)]
    pub variant: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "provider", rename_all = "snake_case", deny_unknown_fields)]
pub enum EmbedderConfig {
    /// Built-in deterministic 64-dimension hashing embedder.
    #[default]
    Hash64,
    /// Remote embedding endpoint speaking the standard `{model, input}` /
    /// `data[].embedding` wire format.
    Http {
        endpoint: String,
        model: String,
        auth_env: String,
        #[serde(default = "default_embed_timeout")]
        timeout_secs: u64,
    },
}

fn default_embed_timeout() -> u64 {
    30
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardConfig {
    pub stage: Stage,
    #[serde(default)]
    pub embedder: EmbedderConfig,
    #[serde(default)]
    pub weights: RewardWeights,
    #[serde(default)]
    pub ach_mode: AchRewardMode,
}

/// Prompt template overrides, loaded from plain-text files at startup.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TemplateOverrides {
    pub full_ach: Option<PathBuf>,
    pub simplified_ach: Option<PathBuf>,
    pub unstructured: Option<PathBuf>,
    pub ranking_shots: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: PathBuf,
    pub executors: Vec<AgentSpec>,
    #[serde(default)]
    pub decider: Option<AgentSpec>,
    pub strategies: Vec<Strategy>,
    #[serde(default)]
    pub seeds: Option<Seeds>,
    /// Heterogeneous-pool mode: sample this many executors per item.
    #[serde(default)]
    pub pool_k: Option<usize>,
    #[serde(default)]
    pub candidate_selection: CandidateSelection,
    #[serde(default)]
    pub rewards: Option<RewardConfig>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub templates: TemplateOverrides,
    #[serde(default)]
    pub parallelism: Option<usize>,
}

impl RunConfig {
    pub fn seeds(&self) -> Seeds {
        self.seeds.unwrap_or_default()
    }

    /// All agent ids visible to strategies: executors plus the optional
    /// dedicated decider.
    fn known_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.executors.iter().map(|e| e.id.as_str()).collect();
        if let Some(decider) = &self.decider {
            ids.push(decider.id.as_str());
        }
        ids
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.executors.is_empty() {
            return Err(ConfigError::new("executors", "at least one executor is required"));
        }
        if self.strategies.is_empty() {
            return Err(ConfigError::new("strategies", "at least one strategy is required"));
        }
        for spec in self.executors.iter().chain(self.decider.iter()) {
            if let crate::agents::BackendSpec::Http { timeout_secs: 0, .. } = spec.backend {
                return Err(ConfigError::new(
                    format!("executors[{}].backend.timeout_secs", spec.id),
                    "must be positive",
                ));
            }
        }
        let known = self.known_ids();
        for (i, strategy) in self.strategies.iter().enumerate() {
            let referenced = match strategy {
                Strategy::SingleAgent { agent } => Some(agent),
                Strategy::InformedDictatorial { decider } => Some(decider),
                Strategy::AchDecision { decider, .. } => Some(decider),
                Strategy::Voting { .. } => None,
            };
            if let Some(id) = referenced {
                if !known.contains(&id.as_str()) {
                    return Err(ConfigError::new(
                        format!("strategies[{i}]"),
                        format!("references unknown agent {id:?}"),
                    ));
                }
            }
        }
        if let Some(k) = self.pool_k {
            if k == 0 || k > self.executors.len() {
                return Err(ConfigError::new(
                    "pool_k",
                    format!("must be in 1..={} (pool size)", self.executors.len()),
                ));
            }
            if self.seeds.is_none() {
                return Err(ConfigError::new(
                    "seeds",
                    "required when pool_k randomizes executor selection",
                ));
            }
        }
        Ok(())
    }

    /// Resolve template overrides into the effective template set. Paths
    /// were anchored at load time.
    pub fn load_templates(&self) -> Result<TemplateSet, ConfigError> {
        let mut set = TemplateSet::default();
        let read = |path: &PathBuf, field: &str| -> Result<String, ConfigError> {
            std::fs::read_to_string(path).map_err(|e| {
                ConfigError::new(format!("templates.{field}"), format!("{}: {e}", path.display()))
            })
        };
        if let Some(p) = &self.templates.full_ach {
            set.full_ach = read(p, "full_ach")?;
        }
        if let Some(p) = &self.templates.simplified_ach {
            set.simplified_ach = read(p, "simplified_ach")?;
        }
        if let Some(p) = &self.templates.unstructured {
            set.unstructured = read(p, "unstructured")?;
        }
        if let Some(p) = &self.templates.ranking_shots {
            set.ranking_shots = read(p, "ranking_shots")?;
        }
        Ok(set)
    }
}

/// Load and validate a run config. File paths inside the config are
/// interpreted relative to the config file's directory.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("<file>", format!("{}: {e}", path.display())))?;
    let deserializer = &mut serde_json::Deserializer::from_str(&text);
    let mut config: RunConfig = serde_path_to_error::deserialize(deserializer)
        .map_err(|e| ConfigError::new(e.path().to_string(), e.inner().to_string()))?;
    config.validate()?;

    // Anchor relative paths at the config's directory.
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    config.dataset = anchor(base, &config.dataset);
    for spec in config
        .executors
        .iter_mut()
        .chain(config.decider.iter_mut())
    {
        if let crate::agents::BackendSpec::Scripted { fixture } = &mut spec.backend {
            *fixture = anchor(base, fixture);
        }
    }
    if let Some(dir) = &config.output_dir {
        config.output_dir = Some(anchor(base, dir));
    }
    for slot in [
        &mut config.templates.full_ach,
        &mut config.templates.simplified_ach,
        &mut config.templates.unstructured,
        &mut config.templates.ranking_shots,
    ]
    .into_iter()
    .flatten()
    {
        *slot = anchor(base, slot);
    }
    Ok(config)
}

fn anchor(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}
