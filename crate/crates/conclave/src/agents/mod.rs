//! Agent backends: live HTTP chat-completion endpoints and deterministic
//! scripted fixtures, plus pool sampling for heterogeneous runs.
//!
//! Choice and ranking extraction live in `conclave_core::extract` so that
//! ballot construction and accuracy scoring share one normalization; they
//! are re-exported here.

mod http;
mod scripted;

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use conclave_core::extract::{extract_choice, extract_ranking};
use conclave_core::rng::SplitMix64;

pub use http::HttpBackend;
pub use scripted::ScriptedBackend;

/// Generation parameters sent with every request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingParams {
    pub temperature: f64,
    pub top_p: f64,
    pub n: u32,
}

impl Default for SamplingParams {
    fn default() -> Self {
        Self { temperature: 0.6, top_p: 0.95, n: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentRole {
    Executor,
    Decider,
}

/// Backend wiring for one agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BackendSpec {
    Http {
        endpoint: String,
        model: String,
        /// Name of the environment variable holding the bearer token.
        auth_env: String,
        #[serde(default = "default_timeout")]
        timeout_secs: u64,
        #[serde(default = "default_retries")]
        max_retries: u32,
    },
    Scripted { fixture: PathBuf },
}

fn default_timeout() -> u64 {
    60
}

fn default_retries() -> u32 {
    3
}

/// Declarative description of one agent, as written in run configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub id: String,
    pub role: AgentRole,
    pub backend: BackendSpec,
    #[serde(default)]
    pub sampling: SamplingParams,
}

/// One sampled completion from an agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentResponse {
    pub agent_id: String,
    pub sample_index: u32,
    pub text: String,
    pub extracted_label: Option<String>,
    pub latency_ms: u64,
}

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("backend timed out after {attempts} attempts: {reason}")]
    BackendTimeout { attempts: u32, reason: String },
    #[error("backend rejected the request with status {status}")]
    BackendRejected { status: u16 },
    #[error("no fixture entry for prompt hash {hash}")]
    FixtureMiss { hash: String },
    #[error("fixture {path}: {reason}")]
    FixtureInvalid { path: String, reason: String },
    #[error("auth env var {var} is not set")]
    MissingAuth { var: String },
    #[error("backend returned {got} choices, expected {want}")]
    ShortResponse { got: usize, want: u32 },
    #[error("backend response is not the expected chat-completions shape: {0}")]
    BadResponseShape(String),
    #[error("sample size {k} exceeds pool size {pool}")]
    KTooLarge { k: usize, pool: usize },
    #[error("duplicate agent id {0:?} in pool")]
    DuplicateAgentId(String),
    #[error("unknown agent id {0:?}")]
    UnknownAgent(String),
}

enum Backend {
    Http(HttpBackend),
    Scripted(ScriptedBackend),
}

/// A ready-to-call agent: its spec plus the loaded backend.
pub struct Agent {
    spec: AgentSpec,
    backend: Backend,
}

impl Agent {
    /// Build the runtime agent: loads scripted fixtures from disk, prepares
    /// the HTTP client otherwise.
    pub fn from_spec(spec: AgentSpec) -> Result<Self, AgentError> {
        let backend = match &spec.backend {
            BackendSpec::Http { endpoint, model, auth_env, timeout_secs, max_retries } => {
                Backend::Http(HttpBackend::new(
                    endpoint.clone(),
                    model.clone(),
                    auth_env.clone(),
                    *timeout_secs,
                    *max_retries,
                ))
            }
            BackendSpec::Scripted { fixture } => {
                Backend::Scripted(ScriptedBackend::load(fixture)?)
            }
        };
        Ok(Self { spec, backend })
    }

    pub fn id(&self) -> &str {
        &self.spec.id
    }

    pub fn spec(&self) -> &AgentSpec {
        &self.spec
    }

    pub fn sampling(&self) -> &SamplingParams {
        &self.spec.sampling
    }

    /// True when calling this agent performs network IO.
    pub fn is_live(&self) -> bool {
        matches!(self.backend, Backend::Http(_))
    }

    /// Sample `params.n` completions for the prompt. Returns exactly `n`
    /// responses ordered by sample index, or an error; never a silent
    /// partial result.
    pub fn generate(
        &self,
        prompt: &str,
        params: &SamplingParams,
    ) -> Result<Vec<AgentResponse>, AgentError> {
        let texts = match &self.backend {
            Backend::Http(http) => http.complete(prompt, params)?,
            Backend::Scripted(scripted) => scripted.complete(prompt, params.n)?,
        };
        if texts.len() != params.n as usize {
            return Err(AgentError::ShortResponse { got: texts.len(), want: params.n });
        }
        Ok(texts
            .into_iter()
            .enumerate()
            .map(|(i, (text, latency_ms))| AgentResponse {
                agent_id: self.spec.id.clone(),
                sample_index: i as u32,
                text,
                extracted_label: None,
                latency_ms,
            })
            .collect())
    }
}

/// Registry of loaded agents, looked up by id.
pub struct AgentPool {
    agents: Vec<Agent>,
    index: BTreeMap<String, usize>,
}

impl AgentPool {
    pub fn load(specs: Vec<AgentSpec>) -> Result<Self, AgentError> {
        let mut agents = Vec::with_capacity(specs.len());
        let mut index = BTreeMap::new();
        for spec in specs {
            if index.contains_key(&spec.id) {
                return Err(AgentError::DuplicateAgentId(spec.id));
            }
            index.insert(spec.id.clone(), agents.len());
            agents.push(Agent::from_spec(spec)?);
        }
        Ok(Self { agents, index })
    }

    pub fn get(&self, id: &str) -> Result<&Agent, AgentError> {
        self.index
            .get(id)
            .map(|&i| &self.agents[i])
            .ok_or_else(|| AgentError::UnknownAgent(id.to_string()))
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }
}

/// Uniform sample of `k` distinct entries, returned in original pool order.
/// Deterministic for a given rng state.
pub fn sample_pool<T: Copy>(
    pool: &[T],
    k: usize,
    rng: &mut SplitMix64,
) -> Result<Vec<T>, AgentError> {
    if k > pool.len() {
        return Err(AgentError::KTooLarge { k, pool: pool.len() });
    }
    // Partial Fisher-Yates over the index vector, then restore pool order.
    let mut indices: Vec<usize> = (0..pool.len()).collect();
    for i in 0..k {
        let j = i + rng.below((indices.len() - i) as u64) as usize;
        indices.swap(i, j);
    }
    let mut chosen: Vec<usize> = indices[..k].to_vec();
    chosen.sort_unstable();
    Ok(chosen.into_iter().map(|i| pool[i]).collect())
}
