//! Embedding providers for stage-2 scoring: the built-in hash embedder or a
//! remote HTTP endpoint.

use std::time::Duration;

use serde_json::{json, Value};

use conclave_core::rewards::{EmbedError, Embedder, HashEmbedder};

use crate::config::EmbedderConfig;

/// Remote embedding endpoint speaking `{model, input: [text]}` requests and
/// `data[0].embedding` responses. Vectors are re-normalized to unit length
/// on receipt so the embedder contract holds regardless of the provider.
pub struct HttpEmbedder {
    endpoint: String,
    model: String,
    auth_env: String,
    agent: ureq::Agent,
}

impl HttpEmbedder {
    pub fn new(endpoint: String, model: String, auth_env: String, timeout_secs: u64) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(timeout_secs)))
            .build();
        Self { endpoint, model, auth_env, agent: config.into() }
    }
}

impl Embedder for HttpEmbedder {
    fn embed(&self, text: &str) -> Result<Vec<f64>, EmbedError> {
        let token = std::env::var(&self.auth_env)
            .map_err(|_| EmbedError::Unavailable(format!("auth env var {} unset", self.auth_env)))?;
        let mut response = self
            .agent
            .post(&self.endpoint)
            .header("Authorization", &format!("Bearer {token}"))
            .send_json(json!({"model": self.model, "input": [text]}))
            .map_err(|e| EmbedError::Unavailable(e.to_string()))?;
        let value: Value = response
            .body_mut()
            .read_json()
            .map_err(|e| EmbedError::Unavailable(e.to_string()))?;
        let raw = value
            .pointer("/data/0/embedding")
            .and_then(Value::as_array)
            .ok_or_else(|| EmbedError::Unavailable("missing data[0].embedding".into()))?;
        let mut vector: Vec<f64> = raw.iter().filter_map(Value::as_f64).collect();
        if vector.len() != raw.len() || vector.is_empty() {
            return Err(EmbedError::Unavailable("non-numeric embedding".into()));
        }
        let norm = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(EmbedError::Unavailable("zero-norm embedding".into()));
        }
        for x in &mut vector {
            *x /= norm;
        }
        Ok(vector)
    }
}

/// Build the configured provider.
pub fn build_embedder(config: &EmbedderConfig) -> Box<dyn Embedder + Send + Sync> {
    match config {
        EmbedderConfig::Hash64 => Box::new(HashEmbedder),
        EmbedderConfig::Http { endpoint, model, auth_env, timeout_secs } => Box::new(
            HttpEmbedder::new(endpoint.clone(), model.clone(), auth_env.clone(), *timeout_secs),
        ),
    }
}
