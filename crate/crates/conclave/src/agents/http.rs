use std::time::{Duration, Instant};

use serde_json::{json, Value};

use super::{AgentError, SamplingParams};

/// Chat-completions client with retry. Sends the standard wire format
/// `{model, messages: [{role, content}], temperature, top_p, n}` and reads
/// `choices[].message.content`; auth is a bearer token taken from the
/// configured environment variable at call time.
///
/// Transient failures (timeouts, transport errors, 429 and 5xx statuses) are
/// retried up to `max_retries` times with exponential backoff starting at
/// 500 ms. Any other non-success status fails immediately.
pub struct HttpBackend {
    endpoint: String,
    model: String,
    auth_env: String,
    max_retries: u32,
    agent: ureq::Agent,
}

const BACKOFF_BASE: Duration = Duration::from_millis(500);

impl HttpBackend {
    pub fn new(
        endpoint: String,
        model: String,
        auth_env: String,
        timeout_secs: u64,
        max_retries: u32,
    ) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(timeout_secs)))
            .build();
        Self { endpoint, model, auth_env, max_retries, agent: config.into() }
    }

    pub fn complete(
        &self,
        prompt: &str,
        params: &SamplingParams,
    ) -> Result<Vec<(String, u64)>, AgentError> {
        let token = std::env::var(&self.auth_env)
            .map_err(|_| AgentError::MissingAuth { var: self.auth_env.clone() })?;
        let body = json!({
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": params.temperature,
            "top_p": params.top_p,
            "n": params.n,
        });

        let mut attempt = 0u32;
        loop {
            attempt += 1;
            let started = Instant::now();
            let result = self
                .agent
                .post(&self.endpoint)
                .header("Authorization", &format!("Bearer {token}"))
                .send_json(&body);
            match result {
                Ok(mut response) => {
                    let latency = started.elapsed().as_millis() as u64;
                    let value: Value = response
                        .body_mut()
                        .read_json()
                        .map_err(|e| AgentError::BadResponseShape(e.to_string()))?;
                    return parse_choices(&value, latency);
                }
                Err(err) => {
                    let retryable = match &err {
                        ureq::Error::StatusCode(status) => {
                            if *status == 429 || *status >= 500 {
                                true
                            } else {
                                return Err(AgentError::BackendRejected { status: *status });
                            }
                        }
                        ureq::Error::Timeout(_)
                        | ureq::Error::Io(_)
                        | ureq::Error::ConnectionFailed
                        | ureq::Error::HostNotFound => true,
                        _ => false,
                    };
                    if !retryable {
                        return Err(AgentError::BackendTimeout {
                            attempts: attempt,
                            reason: err.to_string(),
                        });
                    }
                    if attempt > self.max_retries {
                        return Err(AgentError::BackendTimeout {
                            attempts: attempt,
                            reason: err.to_string(),
                        });
                    }
                    std::thread::sleep(BACKOFF_BASE * 2u32.pow(attempt - 1));
                }
            }
        }
    }
}

fn parse_choices(value: &Value, latency_ms: u64) -> Result<Vec<(String, u64)>, AgentError> {
    let choices = value
        .get("choices")
        .and_then(Value::as_array)
        .ok_or_else(|| AgentError::BadResponseShape("missing choices array".into()))?;
    choices
        .iter()
        .map(|choice| {
            choice
                .pointer("/message/content")
                .and_then(Value::as_str)
                .map(|text| (text.to_string(), latency_ms))
                .ok_or_else(|| AgentError::BadResponseShape("missing message.content".into()))
        })
        .collect()
}
