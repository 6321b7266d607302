use std::collections::BTreeMap;
use std::path::Path;

use conclave_core::hash::fnv1a64_hex;

use super::AgentError;

/// Deterministic fixture backend for tests and offline runs.
///
/// Fixture files are JSON objects mapping the 16-hex-digit FNV-1a hash of a
/// prompt to the list of response texts for that prompt. When a prompt asks
/// for more samples than the entry holds, the entries cycle. Responses carry
/// zero latency so record streams are byte-reproducible.
pub struct ScriptedBackend {
    entries: BTreeMap<String, Vec<String>>,
}

impl ScriptedBackend {
    pub fn load(path: &Path) -> Result<Self, AgentError> {
        let text = std::fs::read_to_string(path).map_err(|e| AgentError::FixtureInvalid {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        let entries: BTreeMap<String, Vec<String>> =
            serde_json::from_str(&text).map_err(|e| AgentError::FixtureInvalid {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?;
        Ok(Self { entries })
    }

    pub fn complete(&self, prompt: &str, n: u32) -> Result<Vec<(String, u64)>, AgentError> {
        let hash = fnv1a64_hex(prompt);
        let responses = self
            .entries
            .get(&hash)
            .filter(|r| !r.is_empty())
            .ok_or(AgentError::FixtureMiss { hash })?;
        Ok((0..n as usize)
            .map(|i| (responses[i % responses.len()].clone(), 0))
            .collect())
    }
}
