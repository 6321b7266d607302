//! Offline rollout scoring: read a transcript JSONL, attach reward
//! breakdowns, emit trainer-ready records.

use serde::Deserialize;
use thiserror::Error;

use conclave_core::ach::PromptVariant;
use conclave_core::rewards::{
    stage1_score_with, stage2_score_with, EmbedError, Embedder, RolloutRecord, ScoreOptions, Stage,
};

/// One unscored transcript line: a rollout record without its breakdown.
#[derive(Debug, Clone, Deserialize)]
pub struct TranscriptEntry {
    pub item_id: String,
    pub prompt: String,
    pub variant: PromptVariant,
    pub response: String,
    pub gold_label: String,
    #[serde(default)]
    pub step: u64,
}

#[derive(Debug, Error)]
pub enum TranscriptError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Embed(#[from] EmbedError),
}

pub fn parse_transcript(text: &str) -> Result<Vec<TranscriptEntry>, TranscriptError> {
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(idx, line)| {
            serde_json::from_str(line)
                .map_err(|e| TranscriptError::Parse { line: idx + 1, reason: e.to_string() })
        })
        .collect()
}

/// Score every entry under the given stage. Stage 2 needs the embedder and
/// the protocol reference text.
pub fn score_transcript(
    entries: Vec<TranscriptEntry>,
    stage: Stage,
    options: &ScoreOptions,
    protocol_reference: &str,
    embedder: &dyn Embedder,
) -> Result<Vec<RolloutRecord>, TranscriptError> {
    entries
        .into_iter()
        .map(|entry| {
            let breakdown = match stage {
                Stage::Stage1 => stage1_score_with(&entry.response, &entry.gold_label, options),
                Stage::Stage2 => stage2_score_with(
                    &entry.response,
                    &entry.gold_label,
                    protocol_reference,
                    embedder,
                    options,
                )?,
            };
            Ok(RolloutRecord {
                item_id: entry.item_id,
                prompt: entry.prompt,
                variant: entry.variant,
                response: entry.response,
                gold_label: entry.gold_label,
                breakdown,
                step: entry.step,
            })
        })
        .collect()
}

pub fn records_to_jsonl(records: &[RolloutRecord]) -> String {
    records
        .iter()
        .map(|r| serde_json::to_string(r).expect("record serializes") + "\n")
        .collect()
}
