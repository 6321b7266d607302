use alloc::string::String;

use serde::{Deserialize, Serialize};

use super::embed::{cosine_similarity, EmbedError, Embedder};
use crate::ach::{
    has_parseable_grid, heading_line_count, parse_decision_output, PromptVariant, FULL_HEADINGS,
};
use crate::extract::normalize_answer;

/// Which reward stack produced a breakdown: Stage1 uses the hard pattern
/// check in the protocol slot, Stage2 the soft embedding similarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    Stage1,
    Stage2,
}

/// Per-rollout component scores. `total` is always the exact component sum;
/// there is no hidden weighting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub format_score: f64,
    pub answer_score: f64,
    pub ach_score: f64,
    pub stage: Stage,
    pub total: f64,
}

impl RewardBreakdown {
    pub fn new(format_score: f64, answer_score: f64, ach_score: f64, stage: Stage) -> Self {
        Self {
            format_score,
            answer_score,
            ach_score,
            stage,
            total: format_score + answer_score + ach_score,
        }
    }
}

/// One scored rollout, emitted as a JSONL line for trainer consumption.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutRecord {
    pub item_id: String,
    pub prompt: String,
    pub variant: PromptVariant,
    pub response: String,
    pub gold_label: String,
    pub breakdown: RewardBreakdown,
    pub step: u64,
}

/// Component multipliers for ablations. The defaults of 1.0 reproduce the
/// plain sum; the breakdown stores the weighted components, so the total
/// stays the exact sum of what it reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardWeights {
    pub format: f64,
    pub answer: f64,
    pub ach: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        Self { format: 1.0, answer: 1.0, ach: 1.0 }
    }
}

/// Granularity of the stage-1 protocol reward: the graded mode pays out the
/// fraction of checks passed, the binary mode pays 1.0 only for a perfect
/// pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AchRewardMode {
    #[default]
    Graded,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScoreOptions {
    pub weights: RewardWeights,
    pub ach_mode: AchRewardMode,
}

/// 1.0 iff the response carries exactly one think block followed by exactly
/// one answer block.
pub fn format_reward(raw: &str) -> f64 {
    if parse_decision_output(raw).is_ok() {
        1.0
    } else {
        0.0
    }
}

/// 1.0 iff the answer block normalizes to the gold label: trimmed,
/// uppercased, surrounding parentheses/periods ignored, first standalone
/// option letter taken.
pub fn accuracy_reward(answer_block: &str, gold_label: &str) -> f64 {
    match normalize_answer(answer_block) {
        Some(label) if label == gold_label => 1.0,
        _ => 0.0,
    }
}

/// Number of protocol pattern checks: the seven section headings plus a
/// well-formed matrix grid.
pub const ACH_PATTERN_CHECKS: u32 = 8;

/// How many of the eight pattern checks the think text passes.
pub fn ach_pattern_checks(think: &str) -> u32 {
    let headings = FULL_HEADINGS
        .iter()
        .filter(|h| heading_line_count(think, h) > 0)
        .count() as u32;
    headings + u32::from(has_parseable_grid(think))
}

/// Graded protocol adherence: checks passed over checks total.
pub fn ach_pattern_reward(think: &str) -> f64 {
    f64::from(ach_pattern_checks(think)) / f64::from(ACH_PATTERN_CHECKS)
}

/// Soft protocol adherence: cosine similarity between the think text's and
/// the reference text's embeddings, clamped to [0, 1].
pub fn soft_ach_reward(
    think: &str,
    protocol_reference: &str,
    embedder: &dyn Embedder,
) -> Result<f64, EmbedError> {
    let a = embedder.embed(think)?;
    let b = embedder.embed(protocol_reference)?;
    Ok(cosine_similarity(&a, &b).clamp(0.0, 1.0))
}

/// Stage-1 composite: format + accuracy + hard protocol pattern. A response
/// that fails the tag format scores zero on every component.
pub fn stage1_score(raw: &str, gold_label: &str) -> RewardBreakdown {
    stage1_score_with(raw, gold_label, &ScoreOptions::default())
}

pub fn stage1_score_with(raw: &str, gold_label: &str, options: &ScoreOptions) -> RewardBreakdown {
    let Ok(output) = parse_decision_output(raw) else {
        return RewardBreakdown::new(0.0, 0.0, 0.0, Stage::Stage1);
    };
    let ach = match options.ach_mode {
        AchRewardMode::Graded => ach_pattern_reward(&output.think),
        AchRewardMode::Binary => {
            if ach_pattern_checks(&output.think) == ACH_PATTERN_CHECKS {
                1.0
            } else {
                0.0
            }
        }
    };
    RewardBreakdown::new(
        options.weights.format,
        options.weights.answer * accuracy_reward(&output.answer, gold_label),
        options.weights.ach * ach,
        Stage::Stage1,
    )
}

/// Stage-2 composite: format + accuracy + soft protocol similarity. The
/// embedder is only consulted for format-valid responses.
pub fn stage2_score(
    raw: &str,
    gold_label: &str,
    protocol_reference: &str,
    embedder: &dyn Embedder,
) -> Result<RewardBreakdown, EmbedError> {
    stage2_score_with(raw, gold_label, protocol_reference, embedder, &ScoreOptions::default())
}

pub fn stage2_score_with(
    raw: &str,
    gold_label: &str,
    protocol_reference: &str,
    embedder: &dyn Embedder,
    options: &ScoreOptions,
) -> Result<RewardBreakdown, EmbedError> {
    let Ok(output) = parse_decision_output(raw) else {
        return Ok(RewardBreakdown::new(0.0, 0.0, 0.0, Stage::Stage2));
    };
    let soft = soft_ach_reward(&output.think, protocol_reference, embedder)?;
    Ok(RewardBreakdown::new(
        options.weights.format,
        options.weights.answer * accuracy_reward(&output.answer, gold_label),
        options.weights.ach * soft,
        Stage::Stage2,
    ))
}
