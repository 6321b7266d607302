//! Rule-based reward stack for decider training data.
//!
//! Stage 1 scores a rollout on three components: tag format, answer
//! accuracy, and adherence to the structured protocol (pattern-matched
//! against the seven section headings plus a well-formed grid). Stage 2
//! swaps the pattern check for a soft score, the cosine similarity between
//! the think block's embedding and the canonical protocol reference. The
//! composite is always the plain component sum. A cosine annealing schedule
//! drives the curriculum that shifts prompt sampling from the full to the
//! simplified scaffold over training.

mod anneal;
mod embed;
mod score;

pub use anneal::{anneal_probability, sample_variant, AnnealError, AnnealState};
pub use embed::{cosine_similarity, EmbedError, Embedder, HashEmbedder};
pub use score::{
    accuracy_reward, ach_pattern_checks, ach_pattern_reward, format_reward, soft_ach_reward,
    stage1_score, stage1_score_with, stage2_score, stage2_score_with, AchRewardMode,
    RewardBreakdown, RewardWeights, RolloutRecord, ScoreOptions, Stage, ACH_PATTERN_CHECKS,
};
