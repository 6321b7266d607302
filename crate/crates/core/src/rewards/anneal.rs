use core::fmt;

use serde::{Deserialize, Serialize};

use crate::ach::PromptVariant;
use crate::rng::SplitMix64;

/// Curriculum schedule point: the probability of sampling the full scaffold
/// at a training step.
///
/// `p_full = (1 + cos(pi * step / total_steps)) / 2`, so the curriculum
/// starts fully scaffolded, crosses 0.5 halfway, and ends fully simplified.
/// `p_simple` is the exact complement; `p_full + p_simple == 1.0` holds
/// bitwise at every step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealState {
    pub step: u64,
    pub total_steps: u64,
    pub p_full: f64,
    pub p_simple: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnnealError {
    StepOutOfRange { step: u64, total_steps: u64 },
    ZeroTotalSteps,
}

impl fmt::Display for AnnealError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnnealError::StepOutOfRange { step, total_steps } => {
                write!(f, "step {step} outside schedule of {total_steps} steps")
            }
            AnnealError::ZeroTotalSteps => write!(f, "schedule needs at least one step"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for AnnealError {}

/// Evaluate the schedule at `step` of `total_steps`.
pub fn anneal_probability(step: u64, total_steps: u64) -> Result<AnnealState, AnnealError> {
    if total_steps == 0 {
        return Err(AnnealError::ZeroTotalSteps);
    }
    if step > total_steps {
        return Err(AnnealError::StepOutOfRange { step, total_steps });
    }
    let t = step as f64 / total_steps as f64;
    let raw = 0.5 * (1.0 + libm::cos(core::f64::consts::PI * t));
    // Round-trip through the complement so p_full + p_simple == 1.0 exactly.
    let p_simple = 1.0 - raw;
    let p_full = 1.0 - p_simple;
    Ok(AnnealState { step, total_steps, p_full, p_simple })
}

/// Draw the prompt variant for one rollout: full scaffold with probability
/// `p_full`, simplified otherwise. Consumes exactly one uniform draw.
pub fn sample_variant(state: &AnnealState, rng: &mut SplitMix64) -> PromptVariant {
    if rng.next_f64() < state.p_full {
        PromptVariant::FullAch
    } else {
        PromptVariant::SimplifiedAch
    }
}
