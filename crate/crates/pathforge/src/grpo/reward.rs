//! Verifiable rewards: grammar and answer, each 0 or 1.

use serde::{Deserialize, Serialize};

use crate::cot::parse;

/// Relative weights of the two reward components. Both default to 1 so the
/// total reward is simply their sum unless deliberately rebalanced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardWeights {
    pub format: f64,
    pub classification: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        RewardWeights {
            format: 1.0,
            classification: 1.0,
        }
    }
}

/// 1 if `text` is exactly `<think>…</think><answer>…</answer>` with
/// non-empty bodies, no stray text, and no repeated or nested tags; else 0.
pub fn format_reward(text: &str) -> f64 {
    if parse(text).is_ok() {
        1.0
    } else {
        0.0
    }
}

/// 1 if `text` is well-formed *and* its answer equals `truth` exactly
/// (case- and whitespace-sensitive); else 0. A malformed response cannot
/// earn the classification point no matter what it contains.
pub fn classification_reward(text: &str, truth: &str) -> f64 {
    match parse(text) {
        Ok((_, answer)) if answer == truth => 1.0,
        _ => 0.0,
    }
}

/// Weighted total reward for one rendered response.
pub fn total_reward(text: &str, truth: &str, weights: &RewardWeights) -> f64 {
    weights.format * format_reward(text) + weights.classification * classification_reward(text, truth)
}
