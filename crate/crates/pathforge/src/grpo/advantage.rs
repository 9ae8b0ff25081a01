//! Group-relative advantage normalization.

use serde::{Deserialize, Serialize};

use super::GrpoError;

/// Normalized advantages for one rollout group, plus the verdict on whether
/// the group carries any learning signal at all.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupAdvantages {
    pub advantages: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation of the raw rewards.
    pub std: f64,
    /// False iff the reward spread fell below the degeneracy floor, in which
    /// case every advantage is exactly zero.
    pub effective: bool,
}

/// Standardize rewards within a group: `(R_i - mean) / std` with the
/// population standard deviation.
///
/// A group whose rewards (all) tie has nothing to compare against itself, and
/// dividing by a vanishing spread would only amplify float noise into a fake
/// gradient. Below `std_floor` the group is declared ineffective and its
/// advantages are zeroed instead.
pub fn group_advantages(rewards: &[f64], std_floor: f64) -> Result<GroupAdvantages, GrpoError> {
    if rewards.len() < 2 {
        return Err(GrpoError::GroupTooSmall { size: rewards.len() });
    }
    let n = rewards.len() as f64;
    let mean = rewards.iter().sum::<f64>() / n;
    let var = rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();

    if std < std_floor {
        return Ok(GroupAdvantages {
            advantages: vec![0.0; rewards.len()],
            mean,
            std,
            effective: false,
        });
    }
    Ok(GroupAdvantages {
        advantages: rewards.iter().map(|r| (r - mean) / std).collect(),
        mean,
        std,
        effective: true,
    })
}
