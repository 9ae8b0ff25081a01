//! The outer training loop: sample groups, normalize rewards, ascend.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{
    group_advantages, grpo_objective, total_reward, GrpoError, Policy, RewardWeights,
    RolloutGroup,
};
use crate::seeding::{derive_seed, rng_for};

/// Hyperparameters for reinforcement fine-tuning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrpoConfig {
    /// Responses sampled per prompt per step.
    pub group_size: usize,
    /// Half-width of the ratio clip interval.
    pub eps_clip: f64,
    pub learning_rate: f64,
    /// Number of outer steps (one parameter update each).
    pub steps: usize,
    /// Reward-spread floor below which a group is declared ineffective.
    pub degenerate_std_floor: f64,
    pub reward_weights: RewardWeights,
    /// Hard cap on generated response length, in tokens.
    pub max_response_tokens: usize,
}

impl Default for GrpoConfig {
    fn default() -> Self {
        Self {
            group_size: 8,
            eps_clip: 0.2,
            learning_rate: 1e-6,
            steps: 500,
            degenerate_std_floor: 1e-6,
            reward_weights: RewardWeights::default(),
            max_response_tokens: 64,
        }
    }
}

impl GrpoConfig {
    pub fn validate(&self) -> Result<(), GrpoError> {
        if self.group_size < 2 {
            return Err(GrpoError::BadConfig(format!(
                "group_size must be at least 2, got {}",
                self.group_size
            )));
        }
        if !(self.eps_clip > 0.0 && self.eps_clip < 1.0) {
            return Err(GrpoError::BadConfig(format!(
                "eps_clip must lie in (0, 1), got {}",
                self.eps_clip
            )));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(GrpoError::BadConfig(format!(
                "learning_rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        if !(self.degenerate_std_floor > 0.0) {
            return Err(GrpoError::BadConfig(format!(
                "degenerate_std_floor must be positive, got {}",
                self.degenerate_std_floor
            )));
        }
        if self.max_response_tokens == 0 {
            return Err(GrpoError::BadConfig(
                "max_response_tokens must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A prompt the trainer rolls out against, with its ground-truth answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutPrompt<Pr> {
    /// Stable identifier mixed into the per-prompt sampling seed.
    pub id: String,
    pub prompt: Pr,
    pub truth: String,
}

/// Per-group telemetry from one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub group_id: String,
    pub reward_mean: f64,
    pub reward_std: f64,
    /// Whether the group's reward spread cleared the degeneracy floor and
    /// therefore contributed a learning signal.
    pub effective: bool,
}

/// Telemetry from one optimization step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub step: usize,
    /// Surrogate objective evaluated after the parameter update, against the
    /// pre-update snapshot.
    pub objective: f64,
    pub groups: Vec<GroupReport>,
}

impl StepReport {
    /// Number of groups whose rewards spread enough to matter this step.
    pub fn effective_groups(&self) -> usize {
        self.groups.iter().filter(|g| g.effective).count()
    }

    pub fn ineffective_groups(&self) -> usize {
        self.groups.len() - self.effective_groups()
    }

    pub fn mean_reward(&self) -> f64 {
        if self.groups.is_empty() {
            return 0.0;
        }
        self.groups.iter().map(|g| g.reward_mean).sum::<f64>() / self.groups.len() as f64
    }
}

/// Run one full GRPO step: snapshot parameters, sample a group per prompt,
/// score and normalize rewards, take one ascent step on the clipped
/// surrogate, and report what happened.
///
/// Sampling is deterministic in `(base_seed, step_index, prompt.id)`: each
/// prompt gets its own stream so prompt order and count never perturb each
/// other's rollouts. `render` turns a token sequence into the text the
/// reward model grades.
pub fn rl_step<P: Policy>(
    policy: &mut P,
    prompts: &[RolloutPrompt<P::Prompt>],
    config: &GrpoConfig,
    base_seed: u64,
    step_index: usize,
    render: impl Fn(&[usize]) -> String,
) -> Result<StepReport, GrpoError> {
    config.validate()?;
    if prompts.is_empty() {
        return Err(GrpoError::NoGroups);
    }

    let params_old = policy.params().to_vec();
    let step_seed = derive_seed(base_seed, &format!("rl-step:{step_index}"));

    let mut groups: Vec<RolloutGroup<P::Prompt>> = Vec::with_capacity(prompts.len());
    let mut reports: Vec<GroupReport> = Vec::with_capacity(prompts.len());
    for prompt in prompts {
        let mut rng = rng_for(step_seed, &prompt.id);
        let mut responses = Vec::with_capacity(config.group_size);
        let mut rewards = Vec::with_capacity(config.group_size);
        for _ in 0..config.group_size {
            let tokens = policy.generate(&prompt.prompt, &mut rng, config.max_response_tokens);
            let text = render(&tokens);
            rewards.push(total_reward(&text, &prompt.truth, &config.reward_weights));
            responses.push(tokens);
        }
        let advantages = group_advantages(&rewards, config.degenerate_std_floor)?;
        reports.push(GroupReport {
            group_id: prompt.id.clone(),
            reward_mean: advantages.mean,
            reward_std: advantages.std,
            effective: advantages.effective,
        });
        groups.push(RolloutGroup {
            id: prompt.id.clone(),
            prompt: prompt.prompt.clone(),
            truth: prompt.truth.clone(),
            responses,
            rewards,
            advantages,
        });
    }

    // One ascent step. At evaluation time the live parameters still equal the
    // snapshot, so every ratio is 1 and the gradient is the plain grouped
    // policy gradient.
    let (_, grad) =
        grpo_objective(policy, &params_old, &params_old, &groups, config.eps_clip)?;
    let updated: Vec<f64> = params_old
        .iter()
        .zip(&grad)
        .map(|(p, g)| p + config.learning_rate * g)
        .collect();
    policy.set_params(&updated);

    let (objective, _) =
        grpo_objective(policy, &updated, &params_old, &groups, config.eps_clip)?;
    Ok(StepReport {
        step: step_index,
        objective,
        groups: reports,
    })
}

/// Cumulative counts of effective and ineffective groups after each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerPoint {
    pub step: usize,
    pub cumulative_effective: usize,
    pub cumulative_ineffective: usize,
}

/// Fold per-step reports into running effectiveness totals.
pub fn effectiveness_ledger(reports: &[StepReport]) -> Vec<LedgerPoint> {
    let mut effective = 0;
    let mut ineffective = 0;
    reports
        .iter()
        .map(|r| {
            effective += r.effective_groups();
            ineffective += r.ineffective_groups();
            LedgerPoint {
                step: r.step,
                cumulative_effective: effective,
                cumulative_ineffective: ineffective,
            }
        })
        .collect()
}

/// Write per-group step telemetry as CSV.
pub fn write_step_reports_csv(
    out: &mut dyn Write,
    reports: &[StepReport],
) -> std::io::Result<()> {
    writeln!(out, "step,group_id,reward_mean,reward_std,effective,objective")?;
    for report in reports {
        for group in &report.groups {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                report.step,
                group.group_id,
                group.reward_mean,
                group.reward_std,
                group.effective,
                report.objective
            )?;
        }
    }
    Ok(())
}

/// Write the cumulative effectiveness ledger as CSV.
pub fn write_ledger_csv(out: &mut dyn Write, ledger: &[LedgerPoint]) -> std::io::Result<()> {
    writeln!(out, "step,cumulative_effective,cumulative_ineffective")?;
    for point in ledger {
        writeln!(
            out,
            "{},{},{}",
            point.step, point.cumulative_effective, point.cumulative_ineffective
        )?;
    }
    Ok(())
}
