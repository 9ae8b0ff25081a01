//! The clipped surrogate objective and its exact gradient.

use serde::{Deserialize, Serialize};

use super::{GroupAdvantages, GrpoError, Policy};

/// One prompt's worth of rollouts with rewards already normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutGroup<Pr> {
    /// Stable identifier (the prompt's sample id) used in reports.
    pub id: String,
    pub prompt: Pr,
    /// Ground-truth answer the classification reward compared against.
    pub truth: String,
    /// Token sequences sampled under the pre-step parameters.
    pub responses: Vec<Vec<usize>>,
    pub rewards: Vec<f64>,
    pub advantages: GroupAdvantages,
}

/// Evaluate the group-relative clipped objective and its gradient in
/// `params`, with `params_old` frozen.
///
/// Per token the surrogate is `min(r Â, clip(r, 1-ε, 1+ε) Â)` with
/// `r = exp(lp_new - lp_old)`. The derivative follows the selected arm: when
/// the unclipped arm is active (including ties, which is the left-branch
/// convention — ties happen whenever `r` sits inside the clip interval), the
/// token contributes `Â · r · ∇lp`; when the clipped arm is strictly smaller,
/// `r` is outside the interval, the clamp is flat, and the contribution is
/// zero. Token terms are averaged per response, responses per group, groups
/// per batch, matching the objective's own nesting.
pub fn grpo_objective<P: Policy>(
    policy: &P,
    params: &[f64],
    params_old: &[f64],
    groups: &[RolloutGroup<P::Prompt>],
    eps_clip: f64,
) -> Result<(f64, Vec<f64>), GrpoError> {
    if groups.is_empty() {
        return Err(GrpoError::NoGroups);
    }
    if !(eps_clip > 0.0 && eps_clip < 1.0) {
        return Err(GrpoError::BadConfig(format!(
            "eps_clip must lie in (0, 1), got {eps_clip}"
        )));
    }
    let lo = 1.0 - eps_clip;
    let hi = 1.0 + eps_clip;

    let mut value = 0.0;
    let mut grad = vec![0.0; policy.param_len()];
    let group_weight = 1.0 / groups.len() as f64;

    for (gi, group) in groups.iter().enumerate() {
        if group.responses.len() < 2 {
            return Err(GrpoError::GroupTooSmall {
                size: group.responses.len(),
            });
        }
        if group.advantages.advantages.len() != group.responses.len() {
            return Err(GrpoError::MismatchedGroup {
                advantages: group.advantages.advantages.len(),
                responses: group.responses.len(),
            });
        }
        let response_weight = group_weight / group.responses.len() as f64;

        for (ri, tokens) in group.responses.iter().enumerate() {
            if tokens.is_empty() {
                return Err(GrpoError::EmptyResponse { group: gi, response: ri });
            }
            let adv = group.advantages.advantages[ri];
            let lp_new = policy.logprobs_at(params, &group.prompt, tokens);
            let lp_old = policy.logprobs_at(params_old, &group.prompt, tokens);
            let token_weight = response_weight / tokens.len() as f64;

            let mut coeffs = vec![0.0; tokens.len()];
            for t in 0..tokens.len() {
                if !lp_new[t].is_finite() || !lp_old[t].is_finite() {
                    return Err(GrpoError::DegenerateRatio {
                        group: gi,
                        response: ri,
                        token: t,
                    });
                }
                let ratio = (lp_new[t] - lp_old[t]).exp();
                let unclipped = ratio * adv;
                let clipped = ratio.clamp(lo, hi) * adv;
                if unclipped <= clipped {
                    value += token_weight * unclipped;
                    coeffs[t] = token_weight * adv * ratio;
                } else {
                    value += token_weight * clipped;
                    // The clipped arm only wins strictly when the clamp is
                    // saturated, where its derivative vanishes.
                }
            }
            policy.accumulate_logprob_grads(params, &group.prompt, tokens, &coeffs, &mut grad);
        }
    }
    Ok((value, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grpo::group_advantages;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    /// Minimal analytic policy for objective tests: each token's logprob is
    /// the parameter it indexes, so ratios are exp(θ[t] - θ_old[t]) and
    /// ∇ logprob(t) is the unit vector e_t. (Not a normalized distribution;
    /// the objective only consumes logprob values and gradients.)
    struct TablePolicy {
        params: Vec<f64>,
    }

    impl Policy for TablePolicy {
        type Prompt = ();

        fn param_len(&self) -> usize {
            self.params.len()
        }
        fn params(&self) -> &[f64] {
            &self.params
        }
        fn set_params(&mut self, params: &[f64]) {
            assert_eq!(params.len(), self.params.len());
            self.params.copy_from_slice(params);
        }
        fn generate(&self, _: &(), _: &mut ChaCha8Rng, _: usize) -> Vec<usize> {
            unimplemented!("objective tests never sample")
        }
        fn logprobs_at(&self, params: &[f64], _: &(), tokens: &[usize]) -> Vec<f64> {
            tokens.iter().map(|&t| params[t]).collect()
        }
        fn accumulate_logprob_grads(
            &self,
            _params: &[f64],
            _: &(),
            tokens: &[usize],
            coeffs: &[f64],
            out: &mut [f64],
        ) {
            for (&t, &c) in tokens.iter().zip(coeffs) {
                out[t] += c;
            }
        }
    }

    const FLOOR: f64 = 1e-6;

    fn group_from_rewards(
        responses: Vec<Vec<usize>>,
        rewards: Vec<f64>,
    ) -> RolloutGroup<()> {
        let advantages = group_advantages(&rewards, FLOOR).unwrap();
        RolloutGroup {
            id: "g".into(),
            prompt: (),
            truth: "x".into(),
            responses,
            rewards,
            advantages,
        }
    }

    #[test]
    fn hand_example_value() {
        // Single group, two single-token responses. Rewards (2, 0) give
        // advantages (+1, -1). Parameters chosen so the ratios are
        // (1.5, 0.5); with ε = 0.2 the clipped surrogate evaluates to
        // (min(1.5, 1.2) + min(-0.5, -0.8)) / 2 = (1.2 - 0.8) / 2 = 0.2.
        let policy = TablePolicy { params: vec![0.0, 0.0] };
        let params_old = [0.0, 0.0];
        let params = [1.5f64.ln(), 0.5f64.ln()];
        let group = group_from_rewards(vec![vec![0], vec![1]], vec![2.0, 0.0]);
        let (value, _) =
            grpo_objective(&policy, &params, &params_old, &[group], 0.2).unwrap();
        assert!((value - 0.2).abs() < 1e-12, "value {value}");
    }

    #[test]
    fn identity_parameters_give_zero_objective() {
        let mut rng = crate::seeding::rng_for(23, "objective-identity");
        for _ in 0..100 {
            let dim = rng.gen_range(2..10);
            let policy = TablePolicy { params: vec![0.0; dim] };
            let params: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let n_groups = rng.gen_range(1..4);
            let groups: Vec<RolloutGroup<()>> = (0..n_groups)
                .map(|_| {
                    let g = rng.gen_range(2..6);
                    let responses: Vec<Vec<usize>> = (0..g)
                        .map(|_| {
                            (0..rng.gen_range(1..5))
                                .map(|_| rng.gen_range(0..dim))
                                .collect()
                        })
                        .collect();
                    let rewards: Vec<f64> =
                        (0..g).map(|_| rng.gen_range(0..3) as f64).collect();
                    group_from_rewards(responses, rewards)
                })
                .collect();
            let (value, grad) =
                grpo_objective(&policy, &params, &params, &groups, 0.2).unwrap();
            assert!(value.abs() < 1e-12, "objective at identity: {value}");
            // At identity every ratio is exactly 1, so the gradient reduces
            // to the vanilla policy-gradient form; it need not vanish.
            assert_eq!(grad.len(), dim);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = crate::seeding::rng_for(29, "objective-fd");
        let h = 1e-5;
        for _ in 0..20 {
            let dim = rng.gen_range(3..8);
            let policy = TablePolicy { params: vec![0.0; dim] };
            let params_old: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
            // Keep ratios near 1 and away from the clip breakpoints so the
            // finite-difference probe never straddles a kink.
            let params: Vec<f64> =
                params_old.iter().map(|p| p + rng.gen_range(-0.05..0.05)).collect();
            let groups: Vec<RolloutGroup<()>> = (0..2)
                .map(|_| {
                    let responses: Vec<Vec<usize>> = (0..3)
                        .map(|_| {
                            (0..rng.gen_range(1..4))
                                .map(|_| rng.gen_range(0..dim))
                                .collect()
                        })
                        .collect();
                    let rewards = vec![2.0, 1.0, 0.0];
                    group_from_rewards(responses, rewards)
                })
                .collect();

            let (_, grad) =
                grpo_objective(&policy, &params, &params_old, &groups, 0.2).unwrap();
            for k in 0..dim {
                let mut plus = params.clone();
                plus[k] += h;
                let mut minus = params.clone();
                minus[k] -= h;
                let (vp, _) =
                    grpo_objective(&policy, &plus, &params_old, &groups, 0.2).unwrap();
                let (vm, _) =
                    grpo_objective(&policy, &minus, &params_old, &groups, 0.2).unwrap();
                let fd = (vp - vm) / (2.0 * h);
                let rel = (grad[k] - fd).abs() / grad[k].abs().max(fd.abs()).max(1e-6);
                assert!(rel < 1e-4, "param {k}: analytic {} vs fd {fd}", grad[k]);
            }
        }
    }

    #[test]
    fn clip_saturation_zeroes_gradient_contribution() {
        // One response with a huge positive ratio and positive advantage:
        // the clipped arm wins, so the parameter moving that token gets no
        // gradient. The other response keeps its gradient.
        let policy = TablePolicy { params: vec![0.0, 0.0] };
        let params_old = [0.0, 0.0];
        let params = [2.0, 0.0]; // ratio e^2 ≈ 7.4 on token 0
        let group = group_from_rewards(vec![vec![0], vec![1]], vec![2.0, 0.0]);
        let (value, grad) =
            grpo_objective(&policy, &params, &params_old, &[group], 0.2).unwrap();
        // Token 0: min(7.39·1, 1.2·1) = 1.2; token 1: min(1·-1, clip=1·-1) = -1.
        assert!((value - (1.2 - 1.0) / 2.0).abs() < 1e-12);
        assert_eq!(grad[0], 0.0);
        assert!(grad[1] != 0.0);
    }

    #[test]
    fn error_paths() {
        let policy = TablePolicy { params: vec![0.0] };
        assert!(matches!(
            grpo_objective(&policy, &[0.0], &[0.0], &[], 0.2),
            Err(GrpoError::NoGroups)
        ));

        let group = group_from_rewards(vec![vec![0], vec![0]], vec![1.0, 0.0]);
        assert!(matches!(
            grpo_objective(&policy, &[0.0], &[0.0], &[group.clone()], 0.0),
            Err(GrpoError::BadConfig(_))
        ));
        assert!(matches!(
            grpo_objective(&policy, &[0.0], &[0.0], &[group.clone()], 1.0),
            Err(GrpoError::BadConfig(_))
        ));

        // Non-finite logprob under the frozen parameters.
        assert!(matches!(
            grpo_objective(&policy, &[0.0], &[f64::NEG_INFINITY], &[group], 0.2),
            Err(GrpoError::DegenerateRatio { .. })
        ));

        let empty = RolloutGroup {
            responses: vec![vec![], vec![0]],
            ..group_from_rewards(vec![vec![0], vec![0]], vec![1.0, 0.0])
        };
        assert!(matches!(
            grpo_objective(&policy, &[0.0], &[0.0], &[empty], 0.2),
            Err(GrpoError::EmptyResponse { group: 0, response: 0 })
        ));
    }
}
