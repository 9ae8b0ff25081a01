//! Supervised fine-tuning of the toy policy on forged records.
//!
//! Training is full-batch gradient descent on the mean per-token negative
//! log-likelihood — deterministic, free of minibatch scheduling choices, and
//! convex for this log-linear policy, so runs are exactly reproducible and
//! loss curves are monotone in practice.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::policy::{EncodeError, TokenVocab, ToyPolicy, ToyPrompt};
use crate::forge::TrainingRecord;
use crate::grpo::Policy;

/// One tokenized training pair: the conditioning codes and the transcript.
pub type SftExample = (ToyPrompt, Vec<usize>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SftConfig {
    pub learning_rate: f64,
    pub steps: usize,
}

impl Default for SftConfig {
    fn default() -> Self {
        Self { learning_rate: 0.5, steps: 250 }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SftError {
    #[error("no training examples")]
    Empty,
    #[error("record {sample_id} (path {path_id}): {source}")]
    Encode {
        sample_id: String,
        path_id: String,
        source: EncodeError,
    },
    #[error("learning rate must be positive and finite, got {0}")]
    BadLearningRate(f64),
}

/// Tokenize forged records into training pairs.
pub fn encode_records(
    vocab: &TokenVocab,
    records: &[TrainingRecord],
) -> Result<Vec<SftExample>, SftError> {
    records
        .iter()
        .map(|record| {
            let wrap = |source| SftError::Encode {
                sample_id: record.sample_id.clone(),
                path_id: record.provenance.path_id.clone(),
                source,
            };
            let prompt = ToyPrompt::from_modalities(&record.modalities).map_err(wrap)?;
            let tokens = vocab.encode(&record.think, &record.answer).map_err(wrap)?;
            Ok((prompt, tokens))
        })
        .collect()
}

/// Mean negative log-likelihood per token over the whole dataset, at an
/// arbitrary parameter vector.
pub fn mean_token_nll(policy: &ToyPolicy, params: &[f64], data: &[SftExample]) -> f64 {
    let mut total = 0.0;
    let mut tokens = 0usize;
    for (prompt, seq) in data {
        total -= policy.logprobs_at(params, prompt, seq).iter().sum::<f64>();
        tokens += seq.len();
    }
    total / tokens as f64
}

/// Loss and its exact gradient at the policy's current parameters.
pub fn sft_loss_and_grad(policy: &ToyPolicy, data: &[SftExample]) -> (f64, Vec<f64>) {
    let params = policy.params();
    let total_tokens: usize = data.iter().map(|(_, seq)| seq.len()).sum();
    let scale = -1.0 / total_tokens as f64;
    let mut grad = vec![0.0; policy.param_len()];
    for (prompt, seq) in data {
        let coeffs = vec![scale; seq.len()];
        policy.accumulate_logprob_grads(params, prompt, seq, &coeffs, &mut grad);
    }
    (mean_token_nll(policy, params, data), grad)
}

/// Train in place; returns the loss curve — the loss before each update,
/// with the final post-training loss appended (`steps + 1` entries).
pub fn sft_train(
    policy: &mut ToyPolicy,
    data: &[SftExample],
    config: &SftConfig,
) -> Result<Vec<f64>, SftError> {
    if data.is_empty() {
        return Err(SftError::Empty);
    }
    if !(config.learning_rate > 0.0 && config.learning_rate.is_finite()) {
        return Err(SftError::BadLearningRate(config.learning_rate));
    }
    let mut curve = Vec::with_capacity(config.steps + 1);
    for _ in 0..config.steps {
        let (loss, grad) = sft_loss_and_grad(policy, data);
        curve.push(loss);
        let updated: Vec<f64> = policy
            .params()
            .iter()
            .zip(&grad)
            .map(|(p, g)| p - config.learning_rate * g)
            .collect();
        policy.set_params(&updated);
    }
    curve.push(mean_token_nll(policy, policy.params(), data));
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge::{forge, shuffle_answers, ForgeConfig};
    use crate::sampler::{PathLimit, SamplerConfig};
    use crate::taxonomy::fixture_tree;
    use crate::toy::policy::ANSWER_START;
    use crate::toy::world::{generate_samples, DomainSpec, PresentationClass};
    use rand::Rng;

    fn forged_records(n_samples: usize, paths: usize) -> Vec<TrainingRecord> {
        let tree = fixture_tree();
        let domain = DomainSpec { noise: 0.0, ir_rotation: 0 };
        let manifest: Vec<_> = generate_samples(n_samples, &domain, 3, "train")
            .iter()
            .map(|s| s.to_sample_record())
            .collect();
        let config = ForgeConfig {
            seed: 5,
            sampler: SamplerConfig {
                limit: PathLimit::Count(paths),
                ..SamplerConfig::default()
            },
        };
        let report = forge(&tree, &manifest, &config);
        assert!(report.failures.is_empty());
        report.records
    }

    fn vocab() -> TokenVocab {
        TokenVocab::from_tree(&fixture_tree()).unwrap()
    }

    #[test]
    fn encoding_produces_aligned_pairs() {
        let records = forged_records(5, 2);
        let data = encode_records(&vocab(), &records).unwrap();
        assert_eq!(data.len(), records.len());
        for ((prompt, tokens), record) in data.iter().zip(&records) {
            assert_eq!(prompt.rgb, record.modalities["rgb"]);
            assert!(tokens.len() >= 5, "tags plus at least one clause and the answer");
        }
    }

    #[test]
    fn training_reduces_loss() {
        let records = forged_records(10, 2);
        let data = encode_records(&vocab(), &records).unwrap();
        let mut policy = ToyPolicy::format_prior(vocab(), 1.0);
        let config = SftConfig { learning_rate: 0.5, steps: 60 };
        let curve = sft_train(&mut policy, &data, &config).unwrap();
        assert_eq!(curve.len(), 61);
        assert!(
            curve.last().unwrap() < &(curve[0] * 0.7),
            "loss should drop substantially: {} -> {}",
            curve[0],
            curve.last().unwrap()
        );
        assert!(
            curve.windows(2).all(|w| w[1] <= w[0] + 1e-9),
            "full-batch descent on a convex loss should be monotone"
        );
    }

    #[test]
    fn loss_gradient_matches_finite_differences() {
        let records = forged_records(5, 1);
        let data = encode_records(&vocab(), &records).unwrap();
        let mut policy = ToyPolicy::zeroed(vocab(), 1.0);
        let mut rng = crate::seeding::rng_for(13, "sft-fd");
        let params: Vec<f64> =
            (0..policy.param_len()).map(|_| rng.gen_range(-0.3..0.3)).collect();
        policy.set_params(&params);
        let (_, grad) = sft_loss_and_grad(&policy, &data);

        let h = 1e-5;
        for _ in 0..40 {
            let k = rng.gen_range(0..policy.param_len());
            let mut plus = params.clone();
            plus[k] += h;
            let mut minus = params.clone();
            minus[k] -= h;
            let fd = (mean_token_nll(&policy, &plus, &data)
                - mean_token_nll(&policy, &minus, &data))
                / (2.0 * h);
            let rel = (grad[k] - fd).abs() / grad[k].abs().max(fd.abs()).max(1e-6);
            assert!(rel < 1e-4, "param {k}: analytic {} vs fd {fd}", grad[k]);
        }
    }

    /// Post-training probability of each class's correct answer token, read
    /// from the answer head at its cue row.
    fn answer_confidences(policy: &ToyPolicy) -> Vec<f64> {
        PresentationClass::ALL
            .iter()
            .map(|class| {
                let (rgb, depth, ir) = class.cue_row();
                let probs = policy
                    .next_token_probs(&ToyPrompt { rgb, depth, ir }, Some(ANSWER_START));
                probs[policy.vocab().answer_token(class.label()).unwrap()]
            })
            .collect()
    }

    #[test]
    fn clean_training_sharpens_the_answer_head() {
        let records = forged_records(25, 2);
        let data = encode_records(&vocab(), &records).unwrap();
        let mut policy = ToyPolicy::format_prior(vocab(), 1.0);
        sft_train(&mut policy, &data, &SftConfig { learning_rate: 0.5, steps: 400 }).unwrap();
        for (class, confidence) in PresentationClass::ALL.iter().zip(answer_confidences(&policy)) {
            assert!(
                confidence > 0.8,
                "{class:?}: answer confidence only {confidence}"
            );
        }
    }

    #[test]
    fn deranged_answers_keep_the_answer_head_flat() {
        let mut records = forged_records(25, 2);
        shuffle_answers(&mut records, 2, true).unwrap();
        let data = encode_records(&vocab(), &records).unwrap();
        let mut policy = ToyPolicy::format_prior(vocab(), 1.0);
        sft_train(&mut policy, &data, &SftConfig { learning_rate: 0.5, steps: 150 }).unwrap();
        for (class, confidence) in PresentationClass::ALL.iter().zip(answer_confidences(&policy)) {
            assert!(
                confidence < 0.5,
                "{class:?}: deranged supervision should not teach the right \
                 answer, yet confidence is {confidence}"
            );
        }
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let mut policy = ToyPolicy::zeroed(vocab(), 1.0);
        assert_eq!(
            sft_train(&mut policy, &[], &SftConfig::default()),
            Err(SftError::Empty)
        );
        let records = forged_records(2, 1);
        let data = encode_records(&vocab(), &records).unwrap();
        assert_eq!(
            sft_train(&mut policy, &data, &SftConfig { learning_rate: 0.0, steps: 1 }),
            Err(SftError::BadLearningRate(0.0))
        );
    }

    #[test]
    fn training_is_deterministic() {
        let records = forged_records(8, 2);
        let data = encode_records(&vocab(), &records).unwrap();
        let run = || {
            let mut policy = ToyPolicy::format_prior(vocab(), 1.0);
            let curve =
                sft_train(&mut policy, &data, &SftConfig { learning_rate: 0.4, steps: 30 })
                    .unwrap();
            (policy.params().to_vec(), curve)
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn bad_records_name_their_origin() {
        let mut records = forged_records(2, 1);
        records[0].think = "gibberish the vocabulary cannot read".to_string();
        let err = encode_records(&vocab(), &records).unwrap_err();
        match err {
            SftError::Encode { sample_id, source, .. } => {
                assert_eq!(sample_id, records[0].sample_id);
                assert_eq!(source, EncodeError::UnknownClause { at: 0 });
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
