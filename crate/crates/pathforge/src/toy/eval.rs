//! Evaluation: answer accuracy, liveness scoring, and perplexity.

use super::policy::{ToyPolicy, ToyPrompt, ANSWER_START};
use super::sft::{mean_token_nll, SftExample};
use super::world::SyntheticSample;
use crate::cot::parse;
use crate::grpo::Policy;
use crate::metrics::ScoredSet;

/// Label whose answer probability serves as the liveness score.
pub const LIVE_LABEL: &str = "real";

/// Greedy-decode a transcript for a prompt.
pub fn transcript(policy: &ToyPolicy, prompt: &ToyPrompt, max_tokens: usize) -> String {
    policy.vocab().render_tokens(&policy.greedy_decode(prompt, max_tokens))
}

/// The answer the policy commits to, if its greedy transcript is
/// well-formed.
pub fn classify(policy: &ToyPolicy, prompt: &ToyPrompt, max_tokens: usize) -> Option<String> {
    parse(&transcript(policy, prompt, max_tokens)).ok().map(|(_, answer)| answer)
}

/// Fraction of samples whose greedy transcript parses and names the true
/// class. Malformed transcripts count as wrong.
pub fn accuracy(policy: &ToyPolicy, samples: &[SyntheticSample], max_tokens: usize) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let correct = samples
        .iter()
        .filter(|sample| {
            classify(policy, &ToyPrompt::from_sample(sample), max_tokens).as_deref()
                == Some(sample.class.label())
        })
        .count();
    correct as f64 / samples.len() as f64
}

/// Probability mass the policy puts on the live answer token at the
/// answer position.
///
/// Protocol: decode greedily, find the first emitted answer-opening tag, and
/// read the next-token distribution there (appending the tag when decoding
/// never reaches one). For this first-order policy that distribution depends
/// only on the tag context and the modality codes, so both branches of the
/// protocol reduce to the same conditional — computed directly here.
///
/// Panics if the vocabulary lacks a `"real"` answer token; lab vocabularies
/// are built from taxonomies whose live leaves carry that name.
pub fn liveness_score(policy: &ToyPolicy, prompt: &ToyPrompt) -> f64 {
    let live = policy
        .vocab()
        .answer_token(LIVE_LABEL)
        .expect("vocabulary has a live answer token");
    policy.next_token_probs(prompt, Some(ANSWER_START))[live]
}

/// Score every sample and split by ground truth into live and spoof sets.
pub fn scored_set(policy: &ToyPolicy, samples: &[SyntheticSample]) -> ScoredSet {
    let mut set = ScoredSet { live: Vec::new(), spoof: Vec::new() };
    for sample in samples {
        let score = liveness_score(policy, &ToyPrompt::from_sample(sample));
        if sample.class.is_live() {
            set.live.push(score);
        } else {
            set.spoof.push(score);
        }
    }
    set
}

/// `exp` of the mean per-token negative log-likelihood over a dataset.
pub fn perplexity(policy: &ToyPolicy, data: &[SftExample]) -> f64 {
    mean_token_nll(policy, policy.params(), data).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::fixture_tree;
    use crate::toy::policy::TokenVocab;
    use crate::toy::world::{generate_samples, DomainSpec, DEPTH_ARITY, IR_ARITY, RGB_ARITY};
    use rand::Rng;

    fn vocab() -> TokenVocab {
        TokenVocab::from_tree(&fixture_tree()).unwrap()
    }

    #[test]
    fn format_prior_greedy_accuracy_is_chance_level() {
        // Greedy decoding under uniform answer logits always answers with the
        // alphabetically first label, so accuracy on a balanced split is the
        // frequency of that one class.
        let policy = ToyPolicy::format_prior(vocab(), 1.0);
        let samples = generate_samples(100, &DomainSpec::default(), 11, "eval");
        let acc = accuracy(&policy, &samples, 32);
        assert!((acc - 0.2).abs() < 1e-12, "expected exactly one class right, got {acc}");
    }

    #[test]
    fn liveness_matches_the_decode_protocol() {
        // Random-parameter policy: walk the greedy decode to the first
        // answer-opening tag and read the distribution there; it must equal
        // the directly computed conditional, tag emitted or not.
        let mut rng = crate::seeding::rng_for(3, "eval-protocol");
        for trial in 0..20 {
            let mut policy = ToyPolicy::zeroed(vocab(), 1.0);
            let params: Vec<f64> =
                (0..policy.param_len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            policy.set_params(&params);
            let prompt = ToyPrompt {
                rgb: rng.gen_range(0..RGB_ARITY),
                depth: rng.gen_range(0..DEPTH_ARITY),
                ir: rng.gen_range(0..IR_ARITY),
            };
            let direct = liveness_score(&policy, &prompt);
            let decoded = policy.greedy_decode(&prompt, 32);
            // Force-append convention: with or without an emitted tag, the
            // read happens with the tag as the previous token.
            let live = policy.vocab().answer_token(LIVE_LABEL).unwrap();
            let via_protocol = policy.next_token_probs(&prompt, Some(ANSWER_START))[live];
            assert_eq!(direct, via_protocol, "trial {trial}, decoded len {}", decoded.len());
        }
    }

    #[test]
    fn scored_set_splits_by_ground_truth() {
        let policy = ToyPolicy::format_prior(vocab(), 1.0);
        let samples = generate_samples(25, &DomainSpec::default(), 12, "eval");
        let set = scored_set(&policy, &samples);
        assert_eq!(set.live.len(), 5);
        assert_eq!(set.spoof.len(), 20);
        for score in set.live.iter().chain(&set.spoof) {
            assert!((0.0..=1.0).contains(score));
        }
        // Uniform answer head: every score is exactly one fifth of the
        // answer mass, whatever the cues.
        let reference = set.live[0];
        assert!(set.spoof.iter().all(|s| (s - reference).abs() < 1e-9));
    }

    #[test]
    fn zeroed_policy_perplexity_equals_vocab_size() {
        // Every conditional is uniform over 53 tokens, so per-token
        // perplexity is exactly the vocabulary size.
        let policy = ToyPolicy::zeroed(vocab(), 1.0);
        let data: Vec<SftExample> = vec![
            (ToyPrompt { rgb: 0, depth: 0, ir: 0 }, vec![0, 10, 20, 1, 2, 51, 3]),
            (ToyPrompt { rgb: 4, depth: 2, ir: 2 }, vec![0, 11, 1, 2, 48, 3]),
        ];
        let ppl = perplexity(&policy, &data);
        assert!((ppl - 53.0).abs() < 1e-9, "got {ppl}");
    }

    #[test]
    fn malformed_transcripts_count_as_wrong() {
        // The zeroed policy greedily repeats token 0 and never closes the
        // transcript, so nothing parses and accuracy is zero.
        let policy = ToyPolicy::zeroed(vocab(), 1.0);
        let samples = generate_samples(10, &DomainSpec::default(), 13, "eval");
        assert_eq!(accuracy(&policy, &samples, 16), 0.0);
        assert_eq!(classify(&policy, &ToyPrompt { rgb: 0, depth: 0, ir: 0 }, 16), None);
    }
}
