//! A tiny autoregressive policy over transcript tokens.
//!
//! The vocabulary is built from a reasoning taxonomy: four structural tags,
//! one token per node clause (positive and negative), and one token per
//! distinct leaf label. The policy is log-linear with first-order Markov
//! structure: the logit of the next token is a learned function of the
//! previous token plus one learned row per observed modality code. Log
//! probabilities and their parameter gradients are exact and cheap, which is
//! what makes desk-scale reinforcement experiments trustworthy.
//!
//! The Markov structure is also a deliberate epistemic limitation: the
//! answer token can only see the token immediately before it (normally the
//! answer-opening tag) and the modality codes — never the content of the
//! think block. Any classification skill therefore lives in the code→answer
//! table, which is exactly the shortcut the experiments probe.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::world::{SyntheticSample, DEPTH_ARITY, IR_ARITY, RGB_ARITY};
use crate::cot::{ANSWER_CLOSE, ANSWER_OPEN, THINK_CLOSE, THINK_OPEN};
use crate::grpo::Policy;
use crate::taxonomy::ReasoningTree;

/// Token id of the think-opening tag.
pub const THINK_START: usize = 0;
/// Token id of the think-closing tag.
pub const THINK_END: usize = 1;
/// Token id of the answer-opening tag.
pub const ANSWER_START: usize = 2;
/// Token id of the answer-closing tag; generation stops after emitting it.
pub const ANSWER_END: usize = 3;
const TAG_COUNT: usize = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VocabError {
    #[error("clause text {0:?} appears on more than one node side")]
    DuplicateClause(String),
    #[error("clause text {0:?} contains a structural tag")]
    TagInClause(String),
    #[error("tree has no leaves to answer with")]
    NoAnswers,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("think text has no known clause starting at byte {at}")]
    UnknownClause { at: usize },
    #[error("answer {0:?} is not a known label")]
    UnknownAnswer(String),
    #[error("modalities are missing {0:?}")]
    MissingModality(&'static str),
    #[error("{modality} code {code} exceeds alphabet size {arity}")]
    CodeOutOfRange {
        modality: &'static str,
        code: u32,
        arity: u32,
    },
}

/// Token inventory derived from one reasoning taxonomy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenVocab {
    /// Rendered text per token id.
    texts: Vec<String>,
    clause_count: usize,
    answer_count: usize,
    /// `(clause text, token id)` in descending text length, for greedy
    /// longest-match tokenization.
    clause_lookup: Vec<(String, usize)>,
    answer_lookup: BTreeMap<String, usize>,
}

impl TokenVocab {
    /// Build the vocabulary: tags, then both clauses of every node in id
    /// order, then the distinct leaf labels in sorted order.
    pub fn from_tree(tree: &ReasoningTree) -> Result<TokenVocab, VocabError> {
        let mut texts = vec![
            THINK_OPEN.to_string(),
            THINK_CLOSE.to_string(),
            ANSWER_OPEN.to_string(),
            ANSWER_CLOSE.to_string(),
        ];
        let mut clause_lookup = Vec::new();
        for node in tree.nodes() {
            for clause in [&node.clause_positive, &node.clause_negative] {
                for tag in [THINK_OPEN, THINK_CLOSE, ANSWER_OPEN, ANSWER_CLOSE] {
                    if clause.contains(tag) {
                        return Err(VocabError::TagInClause(clause.clone()));
                    }
                }
                if clause_lookup.iter().any(|(text, _)| text == clause) {
                    return Err(VocabError::DuplicateClause(clause.clone()));
                }
                clause_lookup.push((clause.clone(), texts.len()));
                texts.push(clause.clone());
            }
        }
        let clause_count = texts.len() - TAG_COUNT;
        clause_lookup.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.1.cmp(&b.1)));

        let labels: BTreeSet<&str> = tree
            .nodes()
            .filter(|n| n.is_leaf())
            .map(|n| n.name.as_str())
            .collect();
        if labels.is_empty() {
            return Err(VocabError::NoAnswers);
        }
        let mut answer_lookup = BTreeMap::new();
        for label in labels {
            answer_lookup.insert(label.to_string(), texts.len());
            texts.push(label.to_string());
        }
        let answer_count = texts.len() - TAG_COUNT - clause_count;
        Ok(TokenVocab {
            texts,
            clause_count,
            answer_count,
            clause_lookup,
            answer_lookup,
        })
    }

    pub fn len(&self) -> usize {
        self.texts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn clause_count(&self) -> usize {
        self.clause_count
    }

    pub fn answer_count(&self) -> usize {
        self.answer_count
    }

    pub fn text(&self, token: usize) -> &str {
        &self.texts[token]
    }

    pub fn is_tag(&self, token: usize) -> bool {
        token < TAG_COUNT
    }

    pub fn is_clause(&self, token: usize) -> bool {
        (TAG_COUNT..TAG_COUNT + self.clause_count).contains(&token)
    }

    pub fn is_answer(&self, token: usize) -> bool {
        (TAG_COUNT + self.clause_count..self.len()).contains(&token)
    }

    /// Token ids of all clause tokens, ascending.
    pub fn clause_tokens(&self) -> std::ops::Range<usize> {
        TAG_COUNT..TAG_COUNT + self.clause_count
    }

    /// Token ids of all answer tokens, ascending.
    pub fn answer_tokens(&self) -> std::ops::Range<usize> {
        TAG_COUNT + self.clause_count..self.len()
    }

    pub fn answer_token(&self, label: &str) -> Option<usize> {
        self.answer_lookup.get(label).copied()
    }

    pub fn answer_label(&self, token: usize) -> Option<&str> {
        self.is_answer(token).then(|| self.texts[token].as_str())
    }

    /// Tokenize a composed transcript body: the think text must be known
    /// clauses joined by single spaces, the answer a known label.
    pub fn encode(&self, think: &str, answer: &str) -> Result<Vec<usize>, EncodeError> {
        let mut tokens = vec![THINK_START];
        let mut rest = think;
        loop {
            let hit = self.clause_lookup.iter().find(|(text, _)| {
                rest.starts_with(text.as_str())
                    && matches!(rest.as_bytes().get(text.len()), None | Some(b' '))
            });
            match hit {
                Some((text, id)) => {
                    tokens.push(*id);
                    if rest.len() == text.len() {
                        break;
                    }
                    rest = &rest[text.len() + 1..];
                }
                None => {
                    return Err(EncodeError::UnknownClause { at: think.len() - rest.len() })
                }
            }
        }
        tokens.push(THINK_END);
        tokens.push(ANSWER_START);
        tokens.push(
            self.answer_token(answer)
                .ok_or_else(|| EncodeError::UnknownAnswer(answer.to_string()))?,
        );
        tokens.push(ANSWER_END);
        Ok(tokens)
    }

    /// Render any token sequence to text: tags verbatim, word tokens
    /// separated from each other by single spaces. Inverse of [`encode`] on
    /// well-formed sequences; total on everything else, so malformed
    /// generations render to text the grammar checker can fail honestly.
    ///
    /// [`encode`]: TokenVocab::encode
    pub fn render_tokens(&self, tokens: &[usize]) -> String {
        let mut out = String::new();
        let mut prev_wordy = false;
        for &token in tokens {
            let wordy = !self.is_tag(token);
            if wordy && prev_wordy {
                out.push(' ');
            }
            out.push_str(&self.texts[token]);
            prev_wordy = wordy;
        }
        out
    }
}

/// The observation a policy conditions on: one code per modality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToyPrompt {
    pub depth: u32,
    pub ir: u32,
    pub rgb: u32,
}

impl ToyPrompt {
    pub fn from_sample(sample: &SyntheticSample) -> Self {
        Self { depth: sample.depth, ir: sample.ir, rgb: sample.rgb }
    }

    /// Read the codes out of a training record's modality map.
    pub fn from_modalities(modalities: &BTreeMap<String, u32>) -> Result<Self, EncodeError> {
        let get = |key: &'static str| {
            modalities.get(key).copied().ok_or(EncodeError::MissingModality(key))
        };
        let prompt = Self { depth: get("depth")?, ir: get("ir")?, rgb: get("rgb")? };
        for (modality, code, arity) in [
            ("rgb", prompt.rgb, RGB_ARITY),
            ("depth", prompt.depth, DEPTH_ARITY),
            ("ir", prompt.ir, IR_ARITY),
        ] {
            if code >= arity {
                return Err(EncodeError::CodeOutOfRange { modality, code, arity });
            }
        }
        Ok(prompt)
    }
}

/// Additive weight a structural edge receives in the format-prior
/// initialization.
pub const FORMAT_PRIOR_WEIGHT: f64 = 8.0;
/// Odds multiplier favouring closing the think block over continuing with
/// any single clause, keeping generated thinks a few clauses long.
const THINK_CLOSE_ODDS: f64 = 15.0;

/// Log-linear first-order Markov policy over transcript tokens.
///
/// `logit(next) = trans[prev][next] + rgb[code][next] + depth[code][next]
/// + ir[code][next]`, and next-token probabilities are
/// `softmax(logits / temperature)`. Parameters are a single flat vector of
/// `(vocab + 1 + rgb_arity + depth_arity + ir_arity) × vocab` weights: one
/// transition row per previous token plus a start-of-sequence row, then one
/// row per modality code.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyPolicy {
    vocab: TokenVocab,
    temperature: f64,
    params: Vec<f64>,
}

impl ToyPolicy {
    /// All-zero parameters: every next token uniform in every context.
    pub fn zeroed(vocab: TokenVocab, temperature: f64) -> ToyPolicy {
        assert!(temperature > 0.0, "temperature must be positive");
        let rows = vocab.len() + 1 + (RGB_ARITY + DEPTH_ARITY + IR_ARITY) as usize;
        let params = vec![0.0; rows * vocab.len()];
        ToyPolicy { vocab, temperature, params }
    }

    /// Initialize with transcript structure but no class knowledge: the tag
    /// skeleton and clause chaining get strong transition weights, answers
    /// stay uniform. This is the honest starting point for reinforcement
    /// runs — rollouts are mostly well-formed, so reward differences come
    /// from the classification term, not from formatting luck.
    pub fn format_prior(vocab: TokenVocab, temperature: f64) -> ToyPolicy {
        let mut policy = ToyPolicy::zeroed(vocab, temperature);
        let w = FORMAT_PRIOR_WEIGHT;
        let bos = policy.bos_row();
        policy.bump(bos, THINK_START, w);
        let clauses: Vec<usize> = policy.vocab.clause_tokens().collect();
        let answers: Vec<usize> = policy.vocab.answer_tokens().collect();
        for &c in &clauses {
            policy.bump(THINK_START, c, w);
            for &c2 in &clauses {
                policy.bump(c, c2, w);
            }
            policy.bump(c, THINK_END, w + THINK_CLOSE_ODDS.ln());
        }
        policy.bump(THINK_END, ANSWER_START, w);
        for &a in &answers {
            policy.bump(ANSWER_START, a, w);
            policy.bump(a, ANSWER_END, w);
        }
        policy
    }

    pub fn vocab(&self) -> &TokenVocab {
        &self.vocab
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    fn bump(&mut self, row: usize, token: usize, delta: f64) {
        self.params[row * self.vocab.len() + token] += delta;
    }

    /// Transition row index for a previous token, or the start row.
    fn context_row(&self, prev: Option<usize>) -> usize {
        prev.unwrap_or_else(|| self.bos_row())
    }

    fn bos_row(&self) -> usize {
        self.vocab.len()
    }

    fn rgb_row(&self, code: u32) -> usize {
        self.vocab.len() + 1 + code as usize
    }

    fn depth_row(&self, code: u32) -> usize {
        self.vocab.len() + 1 + (RGB_ARITY + code) as usize
    }

    fn ir_row(&self, code: u32) -> usize {
        self.vocab.len() + 1 + (RGB_ARITY + DEPTH_ARITY + code) as usize
    }

    fn active_rows(&self, prompt: &ToyPrompt, prev: Option<usize>) -> [usize; 4] {
        [
            self.context_row(prev),
            self.rgb_row(prompt.rgb),
            self.depth_row(prompt.depth),
            self.ir_row(prompt.ir),
        ]
    }

    /// Temperature-scaled log-probabilities of every next token.
    fn log_probs(&self, params: &[f64], prompt: &ToyPrompt, prev: Option<usize>) -> Vec<f64> {
        let n = self.vocab.len();
        let rows = self.active_rows(prompt, prev);
        let mut scaled: Vec<f64> = (0..n)
            .map(|b| rows.iter().map(|&r| params[r * n + b]).sum::<f64>() / self.temperature)
            .collect();
        let max = scaled.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + scaled.iter().map(|&s| (s - max).exp()).sum::<f64>().ln();
        for s in &mut scaled {
            *s -= lse;
        }
        scaled
    }

    /// Next-token distribution in a context, under the live parameters.
    pub fn next_token_probs(&self, prompt: &ToyPrompt, prev: Option<usize>) -> Vec<f64> {
        self.log_probs(&self.params, prompt, prev).iter().map(|lp| lp.exp()).collect()
    }

    /// Deterministic argmax decode; ties break toward the lowest token id.
    pub fn greedy_decode(&self, prompt: &ToyPrompt, max_tokens: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut prev = None;
        for _ in 0..max_tokens {
            let lps = self.log_probs(&self.params, prompt, prev);
            let mut best = 0;
            for (b, &lp) in lps.iter().enumerate() {
                if lp > lps[best] {
                    best = b;
                }
            }
            out.push(best);
            if best == ANSWER_END {
                break;
            }
            prev = Some(best);
        }
        out
    }
}

impl Policy for ToyPolicy {
    type Prompt = ToyPrompt;

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

    fn generate(&self, prompt: &ToyPrompt, rng: &mut ChaCha8Rng, max_tokens: usize) -> Vec<usize> {
        let n = self.vocab.len();
        let mut out = Vec::new();
        let mut prev = None;
        for _ in 0..max_tokens {
            let lps = self.log_probs(&self.params, prompt, prev);
            let u: f64 = rng.gen_range(0.0..1.0);
            let mut acc = 0.0;
            let mut pick = n - 1;
            for (b, &lp) in lps.iter().enumerate() {
                acc += lp.exp();
                if u < acc {
                    pick = b;
                    break;
                }
            }
            out.push(pick);
            if pick == ANSWER_END {
                break;
            }
            prev = Some(pick);
        }
        out
    }

    fn logprobs_at(&self, params: &[f64], prompt: &ToyPrompt, tokens: &[usize]) -> Vec<f64> {
        let mut out = Vec::with_capacity(tokens.len());
        let mut prev = None;
        for &token in tokens {
            out.push(self.log_probs(params, prompt, prev)[token]);
            prev = Some(token);
        }
        out
    }

    fn accumulate_logprob_grads(
        &self,
        params: &[f64],
        prompt: &ToyPrompt,
        tokens: &[usize],
        coeffs: &[f64],
        out: &mut [f64],
    ) {
        assert_eq!(tokens.len(), coeffs.len());
        assert_eq!(out.len(), self.params.len());
        let n = self.vocab.len();
        let mut prev = None;
        for (&token, &c) in tokens.iter().zip(coeffs) {
            if c != 0.0 {
                let lps = self.log_probs(params, prompt, prev);
                let rows = self.active_rows(prompt, prev);
                // ∂ log p(token) / ∂ w[row][b] = (1[b = token] − p(b)) / T
                // for each of the four rows feeding the logits.
                for &row in &rows {
                    let base = row * n;
                    for (b, &lp) in lps.iter().enumerate() {
                        let indicator = if b == token { 1.0 } else { 0.0 };
                        out[base + b] += c * (indicator - lp.exp()) / self.temperature;
                    }
                }
            }
            prev = Some(token);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cot::{compose, parse, render};
    use crate::sampler::direct_path;
    use crate::taxonomy::fixture_tree;
    use rand::{Rng, SeedableRng};

    fn fixture_vocab() -> TokenVocab {
        TokenVocab::from_tree(&fixture_tree()).unwrap()
    }

    #[test]
    fn fixture_vocab_has_expected_shape() {
        let vocab = fixture_vocab();
        assert_eq!(vocab.len(), 53);
        assert_eq!(vocab.clause_count(), 44);
        assert_eq!(vocab.answer_count(), 5);
        assert_eq!(vocab.text(THINK_START), "<think>");
        assert_eq!(vocab.text(ANSWER_END), "</answer>");
        let labels: Vec<&str> =
            vocab.answer_tokens().map(|t| vocab.answer_label(t).unwrap()).collect();
        assert_eq!(
            labels,
            ["mask attack", "paper mask attack", "print attack", "real", "replay attack"],
            "answer tokens must be sorted labels"
        );
        assert_eq!(vocab.answer_token("real"), Some(51));
    }

    #[test]
    fn encode_render_round_trips_composed_transcripts() {
        let tree = fixture_tree();
        let vocab = fixture_vocab();
        for leaf in ["rgb.real", "ir.attack.paper", "depth.attack.replay"] {
            let path = direct_path(&tree, &leaf.into()).unwrap();
            let cot = compose(&tree, &path, "s-000").unwrap();
            let tokens = vocab.encode(&cot.think, &cot.answer).unwrap();
            assert_eq!(tokens[0], THINK_START);
            assert_eq!(tokens[tokens.len() - 1], ANSWER_END);
            assert_eq!(vocab.render_tokens(&tokens), render(&cot));
        }
    }

    #[test]
    fn encode_rejects_unknown_content() {
        let vocab = fixture_vocab();
        assert_eq!(
            vocab.encode("entirely made up clause", "real"),
            Err(EncodeError::UnknownClause { at: 0 })
        );
        let tree = fixture_tree();
        let cot = compose(&tree, &direct_path(&tree, &"rgb.real".into()).unwrap(), "s").unwrap();
        assert_eq!(
            vocab.encode(&cot.think, "genuine"),
            Err(EncodeError::UnknownAnswer("genuine".into()))
        );
    }

    #[test]
    fn vocab_rejects_duplicate_clauses() {
        let json = r#"{
          "nodes": [
            {"id": "a", "name": "a", "children": ["b"],
             "clause_positive": "same words", "clause_negative": "neg a"},
            {"id": "b", "name": "target", "children": [],
             "clause_positive": "same words", "clause_negative": "neg b"}
          ],
          "root": "a"
        }"#;
        let tree = crate::taxonomy::load_tree_str(json).unwrap();
        assert_eq!(
            TokenVocab::from_tree(&tree),
            Err(VocabError::DuplicateClause("same words".into()))
        );
    }

    #[test]
    fn prompt_extraction_validates_codes() {
        let good = BTreeMap::from([
            ("depth".to_string(), 1u32),
            ("ir".to_string(), 2),
            ("rgb".to_string(), 4),
        ]);
        assert_eq!(
            ToyPrompt::from_modalities(&good).unwrap(),
            ToyPrompt { depth: 1, ir: 2, rgb: 4 }
        );

        let mut missing = good.clone();
        missing.remove("ir");
        assert_eq!(
            ToyPrompt::from_modalities(&missing),
            Err(EncodeError::MissingModality("ir"))
        );

        let mut oversize = good.clone();
        oversize.insert("depth".to_string(), 3);
        assert_eq!(
            ToyPrompt::from_modalities(&oversize),
            Err(EncodeError::CodeOutOfRange { modality: "depth", code: 3, arity: 3 })
        );
    }

    fn random_params(policy: &ToyPolicy, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..policy.param_len()).map(|_| rng.gen_range(-0.5..0.5)).collect()
    }

    #[test]
    fn log_probs_normalize() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let policy = ToyPolicy::zeroed(fixture_vocab(), 0.7);
        let params = random_params(&policy, &mut rng);
        for prev in [None, Some(0), Some(17), Some(52)] {
            let prompt = ToyPrompt {
                rgb: rng.gen_range(0..RGB_ARITY),
                depth: rng.gen_range(0..DEPTH_ARITY),
                ir: rng.gen_range(0..IR_ARITY),
            };
            let total: f64 =
                policy.log_probs(&params, &prompt, prev).iter().map(|lp| lp.exp()).sum();
            assert!((total - 1.0).abs() < 1e-12, "prev {prev:?}: total {total}");
        }
    }

    #[test]
    fn logprob_gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let policy = ToyPolicy::zeroed(fixture_vocab(), 1.3);
        let params = random_params(&policy, &mut rng);
        let prompt = ToyPrompt { rgb: 2, depth: 1, ir: 2 };
        let tokens = vec![THINK_START, 9, 30, THINK_END, ANSWER_START, 51, ANSWER_END];
        let coeffs: Vec<f64> = tokens.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();

        let mut grad = vec![0.0; policy.param_len()];
        policy.accumulate_logprob_grads(&params, &prompt, &tokens, &coeffs, &mut grad);

        let objective = |p: &[f64]| -> f64 {
            policy
                .logprobs_at(p, &prompt, &tokens)
                .iter()
                .zip(&coeffs)
                .map(|(lp, c)| lp * c)
                .sum()
        };
        let h = 1e-5;
        // Probe every row kind: transition rows along the token chain, the
        // start row, each modality row, plus a random scatter.
        let n = policy.vocab.len();
        let mut indices: Vec<usize> = vec![
            policy.bos_row() * n + THINK_START,
            THINK_START * n + 9,
            policy.rgb_row(2) * n + 30,
            policy.depth_row(1) * n + ANSWER_START,
            policy.ir_row(2) * n + 51,
        ];
        indices.extend((0..80).map(|_| rng.gen_range(0..policy.param_len())));
        for k in indices {
            let mut plus = params.clone();
            plus[k] += h;
            let mut minus = params.clone();
            minus[k] -= h;
            let fd = (objective(&plus) - objective(&minus)) / (2.0 * h);
            let rel = (grad[k] - fd).abs() / grad[k].abs().max(fd.abs()).max(1e-6);
            assert!(rel < 1e-4, "param {k}: analytic {} vs fd {fd}", grad[k]);
        }
    }

    #[test]
    fn format_prior_generates_mostly_wellformed_uniform_answers() {
        let policy = ToyPolicy::format_prior(fixture_vocab(), 1.0);
        let prompt = ToyPrompt { rgb: 0, depth: 0, ir: 0 };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut parsed = 0;
        let mut answer_counts: BTreeMap<String, usize> = BTreeMap::new();
        let runs = 300;
        for _ in 0..runs {
            let tokens = policy.generate(&prompt, &mut rng, 32);
            let text = policy.vocab.render_tokens(&tokens);
            if let Ok((think, answer)) = parse(&text) {
                parsed += 1;
                assert!(!think.is_empty());
                *answer_counts.entry(answer).or_default() += 1;
            }
        }
        assert!(parsed >= runs * 85 / 100, "only {parsed}/{runs} transcripts parsed");
        assert_eq!(answer_counts.len(), 5, "all labels should appear: {answer_counts:?}");
        for (label, count) in &answer_counts {
            assert!(*count >= 20, "answer {label} only appeared {count} times");
        }
    }

    #[test]
    fn format_prior_greedy_decode_is_wellformed() {
        let policy = ToyPolicy::format_prior(fixture_vocab(), 1.0);
        let tokens = policy.greedy_decode(&ToyPrompt { rgb: 3, depth: 2, ir: 1 }, 32);
        let text = policy.vocab.render_tokens(&tokens);
        let (think, answer) = parse(&text).unwrap();
        assert!(!think.is_empty());
        // Uniform answer logits tie; greedy picks the lowest answer token,
        // which is the alphabetically first label.
        assert_eq!(answer, "mask attack");
    }

    #[test]
    fn generation_is_deterministic_per_rng_stream() {
        let policy = ToyPolicy::format_prior(fixture_vocab(), 1.0);
        let prompt = ToyPrompt { rgb: 1, depth: 1, ir: 1 };
        let mut a = ChaCha8Rng::seed_from_u64(8);
        let mut b = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            assert_eq!(
                policy.generate(&prompt, &mut a, 32),
                policy.generate(&prompt, &mut b, 32)
            );
        }
    }
}
