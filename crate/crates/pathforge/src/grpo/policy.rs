//! The policy abstraction the optimizer drives.
//!
//! A policy is an autoregressive distribution over small-vocabulary token
//! sequences, conditioned on a prompt, with a flat real parameter vector.
//! Everything the objective needs is exact: log-probabilities evaluated at
//! *arbitrary* parameter vectors (so one architecture can be queried under
//! both the current and the frozen pre-step parameters) and analytic
//! gradients of those log-probabilities, exposed as a scaled accumulation so
//! callers never materialize a tokens-by-parameters Jacobian.

use rand_chacha::ChaCha8Rng;

/// An autoregressive policy with differentiable token log-probabilities.
pub trait Policy {
    /// Conditioning information for one rollout (the toy lab uses cue codes).
    type Prompt: Clone;

    /// Length of the flat parameter vector.
    fn param_len(&self) -> usize;

    /// Current parameters, flattened.
    fn params(&self) -> &[f64];

    /// Replace the current parameters. Panics if the length is wrong.
    fn set_params(&mut self, params: &[f64]);

    /// Sample a response under the *current* parameters, stopping at the
    /// policy's terminal token or after `max_tokens`.
    fn generate(&self, prompt: &Self::Prompt, rng: &mut ChaCha8Rng, max_tokens: usize) -> Vec<usize>;

    /// Per-token log-probabilities of `tokens` given `prompt`, evaluated at
    /// the supplied parameter vector (not necessarily the current one).
    fn logprobs_at(&self, params: &[f64], prompt: &Self::Prompt, tokens: &[usize]) -> Vec<f64>;

    /// Add `Σ_t coeffs[t] · ∇_params logprob(tokens[t])` into `out`,
    /// evaluated at `params`. `out` has `param_len()` entries.
    fn accumulate_logprob_grads(
        &self,
        params: &[f64],
        prompt: &Self::Prompt,
        tokens: &[usize],
        coeffs: &[f64],
        out: &mut [f64],
    );
}
