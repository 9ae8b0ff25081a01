//! Group-relative policy optimization against verifiable rewards.
//!
//! One optimization step rolls out a *group* of G responses per prompt under
//! the frozen current policy, scores each response with two binary rewards
//! (well-formed tag grammar, correct answer), normalizes rewards to
//! advantages *within the group* (no value network), and ascends a clipped
//! importance-ratio surrogate:
//!
//! ```text
//! J = mean over groups of (1/G) Σ_i (1/|o_i|) Σ_t min(r_it Â_i, clip(r_it, 1-ε, 1+ε) Â_i)
//! r_it = exp(logprob_θ(o_it) - logprob_θold(o_it))
//! ```
//!
//! There is no KL term; trust-region control is the clip alone. The gradient
//! is computed exactly (the policy exposes analytic per-token log-prob
//! gradients), treating `clip` and `min` piecewise with the left-branch
//! derivative at their breakpoints, and each step applies one plain
//! gradient-ascent update with a fixed learning rate.
//!
//! The quantity this module is really instrumented for is *group
//! effectiveness*: a group whose rewards all tie — every rollout right, or
//! every rollout wrong — has zero reward variance, so its advantages vanish
//! and it contributes nothing to the gradient. [`effectiveness_ledger`]
//! accumulates how many groups were effective versus ineffective over
//! training, which is the observable that separates healthy RL from RL
//! starved by an overconfident supervised initialization.

mod advantage;
mod objective;
mod policy;
mod reward;
mod step;

pub use self::advantage::*;
pub use self::objective::*;
pub use self::policy::*;
pub use self::reward::*;
pub use self::step::*;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GrpoError {
    #[error("a rollout group needs at least 2 responses, got {size}")]
    GroupTooSmall { size: usize },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("objective needs at least one rollout group")]
    NoGroups,
    #[error("group {group} response {response} is empty")]
    EmptyResponse { group: usize, response: usize },
    #[error(
        "degenerate importance ratio at group {group} response {response} token {token}: \
         log-probability is not finite"
    )]
    DegenerateRatio {
        group: usize,
        response: usize,
        token: usize,
    },
    #[error("group advantages length {advantages} does not match responses {responses}")]
    MismatchedGroup { advantages: usize, responses: usize },
}
