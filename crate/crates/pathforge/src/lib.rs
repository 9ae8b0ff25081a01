//! Reasoning-path augmentation for chain-of-thought training data.
//!
//! A face anti-spoofing decision can be reached along many lines of reasoning:
//! inspect the depth map first, rule out a replay, step back, commit to "real".
//! This crate turns a hand-written reasoning taxonomy (a tree whose leaves are
//! final answers and whose nodes carry affirmative/reflective clause templates)
//! into many distinct chain-of-thought traces per labeled sample, packages them
//! as training records, and provides a small, fully analytic SFT + GRPO lab for
//! studying *why* supervised fine-tuning on such data can leave reinforcement
//! learning with nothing to do — and how answer shuffling restores exploration.
//!
//! The pieces, bottom to top:
//!
//! - [`taxonomy`] — the reasoning tree: JSON load/save, structural validation,
//!   canonical serialization.
//! - [`sampler`] — signed random walks over the tree: forward (`+`) steps into
//!   children and reflective (`-`) steps back to the parent, each node usable
//!   once per direction per path, bounded by a depth-scaled length budget.
//! - [`cot`] — composes a sampled path into `<think>…</think><answer>…</answer>`
//!   text and parses that grammar back.
//! - [`forge`] — batch dataset construction (manifest in, JSON Lines out) plus
//!   the two label-space transforms: answer shuffling and path shuffling.
//! - [`grpo`] — group-relative policy optimization against verifiable format
//!   and classification rewards, with exact analytic gradients and a ledger of
//!   effective (reward-variance > 0) versus ineffective groups.
//! - [`toy`] — a synthetic multimodal cue world, a log-linear toy policy, SFT,
//!   evaluation, and the five end-to-end training scenarios.
//! - [`metrics`] — Mann–Whitney AUC, EER, and HTER over liveness scores.
//! - [`cli`] — the `pathforge` command-line front end (`tree-validate`,
//!   `forge`, `transform`, `run-scenario`, `eval`).
//!
//! Every randomized operation takes an explicit seed and derives per-item
//! sub-streams by hashing, so identical inputs produce byte-identical outputs
//! regardless of thread count or platform.
//!
//! Runnable walkthroughs live in `examples/`:
//!
//! ```text
//! examples/
//!   validate_tree.rs      load, validate, and canonicalize a reasoning tree
//!   sample_paths.rs       enumerate and sample signed reasoning paths
//!   compose_cot.rs        render paths into tagged chain-of-thought text
//!   forge_dataset.rs      manifest -> training records, end to end
//!   shuffle_transforms.rs answer shuffling and the path-shuffle probe
//!   grpo_basics.rs        rewards, advantages, objective, one RL step
//!   train_scenario.rs     a full SFT+GRPO scenario with report files
//!   evaluate_scores.rs    AUC / EER / HTER on a score table
//! ```

pub mod cli;
pub mod cot;
pub mod forge;
pub mod grpo;
pub mod metrics;
pub mod sampler;
pub mod seeding;
pub mod svg;
pub mod taxonomy;
pub mod toy;
