//! A desk-scale training lab: synthetic world, analytic policy, and the
//! supervised/reinforcement scenarios that probe how path-augmented data
//! changes what reinforcement can still teach.
//!
//! The lab exists to make qualitative training phenomena reproducible in
//! seconds on a laptop, with every gradient exact and every run a pure
//! function of its seed:
//!
//! * [`world`] — a five-class presentation-attack world observed through
//!   three discrete sensor modalities, with controllable noise and domain
//!   shift;
//! * [`policy`] — a log-linear first-order Markov policy over transcript
//!   tokens, with closed-form log-probabilities and gradients;
//! * [`sft`] — deterministic full-batch supervised fine-tuning on forged
//!   records;
//! * [`eval`] — answer accuracy, liveness scoring, and perplexity;
//! * [`scenario`] — the five experiment arms and their reports.

pub mod eval;
pub mod policy;
pub mod scenario;
pub mod sft;
pub mod world;
