//! End-to-end training scenarios on the synthetic world.
//!
//! Every scenario shares one skeleton — generate a world, optionally forge
//! and fine-tune on a path-augmented dataset, then run group-relative
//! reinforcement — and varies only the dataset construction:
//!
//! * `raw_single_path`: one reasoning path per sample (the unaugmented
//!   baseline), then reinforcement;
//! * `path_aug`: many sampled paths per sample, then reinforcement;
//! * `path_aug_shuffle_answers`: path-augmented but with answers permuted
//!   across records before fine-tuning;
//! * `path_aug_shuffle_paths`: path-augmented but with whole reasoning
//!   traces swapped between records before fine-tuning;
//! * `rl_only`: no fine-tuning at all, reinforcement from the format prior.
//!
//! All phases derive their randomness from the scenario seed, so a report is
//! a pure function of its configuration.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::eval::{accuracy, perplexity, scored_set};
use super::policy::{TokenVocab, ToyPolicy, ToyPrompt, VocabError};
use super::sft::{encode_records, sft_train, SftConfig, SftError, SftExample};
use super::world::{generate_samples, DomainSpec, SyntheticSample};
use crate::forge::{forge, shuffle_answers, shuffle_paths, ForgeConfig, ForgeError, SampleRecord};
use crate::grpo::{
    effectiveness_ledger, rl_step, GrpoConfig, GrpoError, LedgerPoint, RolloutPrompt,
    StepReport,
};
use crate::metrics::{eer, hter, auc, MetricsError};
use crate::sampler::{Alpha, PathLimit, SamplerConfig};
use crate::seeding::derive_seed;
use crate::toy::world::taxonomy;

/// The five experiment arms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    RawSinglePath,
    PathAug,
    PathAugShuffleAnswers,
    PathAugShufflePaths,
    RlOnly,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::RawSinglePath,
        ScenarioKind::PathAug,
        ScenarioKind::PathAugShuffleAnswers,
        ScenarioKind::PathAugShufflePaths,
        ScenarioKind::RlOnly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::RawSinglePath => "raw_single_path",
            ScenarioKind::PathAug => "path_aug",
            ScenarioKind::PathAugShuffleAnswers => "path_aug_shuffle_answers",
            ScenarioKind::PathAugShufflePaths => "path_aug_shuffle_paths",
            ScenarioKind::RlOnly => "rl_only",
        }
    }

    /// Whether this arm has a supervised phase at all.
    pub fn uses_sft(self) -> bool {
        !matches!(self, ScenarioKind::RlOnly)
    }

    /// Paths drawn per sample: the unaugmented baseline is pinned to one.
    pub fn paths_per_sample(self, configured: usize) -> usize {
        match self {
            ScenarioKind::RawSinglePath => 1,
            _ => configured,
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = ScenarioKind::ALL.iter().map(|k| k.name()).collect();
                format!("unknown scenario {s:?}; expected one of {}", names.join(", "))
            })
    }
}

/// Full configuration of one scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub seed: u64,
    pub train_samples: usize,
    pub eval_samples: usize,
    pub train_domain: DomainSpec,
    pub shifted_domain: DomainSpec,
    /// Paths drawn per sample in augmented arms.
    pub paths_per_sample: usize,
    /// Path-length budget ratio for the sampler.
    pub alpha: Alpha,
    /// Softmax temperature of the policy, for sampling and scoring alike.
    pub temperature: f64,
    /// Decoding budget per transcript.
    pub max_tokens: usize,
    pub sft: SftConfig,
    pub rl: GrpoConfig,
    /// Evaluate accuracy every this many reinforcement steps.
    pub eval_every: usize,
}

impl ScenarioConfig {
    /// Lab defaults for an arm: a desk-scale run that finishes in seconds
    /// yet large enough for the qualitative phenomena to be stable.
    pub fn for_kind(kind: ScenarioKind, seed: u64) -> ScenarioConfig {
        ScenarioConfig {
            kind,
            seed,
            train_samples: 50,
            // Evaluation is cheap (greedy decoding); a large split keeps
            // accuracy granularity fine enough that cross-arm comparisons
            // are not decided by handfuls of samples.
            eval_samples: 500,
            train_domain: DomainSpec::default(),
            shifted_domain: DomainSpec::shifted(),
            // At the default length budget the toy taxonomy admits 156
            // distinct reasoning paths to a "real" verdict but only 16 per
            // attack family, so requesting the full 156 per sample tilts the
            // forged corpus to roughly 71% live records. Supervised training
            // absorbs that answer imbalance — the classic over-acceptance
            // bias of a skewed corpus — while reward-driven training sees
            // balanced per-sample prompts and does not.
            paths_per_sample: 156,
            alpha: Alpha::new(7, 3).expect("7/3 is a valid factor"),
            temperature: 1.0,
            // Generous enough that a sampled chain of thought essentially
            // never hits the budget; truncation would register as a format
            // failure and add reward noise unrelated to the policy itself.
            max_tokens: 64,
            // Long supervised training matters: the qualitative reinforcement
            // phenomena hinge on supervised arms entering reinforcement
            // confident enough that their rollout groups have no reward
            // spread left.
            sft: SftConfig { learning_rate: 0.5, steps: 1000 },
            // A short, decisive reinforcement phase with wide rollout groups:
            // wide groups keep the advantage estimates stable, and stopping
            // soon after convergence avoids the slow parameter drift that
            // reward-noise flukes cause in arms whose groups are mostly
            // degenerate.
            rl: GrpoConfig {
                group_size: 16,
                learning_rate: 30.0,
                steps: 120,
                max_response_tokens: 64,
                ..GrpoConfig::default()
            },
            eval_every: 10,
        }
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        let fail = |msg: String| Err(ScenarioError::BadConfig(msg));
        if self.train_samples == 0 || self.eval_samples == 0 {
            return fail("train_samples and eval_samples must be positive".into());
        }
        if self.paths_per_sample == 0 {
            return fail("paths_per_sample must be positive".into());
        }
        if self.eval_every == 0 {
            return fail("eval_every must be positive".into());
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return fail(format!("temperature must be positive, got {}", self.temperature));
        }
        if self.max_tokens < 6 {
            return fail("max_tokens below 6 cannot fit any complete transcript".into());
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("config: {0}")]
    BadConfig(String),
    #[error("vocabulary: {0}")]
    Vocab(#[from] VocabError),
    #[error("forge produced no records ({failures} samples failed)")]
    EmptyDataset { failures: usize },
    #[error("dataset transform: {0}")]
    Transform(#[from] ForgeError),
    #[error("fine-tuning: {0}")]
    Sft(#[from] SftError),
    #[error("reinforcement: {0}")]
    Grpo(#[from] GrpoError),
    #[error("metrics: {0}")]
    Metrics(#[from] MetricsError),
}

/// Classifier quality at one point in training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSnapshot {
    pub accuracy_clean: f64,
    pub accuracy_shifted: f64,
    pub auc_clean: f64,
    pub auc_shifted: f64,
    /// Equal-error rate on the clean split.
    pub eer_clean: f64,
    /// The clean-split threshold realizing it.
    pub eer_threshold: f64,
    /// Half total error on the shifted split at the clean threshold — the
    /// cross-domain generalization figure.
    pub hter_shifted: f64,
    /// Perplexity of the policy on its own training records, when a
    /// supervised dataset exists.
    pub train_perplexity: Option<f64>,
}

/// What the forge put on the table for the supervised phase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub records: usize,
    pub shortfalls: usize,
    pub failures: usize,
    pub transforms: Vec<String>,
}

/// Supervised-phase telemetry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SftPhase {
    pub initial_loss: f64,
    pub final_loss: f64,
    /// Loss before each update plus the final loss.
    pub loss_curve: Vec<f64>,
    pub post_eval: EvalSnapshot,
}

/// One reinforcement step, compressed for the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSummary {
    pub step: usize,
    pub objective: f64,
    pub mean_reward: f64,
    pub effective_groups: usize,
    pub ineffective_groups: usize,
}

impl StepSummary {
    fn from_report(report: &StepReport) -> StepSummary {
        StepSummary {
            step: report.step,
            objective: report.objective,
            mean_reward: report.mean_reward(),
            effective_groups: report.effective_groups(),
            ineffective_groups: report.ineffective_groups(),
        }
    }
}

/// Clean-split accuracy measured during reinforcement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyPoint {
    pub step: usize,
    pub accuracy: f64,
}

/// Reinforcement-phase telemetry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RlPhase {
    pub steps: Vec<StepSummary>,
    pub ledger: Vec<LedgerPoint>,
    pub accuracy_curve: Vec<AccuracyPoint>,
}

/// The full result of one scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub scenario: String,
    pub seed: u64,
    pub config: ScenarioConfig,
    pub dataset: Option<DatasetSummary>,
    pub sft: Option<SftPhase>,
    pub rl: RlPhase,
    pub final_eval: EvalSnapshot,
}

/// Report plus the uncompressed per-group reinforcement telemetry and the
/// trained policy itself, for callers that want to keep probing it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub report: ExperimentReport,
    pub step_reports: Vec<StepReport>,
    pub policy: ToyPolicy,
}

fn snapshot(
    policy: &ToyPolicy,
    eval_clean: &[SyntheticSample],
    eval_shifted: &[SyntheticSample],
    train_data: Option<&[SftExample]>,
    max_tokens: usize,
) -> Result<EvalSnapshot, MetricsError> {
    let set_clean = scored_set(policy, eval_clean);
    let set_shifted = scored_set(policy, eval_shifted);
    let eer_point = eer(&set_clean)?;
    Ok(EvalSnapshot {
        accuracy_clean: accuracy(policy, eval_clean, max_tokens),
        accuracy_shifted: accuracy(policy, eval_shifted, max_tokens),
        auc_clean: auc(&set_clean)?,
        auc_shifted: auc(&set_shifted)?,
        eer_clean: eer_point.eer,
        eer_threshold: eer_point.threshold,
        hter_shifted: hter(&set_shifted, eer_point.threshold)?,
        train_perplexity: train_data.map(|data| perplexity(policy, data)),
    })
}

/// Run one scenario end to end.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioOutcome, ScenarioError> {
    config.validate()?;
    config.rl.validate()?;
    let seed = config.seed;
    let tree = taxonomy();
    let vocab = TokenVocab::from_tree(&tree)?;

    let train = generate_samples(
        config.train_samples,
        &config.train_domain,
        derive_seed(seed, "world:train"),
        "train",
    );
    let eval_clean = generate_samples(
        config.eval_samples,
        &config.train_domain,
        derive_seed(seed, "world:eval"),
        "eval",
    );
    let eval_shifted = generate_samples(
        config.eval_samples,
        &config.shifted_domain,
        derive_seed(seed, "world:shifted"),
        "shift",
    );

    let mut policy = ToyPolicy::format_prior(vocab.clone(), config.temperature);

    let mut dataset = None;
    let mut sft_phase = None;
    let mut train_data: Option<Vec<SftExample>> = None;
    if config.kind.uses_sft() {
        let manifest: Vec<SampleRecord> =
            train.iter().map(|s| s.to_sample_record()).collect();
        let forge_config = ForgeConfig {
            seed: derive_seed(seed, "forge"),
            sampler: SamplerConfig {
                limit: PathLimit::Count(config.kind.paths_per_sample(config.paths_per_sample)),
                alpha: config.alpha,
                ..SamplerConfig::default()
            },
        };
        let mut forged = forge(&tree, &manifest, &forge_config);
        if forged.records.is_empty() {
            return Err(ScenarioError::EmptyDataset { failures: forged.failures.len() });
        }
        match config.kind {
            ScenarioKind::PathAugShuffleAnswers => {
                // Plain permutation, not a derangement: permuting answers
                // across a class-balanced dataset leaves every cue pattern
                // paired with a near-uniform answer mixture, so supervised
                // training flattens the answer head instead of teaching a
                // confidently wrong mapping.
                shuffle_answers(&mut forged.records, derive_seed(seed, "transform"), false)?;
            }
            ScenarioKind::PathAugShufflePaths => {
                shuffle_paths(&mut forged.records, derive_seed(seed, "transform"));
            }
            _ => {}
        }
        dataset = Some(DatasetSummary {
            records: forged.records.len(),
            shortfalls: forged.shortfalls.len(),
            failures: forged.failures.len(),
            transforms: forged
                .records
                .first()
                .map(|r| r.provenance.transforms.clone())
                .unwrap_or_default(),
        });
        let data = encode_records(&vocab, &forged.records)?;
        let curve = sft_train(&mut policy, &data, &config.sft)?;
        let post_eval =
            snapshot(&policy, &eval_clean, &eval_shifted, Some(&data), config.max_tokens)?;
        sft_phase = Some(SftPhase {
            initial_loss: curve[0],
            final_loss: *curve.last().expect("curve has steps + 1 entries"),
            loss_curve: curve,
            post_eval,
        });
        train_data = Some(data);
    }

    let prompts: Vec<RolloutPrompt<ToyPrompt>> = train
        .iter()
        .map(|sample| RolloutPrompt {
            id: sample.sample_id.clone(),
            prompt: ToyPrompt::from_sample(sample),
            truth: sample.class.label().to_string(),
        })
        .collect();
    let rl_seed = derive_seed(seed, "rl");
    let mut step_reports = Vec::with_capacity(config.rl.steps);
    let mut accuracy_curve = Vec::new();
    for step in 0..config.rl.steps {
        if step % config.eval_every == 0 {
            accuracy_curve.push(AccuracyPoint {
                step,
                accuracy: accuracy(&policy, &eval_clean, config.max_tokens),
            });
        }
        let report = rl_step(&mut policy, &prompts, &config.rl, rl_seed, step, |tokens| {
            vocab.render_tokens(tokens)
        })?;
        step_reports.push(report);
    }
    accuracy_curve.push(AccuracyPoint {
        step: config.rl.steps,
        accuracy: accuracy(&policy, &eval_clean, config.max_tokens),
    });

    let final_eval = snapshot(
        &policy,
        &eval_clean,
        &eval_shifted,
        train_data.as_deref(),
        config.max_tokens,
    )?;
    let report = ExperimentReport {
        scenario: config.kind.name().to_string(),
        seed,
        config: config.clone(),
        dataset,
        sft: sft_phase,
        rl: RlPhase {
            steps: step_reports.iter().map(StepSummary::from_report).collect(),
            ledger: effectiveness_ledger(&step_reports),
            accuracy_curve,
        },
        final_eval,
    };
    Ok(ScenarioOutcome { report, step_reports, policy })
}

/// Training-set perplexity of supervised-only runs at increasing path
/// counts per sample — the dataset-diversity dial.
///
/// Per-class counts saturate at that class's exhaustive path total, so the
/// dial widens the corpus monotonically without ever failing a request.
/// Reinforcement is skipped entirely.
pub fn path_diversity_sweep(
    counts: &[usize],
    seed: u64,
) -> Result<Vec<(usize, f64)>, ScenarioError> {
    counts
        .iter()
        .map(|&n| {
            let mut config = ScenarioConfig::for_kind(ScenarioKind::PathAug, seed);
            config.paths_per_sample = n;
            config.rl.steps = 0;
            let outcome = run_scenario(&config)?;
            let ppl = outcome
                .report
                .sft
                .expect("path_aug always fine-tunes")
                .post_eval
                .train_perplexity
                .expect("supervised runs report training perplexity");
            Ok((n, ppl))
        })
        .collect()
}

/// Serialize a report as pretty JSON with a trailing newline.
pub fn write_report_json(
    out: &mut dyn Write,
    report: &ExperimentReport,
) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    out.write_all(text.as_bytes())?;
    out.write_all(b"\n")
}

/// Write the supervised loss curve as `step,loss` CSV.
pub fn write_sft_curve_csv(out: &mut dyn Write, curve: &[f64]) -> std::io::Result<()> {
    writeln!(out, "step,loss")?;
    for (step, loss) in curve.iter().enumerate() {
        writeln!(out, "{step},{loss}")?;
    }
    Ok(())
}

/// Write the reinforcement accuracy curve as `step,accuracy` CSV.
pub fn write_accuracy_curve_csv(
    out: &mut dyn Write,
    curve: &[AccuracyPoint],
) -> std::io::Result<()> {
    writeln!(out, "step,accuracy")?;
    for point in curve {
        writeln!(out, "{},{}", point.step, point.accuracy)?;
    }
    Ok(())
}

/// Write per-step reinforcement telemetry as CSV. The cumulative ledger has
/// its own writer, [`crate::grpo::write_ledger_csv`].
pub fn write_rl_steps_csv(out: &mut dyn Write, steps: &[StepSummary]) -> std::io::Result<()> {
    writeln!(out, "step,objective,mean_reward,effective_groups,ineffective_groups")?;
    for s in steps {
        writeln!(
            out,
            "{},{},{},{},{}",
            s.step, s.objective, s.mean_reward, s.effective_groups, s.ineffective_groups
        )?;
    }
    Ok(())
}
