//! Dataset forging: fan labeled samples out into path-augmented records.
//!
//! The forge takes a manifest of labeled samples, draws a configurable number
//! of signed reasoning paths per sample from the taxonomy, composes each into
//! a tagged transcript, and emits one training record per (sample, path)
//! pair. Two corruption transforms support ablation studies: answer shuffling
//! breaks the think→answer link while leaving reasoning in place, and path
//! shuffling moves entire reasoning traces between samples.
//!
//! Everything is deterministic: each sample derives a private sampling seed
//! from the base seed and its id, records are sorted by `(sample_id,
//! path_id)`, and the JSONL encoding is canonical (fixed key order, one
//! record per line), so a forge run is reproducible byte for byte regardless
//! of worker-thread count.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cot::compose;
use crate::sampler::{sample_paths, PathLimit, ReasoningPath, SamplerConfig};
use crate::seeding::{derive_seed, rng_for, seeded_permutation};
use crate::taxonomy::ReasoningTree;

/// One labeled input sample from a dataset manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    /// Ground-truth leaf name in the taxonomy (e.g. `"real"`).
    pub label: String,
    /// Per-modality observation codes carried through to training records.
    pub modalities: BTreeMap<String, u32>,
    /// Instruction text shown to the model.
    pub prompt: String,
    pub sample_id: String,
}

/// How a training record came to be, sufficient to regenerate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// The signed reasoning path the transcript was composed from.
    pub path: ReasoningPath,
    /// Content hash of `path`.
    pub path_id: String,
    /// The per-sample seed the path was drawn under.
    pub seed: u64,
    /// Names of corruption transforms applied after forging, in order.
    pub transforms: Vec<String>,
}

/// One line of forged training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingRecord {
    pub answer: String,
    pub modalities: BTreeMap<String, u32>,
    pub prompt: String,
    pub provenance: Provenance,
    pub sample_id: String,
    pub think: String,
}

/// Settings for a forge run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForgeConfig {
    /// Base seed. Each sample samples paths under
    /// `derive_seed(seed, sample_id)`, so neither manifest order nor other
    /// samples' presence perturbs its draw.
    pub seed: u64,
    /// Path-sampling settings. The embedded `seed` field is superseded by
    /// the per-sample derived seed.
    pub sampler: SamplerConfig,
}

impl Default for ForgeConfig {
    fn default() -> Self {
        Self { seed: 0, sampler: SamplerConfig::default() }
    }
}

/// A sample that yielded fewer paths than requested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shortfall {
    pub sample_id: String,
    pub requested: usize,
    pub produced: usize,
}

/// A sample that could not be forged at all.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForgeFailure {
    pub sample_id: String,
    pub reason: String,
}

/// Everything a forge run produced, successes and casualties alike.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForgeReport {
    /// Records sorted by `(sample_id, path_id)`.
    pub records: Vec<TrainingRecord>,
    pub shortfalls: Vec<Shortfall>,
    pub failures: Vec<ForgeFailure>,
}

#[derive(Debug, Error)]
pub enum ForgeError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(
        "no answer derangement exists: one answer appears {max_multiplicity} \
         times among {total} records"
    )]
    InfeasibleDerangement { max_multiplicity: usize, total: usize },
}

/// Forge training records for every sample in the manifest.
///
/// Samples are processed independently (in parallel when the thread pool
/// allows) and never fail each other: a sample whose label has no leaf, or
/// whose tree/ratio combination is degenerate, lands in `failures` while the
/// rest proceed. A sample for which fewer than the requested number of valid
/// paths exist contributes what it has and is listed in `shortfalls`.
pub fn forge(
    tree: &ReasoningTree,
    samples: &[SampleRecord],
    config: &ForgeConfig,
) -> ForgeReport {
    struct PerSample {
        records: Vec<TrainingRecord>,
        shortfall: Option<Shortfall>,
        failure: Option<ForgeFailure>,
    }

    let outcomes: Vec<PerSample> = samples
        .par_iter()
        .map(|sample| {
            let sample_seed = derive_seed(config.seed, &sample.sample_id);
            let sampler_config = SamplerConfig {
                seed: sample_seed,
                ..config.sampler.clone()
            };
            let paths = match sample_paths(tree, &sample.label, &sampler_config) {
                Ok(paths) => paths,
                Err(err) => {
                    return PerSample {
                        records: Vec::new(),
                        shortfall: None,
                        failure: Some(ForgeFailure {
                            sample_id: sample.sample_id.clone(),
                            reason: err.to_string(),
                        }),
                    }
                }
            };
            let shortfall = match sampler_config.limit {
                PathLimit::Count(requested) if paths.len() < requested => Some(Shortfall {
                    sample_id: sample.sample_id.clone(),
                    requested,
                    produced: paths.len(),
                }),
                _ => None,
            };
            let mut records = Vec::with_capacity(paths.len());
            let mut failure = None;
            for path in paths {
                // Sampled paths are valid by construction; a composition
                // failure here would mean the sampler and composer disagree,
                // which is worth surfacing rather than masking.
                match compose(tree, &path, &sample.sample_id) {
                    Ok(cot) => records.push(TrainingRecord {
                        answer: cot.answer,
                        modalities: sample.modalities.clone(),
                        prompt: sample.prompt.clone(),
                        provenance: Provenance {
                            path,
                            path_id: cot.path_id,
                            seed: sample_seed,
                            transforms: Vec::new(),
                        },
                        sample_id: sample.sample_id.clone(),
                        think: cot.think,
                    }),
                    Err(err) => {
                        failure = Some(ForgeFailure {
                            sample_id: sample.sample_id.clone(),
                            reason: format!("composition rejected a sampled path: {err}"),
                        });
                        break;
                    }
                }
            }
            if failure.is_some() {
                records.clear();
            }
            PerSample { records, shortfall, failure }
        })
        .collect();

    let mut report = ForgeReport {
        records: Vec::new(),
        shortfalls: Vec::new(),
        failures: Vec::new(),
    };
    for outcome in outcomes {
        report.records.extend(outcome.records);
        report.shortfalls.extend(outcome.shortfall);
        report.failures.extend(outcome.failure);
    }
    report
        .records
        .sort_by(|a, b| (a.sample_id.as_str(), a.provenance.path_id.as_str())
            .cmp(&(b.sample_id.as_str(), b.provenance.path_id.as_str())));
    report.shortfalls.sort_by(|a, b| a.sample_id.cmp(&b.sample_id));
    report.failures.sort_by(|a, b| a.sample_id.cmp(&b.sample_id));
    report
}

const SHUFFLE_ANSWERS_TAG: &str = "shuffle-answers";
const SHUFFLE_PATHS_TAG: &str = "shuffle-paths";
const DERANGEMENT_ATTEMPTS: usize = 200;

/// Permute the `answer` field across records, leaving each record's
/// reasoning in place — the classic "right reasoning, wrong conclusion"
/// corruption.
///
/// With `require_derangement`, every record is guaranteed an answer *value*
/// different from its original (rejected up front as infeasible when one
/// answer accounts for more than half the records). Records keep their order;
/// every record's transform list gains a `"shuffle-answers"` entry.
pub fn shuffle_answers(
    records: &mut [TrainingRecord],
    seed: u64,
    require_derangement: bool,
) -> Result<(), ForgeError> {
    let n = records.len();
    let old: Vec<String> = records.iter().map(|r| r.answer.clone()).collect();
    let mut rng = rng_for(seed, SHUFFLE_ANSWERS_TAG);

    let perm = if !require_derangement {
        seeded_permutation(n, &mut rng)
    } else {
        let max_multiplicity = value_multiplicities(&old).into_values().max().unwrap_or(0);
        if 2 * max_multiplicity > n {
            return Err(ForgeError::InfeasibleDerangement { max_multiplicity, total: n });
        }
        let mut found = None;
        for _ in 0..DERANGEMENT_ATTEMPTS {
            let candidate = seeded_permutation(n, &mut rng);
            if candidate.iter().enumerate().all(|(i, &j)| old[i] != old[j]) {
                found = Some(candidate);
                break;
            }
        }
        // Rejection sampling essentially always succeeds when answers are
        // diverse; the rotation covers adversarial multisets near the
        // feasibility boundary.
        found.unwrap_or_else(|| rotation_derangement(&old))
    };

    for (i, record) in records.iter_mut().enumerate() {
        record.answer = old[perm[i]].clone();
        record.provenance.transforms.push(SHUFFLE_ANSWERS_TAG.to_string());
    }
    Ok(())
}

fn value_multiplicities(values: &[String]) -> BTreeMap<&str, usize> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for value in values {
        *counts.entry(value.as_str()).or_default() += 1;
    }
    counts
}

/// Deterministic fallback derangement over a multiset of values.
///
/// Indices are grouped by value (groups contiguous, in sorted-value order)
/// and the grouped sequence is rotated by the largest group size `k`. Any
/// index sits in a contiguous arc of at most `k` same-valued positions, and
/// since `2k ≤ n` the rotation distance `k` lands strictly outside that arc
/// in either direction, so no index receives its own value.
fn rotation_derangement(old: &[String]) -> Vec<usize> {
    let n = old.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| old[a].cmp(&old[b]).then(a.cmp(&b)));
    let k = value_multiplicities(old).into_values().max().unwrap_or(0);
    debug_assert!(2 * k <= n);
    let mut perm = vec![0usize; n];
    for j in 0..n {
        perm[order[j]] = order[(j + k) % n];
    }
    perm
}

/// Permute entire reasoning traces — `think` text together with the path and
/// path id that produced it — across records, leaving every record's prompt,
/// modalities, and answer in place. The complementary corruption to answer
/// shuffling: conclusions stay right while the reasoning under them comes
/// from someone else's sample.
pub fn shuffle_paths(records: &mut [TrainingRecord], seed: u64) {
    let n = records.len();
    let mut rng = rng_for(seed, SHUFFLE_PATHS_TAG);
    let perm = seeded_permutation(n, &mut rng);
    let old: Vec<(String, ReasoningPath, String)> = records
        .iter()
        .map(|r| (r.think.clone(), r.provenance.path.clone(), r.provenance.path_id.clone()))
        .collect();
    for (i, record) in records.iter_mut().enumerate() {
        let (think, path, pid) = old[perm[i]].clone();
        record.think = think;
        record.provenance.path = path;
        record.provenance.path_id = pid;
        record.provenance.transforms.push(SHUFFLE_PATHS_TAG.to_string());
    }
}

/// Write records as canonical JSONL: one compact JSON object per line, keys
/// in fixed order, terminating newline on every line.
pub fn write_training_jsonl(
    out: &mut dyn Write,
    records: &[TrainingRecord],
) -> Result<(), ForgeError> {
    for record in records {
        let line = serde_json::to_string(record)
            .map_err(|e| ForgeError::Syntax { line: 0, message: e.to_string() })?;
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Read records written by [`write_training_jsonl`].
pub fn read_training_jsonl(input: &mut dyn BufRead) -> Result<Vec<TrainingRecord>, ForgeError> {
    read_jsonl(input)
}

/// Write a sample manifest as canonical JSONL.
pub fn write_samples_jsonl(
    out: &mut dyn Write,
    samples: &[SampleRecord],
) -> Result<(), ForgeError> {
    for sample in samples {
        let line = serde_json::to_string(sample)
            .map_err(|e| ForgeError::Syntax { line: 0, message: e.to_string() })?;
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Read a sample manifest: one JSON object per line.
pub fn read_samples_jsonl(input: &mut dyn BufRead) -> Result<Vec<SampleRecord>, ForgeError> {
    read_jsonl(input)
}

fn read_jsonl<T: serde::de::DeserializeOwned>(
    input: &mut dyn BufRead,
) -> Result<Vec<T>, ForgeError> {
    let mut out = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| ForgeError::Syntax {
            line: idx + 1,
            message: e.to_string(),
        })?;
        out.push(value);
    }
    Ok(out)
}
