//! Liveness-score metrics: AUC, EER, and HTER.
//!
//! Scores are "higher means more live". A sample is *accepted* (classified
//! live) when its score is `>= threshold`, so the false acceptance rate FAR
//! is the fraction of spoof samples at or above the threshold and the false
//! rejection rate FRR is the fraction of live samples below it.
//!
//! - [`auc`] is the Mann–Whitney statistic: the probability a random live
//!   sample outscores a random spoof sample, ties counting one half. The
//!   implementation goes through average ranks in O(n log n); the tests pit
//!   it against a literal O(n²) pairwise count.
//! - [`eer`] sweeps every achievable operating point — thresholds at minus
//!   and plus infinity plus the midpoints of adjacent distinct scores — and
//!   returns the point minimizing |FAR - FRR|, ties resolved toward the
//!   lower threshold; the reported EER is (FAR + FRR) / 2 there.
//! - [`hter`] is (FAR + FRR) / 2 at a caller-chosen threshold, so
//!   `hter(set, eer(set).threshold) == eer(set).eer` by construction.
//!
//! All three need both classes present; a single-class set is undefined
//! rather than silently zero or one.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Scores split by ground-truth liveness.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoredSet {
    pub live: Vec<f64>,
    pub spoof: Vec<f64>,
}

impl ScoredSet {
    /// Build from `(score, is_live)` pairs, rejecting non-finite scores.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, bool)>) -> Result<Self, MetricsError> {
        let mut set = ScoredSet::default();
        for (score, is_live) in pairs {
            if !score.is_finite() {
                return Err(MetricsError::NonFiniteScore(score));
            }
            if is_live {
                set.live.push(score);
            } else {
                set.spoof.push(score);
            }
        }
        Ok(set)
    }

    fn check_two_sided(&self) -> Result<(), MetricsError> {
        for side in [&self.live, &self.spoof] {
            if let Some(bad) = side.iter().find(|s| !s.is_finite()) {
                return Err(MetricsError::NonFiniteScore(*bad));
            }
        }
        if self.live.is_empty() {
            return Err(MetricsError::Undefined { missing: "live" });
        }
        if self.spoof.is_empty() {
            return Err(MetricsError::Undefined { missing: "spoof" });
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("metric undefined: no {missing} samples in the set")]
    Undefined { missing: &'static str },
    #[error("scores must be finite, got {0}")]
    NonFiniteScore(f64),
}

/// Mann–Whitney AUC via average ranks; ties contribute one half.
pub fn auc(set: &ScoredSet) -> Result<f64, MetricsError> {
    set.check_two_sided()?;
    let m = set.live.len();
    let n = set.spoof.len();

    // Rank the pooled scores (1-based), averaging ranks across ties, then
    // AUC = (R_live - m(m+1)/2) / (m n).
    let mut pooled: Vec<(f64, bool)> = set
        .live
        .iter()
        .map(|&s| (s, true))
        .chain(set.spoof.iter().map(|&s| (s, false)))
        .collect();
    pooled.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("scores are finite"));

    let mut rank_sum_live = 0.0_f64;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        // Positions i..j (0-based) share the average rank in 1-based terms.
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        let live_in_tie = pooled[i..j].iter().filter(|p| p.1).count();
        rank_sum_live += avg_rank * live_in_tie as f64;
        i = j;
    }

    Ok((rank_sum_live - (m * (m + 1)) as f64 / 2.0) / (m as f64 * n as f64))
}

/// FAR and FRR at `threshold` (accept iff score >= threshold).
fn rates_at(set: &ScoredSet, threshold: f64) -> (f64, f64) {
    let far = set.spoof.iter().filter(|&&s| s >= threshold).count() as f64
        / set.spoof.len() as f64;
    let frr = set.live.iter().filter(|&&s| s < threshold).count() as f64
        / set.live.len() as f64;
    (far, frr)
}

/// The operating point [`eer`] settles on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EerPoint {
    pub threshold: f64,
    pub far: f64,
    pub frr: f64,
    /// (far + frr) / 2 at the selected threshold.
    pub eer: f64,
}

/// Candidate thresholds: -inf, midpoints of adjacent distinct scores, +inf.
fn candidate_thresholds(set: &ScoredSet) -> Vec<f64> {
    let mut scores: Vec<f64> = set.live.iter().chain(set.spoof.iter()).copied().collect();
    scores.sort_by(|a, b| a.partial_cmp(b).expect("scores are finite"));
    scores.dedup();
    let mut out = vec![f64::NEG_INFINITY];
    out.extend(scores.windows(2).map(|w| (w[0] + w[1]) / 2.0));
    out.push(f64::INFINITY);
    out
}

/// Equal error rate: the swept operating point minimizing |FAR - FRR|, ties
/// toward the lower threshold.
pub fn eer(set: &ScoredSet) -> Result<EerPoint, MetricsError> {
    set.check_two_sided()?;
    let mut best: Option<EerPoint> = None;
    for threshold in candidate_thresholds(set) {
        let (far, frr) = rates_at(set, threshold);
        let gap = (far - frr).abs();
        let better = match &best {
            None => true,
            // Strict inequality keeps the first (lowest) threshold on ties.
            Some(b) => gap < (b.far - b.frr).abs(),
        };
        if better {
            best = Some(EerPoint {
                threshold,
                far,
                frr,
                eer: (far + frr) / 2.0,
            });
        }
    }
    Ok(best.expect("candidate list is never empty"))
}

/// Half total error rate at a fixed threshold: (FAR + FRR) / 2.
pub fn hter(set: &ScoredSet, threshold: f64) -> Result<f64, MetricsError> {
    set.check_two_sided()?;
    let (far, frr) = rates_at(set, threshold);
    Ok((far + frr) / 2.0)
}

/// One line of the on-disk score table (`sample_id,score,is_live,domain_tag`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub sample_id: String,
    pub score: f64,
    pub is_live: bool,
    pub domain_tag: String,
}

/// Read a score table written by [`write_score_rows`] (or by hand).
pub fn read_score_rows(reader: impl Read) -> Result<Vec<ScoreRow>, csv::Error> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    rdr.deserialize().collect()
}

/// Write the score table with its header. Floats go through the shortest
/// round-trip form, so writing is byte-deterministic for identical inputs.
pub fn write_score_rows(writer: impl Write, rows: &[ScoreRow]) -> Result<(), csv::Error> {
    let mut wtr = csv::WriterBuilder::new().has_headers(true).from_writer(writer);
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}
