//! Liveness-score metrics: AUC, EER, and HTER.
//!
//! A presentation-attack detector emits one score per sample — higher means
//! more likely live. Three standard summaries:
//!
//! * **AUC**: probability a random live sample outscores a random spoof
//!   (Mann–Whitney rank form; ties count half). Threshold-free.
//! * **EER**: the operating point where false accepts and false rejects
//!   balance, searched over thresholds midway between adjacent scores.
//! * **HTER**: (FAR + FRR) / 2 at a *fixed* threshold — typically the
//!   threshold is chosen on clean data and then applied to a shifted
//!   domain, measuring how well the operating point transfers.
//!
//! Run with: `cargo run --example evaluate_scores`

use pathforge::metrics::{
    auc, eer, hter, read_score_rows, write_score_rows, MetricsError, ScoreRow, ScoredSet,
};

fn main() {
    // Scores come in (score, is_live) pairs; the set splits them by truth.
    let set = ScoredSet::from_pairs([
        (0.95, true),
        (0.90, true),
        (0.80, true),
        (0.55, true),
        (0.70, false),
        (0.40, false),
        (0.30, false),
        (0.10, false),
    ])
    .expect("finite scores");

    let auc_value = auc(&set).unwrap();
    let eer_point = eer(&set).unwrap();
    println!("{} live vs {} spoof scores", set.live.len(), set.spoof.len());
    println!("AUC {auc_value:.4}");
    println!(
        "EER {:.4} at threshold {:.4} (accept iff score >= threshold)",
        eer_point.eer, eer_point.threshold
    );

    // HTER at the EER threshold equals the EER on the same data…
    let same = hter(&set, eer_point.threshold).unwrap();
    println!("HTER at that threshold on the same data: {same:.4}");

    // …but the point of HTER is transfer: freeze the threshold, then score a
    // shifted domain where spoofs drift upward.
    let shifted = ScoredSet::from_pairs([
        (0.90, true),
        (0.75, true),
        (0.60, true),
        (0.50, true),
        (0.85, false),
        (0.65, false),
        (0.45, false),
        (0.20, false),
    ])
    .unwrap();
    println!(
        "shifted domain: AUC {:.4}, HTER at the frozen threshold {:.4}",
        auc(&shifted).unwrap(),
        hter(&shifted, eer_point.threshold).unwrap()
    );

    // AUC is invariant under any monotone rescaling of the scores.
    let squashed = ScoredSet {
        live: set.live.iter().map(|s| s.tanh()).collect(),
        spoof: set.spoof.iter().map(|s| s.tanh()).collect(),
    };
    assert_eq!(auc(&set).unwrap(), auc(&squashed).unwrap());
    println!("AUC unchanged under tanh rescaling: {:.4}", auc(&squashed).unwrap());

    // Metrics over a single class are undefined, reported as an error value
    // rather than a NaN.
    let single = ScoredSet { live: vec![0.9, 0.8], spoof: vec![] };
    match auc(&single) {
        Err(MetricsError::Undefined { missing }) => {
            println!("single-class input: undefined (no {missing} samples), rejected")
        }
        other => panic!("expected the undefined-metric error, got {other:?}"),
    }

    // Score tables travel as four-column CSV, the CLI interchange format.
    let rows: Vec<ScoreRow> = set
        .live
        .iter()
        .enumerate()
        .map(|(i, &score)| ScoreRow {
            sample_id: format!("live-{i:03}"),
            score,
            is_live: true,
            domain_tag: "clean".into(),
        })
        .chain(set.spoof.iter().enumerate().map(|(i, &score)| ScoreRow {
            sample_id: format!("spoof-{i:03}"),
            score,
            is_live: false,
            domain_tag: "clean".into(),
        }))
        .collect();
    let mut csv = Vec::new();
    write_score_rows(&mut csv, &rows).expect("rows serialize");
    let text = String::from_utf8(csv.clone()).unwrap();
    println!("\nscore table:\n{}", text.lines().take(4).collect::<Vec<_>>().join("\n"));
    let reread = read_score_rows(csv.as_slice()).expect("rows parse");
    assert_eq!(reread, rows);
    println!("… CSV round-trip preserves all {} rows", rows.len());
}
