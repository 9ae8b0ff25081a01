//! The two label-space transforms: answer shuffling and path shuffling.
//!
//! Both permute one field of a forged dataset across records while leaving
//! the rest in place, and both serve diagnostic ends:
//!
//! * **shuffle-answers** breaks the reasoning→conclusion link. Training on
//!   answer-shuffled data can't teach a confident answer head, which keeps
//!   exploration alive for a later reinforcement phase.
//! * **shuffle-paths** breaks the input→reasoning link while keeping every
//!   answer correct. If a model trained on clean data performs identically
//!   on path-shuffled data, its answers never depended on the reasoning —
//!   the signature of a learned shortcut.
//!
//! Run with: `cargo run --example shuffle_transforms`

use pathforge::forge::{forge, shuffle_answers, shuffle_paths, ForgeConfig};
use pathforge::sampler::{Alpha, FlagScope, PathLimit, SamplerConfig};
use pathforge::toy::world::{generate_samples, taxonomy, DomainSpec};

fn main() {
    let tree = taxonomy();
    let manifest: Vec<_> = generate_samples(10, &DomainSpec::default(), 3, "demo")
        .iter()
        .map(|s| s.to_sample_record())
        .collect();
    let config = ForgeConfig {
        seed: 1,
        sampler: SamplerConfig {
            limit: PathLimit::Count(4),
            alpha: Alpha::new(7, 3).unwrap(),
            seed: 0,
            flag_scope: FlagScope::PerPath,
        },
    };
    let baseline = forge(&tree, &manifest, &config).records;
    println!("baseline: {} records", baseline.len());

    // --- answer shuffling ---------------------------------------------------
    let mut shuffled = baseline.clone();
    shuffle_answers(&mut shuffled, 99, true).expect("derangement is feasible here");
    let changed = baseline
        .iter()
        .zip(&shuffled)
        .filter(|(a, b)| a.answer != b.answer)
        .count();
    let thinks_kept = baseline.iter().zip(&shuffled).all(|(a, b)| a.think == b.think);
    println!(
        "shuffle-answers (derangement): {changed}/{} answers changed, reasoning kept: {thinks_kept}",
        baseline.len()
    );
    // The answer multiset is preserved — it is a permutation, not a resample.
    let mut before: Vec<_> = baseline.iter().map(|r| r.answer.clone()).collect();
    let mut after: Vec<_> = shuffled.iter().map(|r| r.answer.clone()).collect();
    before.sort();
    after.sort();
    assert_eq!(before, after);
    // Provenance records the applied transform.
    assert_eq!(shuffled[0].provenance.transforms, vec!["shuffle-answers".to_string()]);
    println!("  provenance transforms: {:?}", shuffled[0].provenance.transforms);

    // A derangement (every record's answer value changes) is infeasible when
    // one answer covers more than half the records; the transform reports
    // that instead of looping forever. Without the flag it still applies a
    // plain permutation.
    let mut lopsided = baseline
        .iter()
        .filter(|r| r.answer == "real")
        .cloned()
        .collect::<Vec<_>>();
    lopsided.push(baseline.iter().find(|r| r.answer != "real").unwrap().clone());
    let err = shuffle_answers(&mut lopsided, 0, true).expect_err("derangement infeasible");
    println!("infeasible derangement rejected: {err}");
    shuffle_answers(&mut lopsided, 0, false).expect("plain permutation always works");
    println!("  plain permutation still fine on the same records");

    // --- path shuffling -----------------------------------------------------
    let mut crossed = baseline.clone();
    shuffle_paths(&mut crossed, 7);
    let answers_kept = baseline.iter().zip(&crossed).all(|(a, b)| a.answer == b.answer);
    let thinks_moved = baseline
        .iter()
        .zip(&crossed)
        .filter(|(a, b)| a.think != b.think)
        .count();
    println!(
        "shuffle-paths: answers kept: {answers_kept}, {thinks_moved}/{} reasoning bodies moved",
        baseline.len()
    );
    assert_eq!(crossed[0].provenance.transforms, vec!["shuffle-paths".to_string()]);

    // Transforms are deterministic in their seed.
    let mut again = baseline.clone();
    shuffle_paths(&mut again, 7);
    assert_eq!(again, crossed);
    println!("same seed, same permutation");
}
