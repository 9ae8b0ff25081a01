//! Run one full SFT + GRPO experiment arm and write its report files.
//!
//! A scenario wires the whole stack together: generate a labeled world,
//! forge a chain-of-thought corpus, supervise-train the toy policy on it,
//! then hand the policy to reinforcement and watch what the reward can still
//! teach. Five arms exist:
//!
//! * `rl_only`          — skip the supervised phase entirely;
//! * `raw_single_path`  — supervise on one path per sample (no diversity);
//! * `path_aug`         — supervise on many distinct paths per sample;
//! * `path_aug_shuffle_paths`   — path diversity, reasoning decoupled from
//!   inputs (shortcut probe);
//! * `path_aug_shuffle_answers` — path diversity, answers decoupled from
//!   reasoning (keeps the answer head flat, preserving exploration).
//!
//! This example runs a reduced-budget arm so it finishes in a few seconds;
//! the `for_kind` defaults (used by the CLI) take on the order of a minute
//! per arm and make the cross-arm comparisons stable across seeds.
//!
//! Run with: `cargo run --release --example train_scenario`

use pathforge::svg::LineChart;
use pathforge::toy::scenario::{
    run_scenario, write_accuracy_curve_csv, write_rl_steps_csv, ScenarioConfig, ScenarioKind,
};

fn main() {
    let mut config = ScenarioConfig::for_kind(ScenarioKind::RawSinglePath, 0);
    // Shrink every budget for a quick demonstration run.
    config.train_samples = 24;
    config.eval_samples = 200;
    config.sft.steps = 300;
    config.rl.steps = 30;
    config.eval_every = 5;

    let outcome = run_scenario(&config).expect("scenario runs");
    let report = &outcome.report;

    if let Some(dataset) = &report.dataset {
        println!(
            "dataset: {} records ({} shortfalls) under transforms {:?}",
            dataset.records, dataset.shortfalls, dataset.transforms
        );
    }
    if let Some(sft) = &report.sft {
        println!(
            "supervised phase: loss {:.4} -> {:.4} over {} steps",
            sft.initial_loss,
            sft.final_loss,
            sft.loss_curve.len() - 1
        );
        println!(
            "  post-SFT accuracy: clean {:.3}, shifted {:.3}",
            sft.post_eval.accuracy_clean, sft.post_eval.accuracy_shifted
        );
    }

    let ledger = &report.rl.ledger;
    println!(
        "reinforcement phase: {} steps, final cumulative effective/ineffective groups {}/{}",
        report.rl.steps.len(),
        ledger.last().map_or(0, |p| p.cumulative_effective),
        ledger.last().map_or(0, |p| p.cumulative_ineffective),
    );

    let final_eval = &report.final_eval;
    println!("final evaluation:");
    println!(
        "  accuracy  clean {:.3}  shifted {:.3}",
        final_eval.accuracy_clean, final_eval.accuracy_shifted
    );
    println!(
        "  AUC       clean {:.3}  shifted {:.3}",
        final_eval.auc_clean, final_eval.auc_shifted
    );
    println!(
        "  EER {:.3} at threshold {:.3}; shifted HTER at that threshold {:.3}",
        final_eval.eer_clean, final_eval.eer_threshold, final_eval.hter_shifted
    );

    // The report is plain serde data; the curve writers emit CSV, and the
    // built-in chart writer renders dependency-free SVG.
    let dir = std::env::temp_dir().join("pathforge_train_scenario");
    std::fs::create_dir_all(&dir).expect("temp dir");

    let report_json = serde_json::to_string_pretty(report).expect("report serializes");
    std::fs::write(dir.join("report.json"), report_json).expect("write report");

    let mut steps_csv = Vec::new();
    write_rl_steps_csv(&mut steps_csv, &report.rl.steps).unwrap();
    std::fs::write(dir.join("rl_steps.csv"), steps_csv).unwrap();

    let mut accuracy_csv = Vec::new();
    write_accuracy_curve_csv(&mut accuracy_csv, &report.rl.accuracy_curve).unwrap();
    std::fs::write(dir.join("rl_accuracy.csv"), accuracy_csv).unwrap();

    let chart = LineChart::new("Clean accuracy during reinforcement", "step", "accuracy")
        .with_series(
            "accuracy",
            report
                .rl
                .accuracy_curve
                .iter()
                .map(|p| (p.step as f64, p.accuracy))
                .collect::<Vec<(f64, f64)>>(),
        );
    std::fs::write(dir.join("rl_accuracy.svg"), chart.to_svg()).unwrap();

    println!("\nwrote report.json, rl_steps.csv, rl_accuracy.csv, rl_accuracy.svg");
    println!("  under {}", dir.display());

    // Same config, same outcome — report files are byte-stable.
    let again = run_scenario(&config).expect("scenario runs");
    assert_eq!(again.report, outcome.report);
    println!("re-run with the same config: identical report");
}
