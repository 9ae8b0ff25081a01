#![allow(unused_must_use)]
use pathforge::toy::scenario::{
    path_diversity_sweep, run_scenario, ScenarioConfig, ScenarioKind,
};

fn effective_total(report: &pathforge::toy::scenario::ExperimentReport) -> usize {
    report.rl.ledger.last().map_or(0, |p| p.cumulative_effective)
}

fn ineffective_total(report: &pathforge::toy::scenario::ExperimentReport) -> usize {
    report.rl.ledger.last().map_or(0, |p| p.cumulative_ineffective)
}

fn main() {
    use rayon::prelude::*;
    let lines: Vec<String> = (0..5u64).into_par_iter().map(run_seed).collect();
    for line in lines {
        print!("{line}");
    }
}

fn run_seed(seed: u64) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    {
        let t0 = std::time::Instant::now();
        let raw = run_scenario(&ScenarioConfig::for_kind(ScenarioKind::RawSinglePath, seed))
            .unwrap()
            .report;
        let rl = run_scenario(&ScenarioConfig::for_kind(ScenarioKind::RlOnly, seed))
            .unwrap()
            .report;
        let aug = run_scenario(&ScenarioConfig::for_kind(ScenarioKind::PathAug, seed))
            .unwrap()
            .report;
        let sha = run_scenario(&ScenarioConfig::for_kind(
            ScenarioKind::PathAugShuffleAnswers,
            seed,
        ))
        .unwrap()
        .report;
        let shp = run_scenario(&ScenarioConfig::for_kind(
            ScenarioKind::PathAugShufflePaths,
            seed,
        ))
        .unwrap()
        .report;
        let sweep = path_diversity_sweep(&[1, 10, 50, 200], seed).unwrap();

        writeln!(out, "== seed {seed}  ({:?})", t0.elapsed());
        writeln!(out, 
            "  fig2: eff rl_only={} raw={}   acc rl_only {:.3}->{:.3}  raw post-sft {:.3} final {:.3}",
            effective_total(&rl),
            effective_total(&raw),
            rl.rl.accuracy_curve.first().unwrap().accuracy,
            rl.final_eval.accuracy_clean,
            raw.sft.as_ref().unwrap().post_eval.accuracy_clean,
            raw.final_eval.accuracy_clean,
        );
        writeln!(out, 
            "  shortcut: acc aug={:.3} shuffle_paths={:.3} |diff|={:.4}",
            aug.sft.as_ref().unwrap().post_eval.accuracy_clean,
            shp.sft.as_ref().unwrap().post_eval.accuracy_clean,
            (aug.sft.as_ref().unwrap().post_eval.accuracy_clean
                - shp.sft.as_ref().unwrap().post_eval.accuracy_clean)
                .abs()
        );
        writeln!(out, 
            "  answer-shuffle: eff sha={} aug={}   acc sha post-sft {:.3} final {:.3}; aug final {:.3}",
            effective_total(&sha),
            effective_total(&aug),
            sha.sft.as_ref().unwrap().post_eval.accuracy_clean,
            sha.final_eval.accuracy_clean,
            aug.final_eval.accuracy_clean,
        );
        writeln!(out, 
            "  c9 exact: ineff raw={} rl_only={} (want raw >= rl_only)",
            ineffective_total(&raw),
            ineffective_total(&rl),
        );
        writeln!(out, 
            "  c10 exact: final acc aug={:.3} shp={:.3} |diff|={:.4}",
            aug.final_eval.accuracy_clean,
            shp.final_eval.accuracy_clean,
            (aug.final_eval.accuracy_clean - shp.final_eval.accuracy_clean).abs()
        );
        writeln!(out, 
            "  c11 exact: acc_shifted sha={:.3} aug={:.3} (want sha > aug); clean sha={:.3} aug={:.3}",
            sha.final_eval.accuracy_shifted,
            aug.final_eval.accuracy_shifted,
            sha.final_eval.accuracy_clean,
            aug.final_eval.accuracy_clean,
        );
        writeln!(out, "  ppl sweep: {sweep:?}");
        writeln!(out, 
            "  aug post-sft ppl={:?} auc_clean={:.3} eer={:.3} hter_shift={:.3}",
            aug.sft.as_ref().unwrap().post_eval.train_perplexity,
            aug.final_eval.auc_clean,
            aug.final_eval.eer_clean,
            aug.final_eval.hter_shifted,
        ).unwrap();
    }
    out
}
