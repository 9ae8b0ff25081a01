//! TEMP diagnostic: error composition of aug vs shuffle-answers on the
//! shifted domain. Delete before release.

use pathforge::seeding::derive_seed;
use pathforge::toy::eval::{classify, liveness_score};
use pathforge::toy::policy::{ToyPolicy, ToyPrompt};
use pathforge::toy::scenario::{run_scenario, ScenarioConfig, ScenarioKind};
use pathforge::toy::world::{generate_samples, SyntheticSample};

struct Comp {
    exact: f64,
    binary: f64,
    spoof_to_live: f64,
    live_to_spoof: f64,
    mean_p_live_on_spoof: f64,
    mean_p_live_on_live: f64,
}

fn decompose(policy: &ToyPolicy, samples: &[SyntheticSample], max_tokens: usize) -> Comp {
    let mut exact = 0usize;
    let mut binary = 0usize;
    let (mut s2l, mut l2s) = (0usize, 0usize);
    let (mut n_spoof, mut n_live) = (0usize, 0usize);
    let (mut p_spoof, mut p_live) = (0.0f64, 0.0f64);
    for sample in samples {
        let prompt = ToyPrompt::from_sample(sample);
        let answer = classify(policy, &prompt, max_tokens);
        let said_live = answer.as_deref() == Some("real");
        let is_live = sample.class.is_live();
        if answer.as_deref() == Some(sample.class.label()) {
            exact += 1;
        }
        if said_live == is_live {
            binary += 1;
        }
        let p = liveness_score(policy, &prompt);
        if is_live {
            n_live += 1;
            p_live += p;
            if !said_live {
                l2s += 1;
            }
        } else {
            n_spoof += 1;
            p_spoof += p;
            if said_live {
                s2l += 1;
            }
        }
    }
    let n = samples.len() as f64;
    Comp {
        exact: exact as f64 / n,
        binary: binary as f64 / n,
        spoof_to_live: s2l as f64 / n_spoof.max(1) as f64,
        live_to_spoof: l2s as f64 / n_live.max(1) as f64,
        mean_p_live_on_spoof: p_spoof / n_spoof.max(1) as f64,
        mean_p_live_on_live: p_live / n_live.max(1) as f64,
    }
}

fn main() {
    for seed in 0..5u64 {
        let start = std::time::Instant::now();
        let mut lines = String::new();
        for kind in [ScenarioKind::PathAug, ScenarioKind::PathAugShuffleAnswers] {
            let config = ScenarioConfig::for_kind(kind, seed);
            let outcome = run_scenario(&config).expect("scenario runs");
            let eval_shifted = generate_samples(
                config.eval_samples,
                &config.shifted_domain,
                derive_seed(seed, "world:shifted"),
                "shift",
            );
            let eval_clean = generate_samples(
                config.eval_samples,
                &config.train_domain,
                derive_seed(seed, "world:eval"),
                "eval",
            );
            let shifted = decompose(&outcome.policy, &eval_shifted, config.max_tokens);
            let clean = decompose(&outcome.policy, &eval_clean, config.max_tokens);
            lines.push_str(&format!(
                "  {:<24} clean exact={:.3} bin={:.3} | shift exact={:.3} bin={:.3} s2l={:.3} l2s={:.3} pL(spoof)={:.3} pL(live)={:.3} hter={:.3}\n",
                config.kind.name(),
                clean.exact,
                clean.binary,
                shifted.exact,
                shifted.binary,
                shifted.spoof_to_live,
                shifted.live_to_spoof,
                shifted.mean_p_live_on_spoof,
                shifted.mean_p_live_on_live,
                outcome.report.final_eval.hter_shifted,
            ));
        }
        println!("== seed {seed}  ({:?})\n{lines}", start.elapsed());
    }
}
