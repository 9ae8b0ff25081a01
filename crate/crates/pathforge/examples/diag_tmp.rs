use pathforge::toy::eval::LIVE_LABEL;
use pathforge::toy::policy::{ToyPrompt, ANSWER_START};
use pathforge::toy::scenario::{run_scenario, ScenarioConfig, ScenarioKind};
use pathforge::toy::world::{generate_samples, DomainSpec, PresentationClass};
use pathforge::seeding::derive_seed;

fn answer_dist(policy: &pathforge::toy::policy::ToyPolicy, prompt: &ToyPrompt) -> Vec<(String, f64)> {
    let probs = policy.next_token_probs(prompt, Some(ANSWER_START));
    policy
        .vocab()
        .answer_tokens()
        .map(|t| {
            (
                policy.vocab().answer_label(t).unwrap().to_string(),
                probs[t],
            )
        })
        .collect()
}

fn show(policy: &pathforge::toy::policy::ToyPolicy, name: &str, prompt: (u32, u32, u32)) {
    let p = ToyPrompt { rgb: prompt.0, depth: prompt.1, ir: prompt.2 };
    let dist = answer_dist(policy, &p);
    let best = dist
        .iter()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    let live = dist.iter().find(|(l, _)| l == LIVE_LABEL).unwrap().1;
    print!("    {name} rgb={} d={} ir={}: best {} {:.3}, p(real) {:.3} |", prompt.0, prompt.1, prompt.2, best.0, best.1, live);
    for (l, pr) in &dist {
        print!(" {}={:.2}", &l[..2.min(l.len())], pr);
    }
    println!();
}

fn per_class_shifted(policy: &pathforge::toy::policy::ToyPolicy, seed: u64) {
    let shifted = generate_samples(
        500,
        &DomainSpec::shifted(),
        derive_seed(seed, "world:shifted"),
        "shifted",
    );
    for class in PresentationClass::ALL {
        let of_class: Vec<_> = shifted.iter().filter(|s| s.class == class).cloned().collect();
        let acc = pathforge::toy::eval::accuracy(policy, &of_class, 64);
        print!("  {:?}={:.2}", class, acc);
    }
    println!();
}

fn main() {
    for seed in [0u64, 3, 4] {
        println!("== seed {seed}");
        let aug = run_scenario(&ScenarioConfig::for_kind(ScenarioKind::PathAug, seed)).unwrap();
        let sha = run_scenario(&ScenarioConfig::for_kind(
            ScenarioKind::PathAugShuffleAnswers,
            seed,
        ))
        .unwrap();
        println!("  aug shifted per-class:");
        per_class_shifted(&aug.policy, seed);
        println!("  sha shifted per-class:");
        per_class_shifted(&sha.policy, seed);
        for (name, policy) in [("aug", &aug.policy), ("sha", &sha.policy)] {
            println!("  {name} conditionals:");
            // Clean rows.
            show(policy, "real-row ", (0, 0, 0));
            show(policy, "paper-row", (4, 0, 1));
            show(policy, "mask-row ", (3, 2, 0));
            // Contested: paper-mask with corrupted rgb (depth0 + ir1 mixture rows).
            show(policy, "pm-rgbX  ", (2, 0, 1));
            // Contested: mask with corrupted rgb (ir0 mixture row active).
            show(policy, "mask-rgbX", (1, 2, 0));
            // Shifted replay: ir rotated 2->0, rgb intact.
            show(policy, "rep-shift", (2, 1, 0));
            // Shifted replay w/ corrupt rgb: pure mixture battle.
            show(policy, "rep-shX  ", (0, 1, 0));
        }
    }
}
