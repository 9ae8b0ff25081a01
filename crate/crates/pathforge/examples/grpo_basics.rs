//! Group-relative policy optimization, piece by piece.
//!
//! The optimizer needs no learned critic: each prompt gets a *group* of
//! sampled responses, rewards are normalized within the group (mean 0,
//! population std 1), and a clipped importance-ratio surrogate turns those
//! advantages into a gradient. Rewards are verifiable by construction —
//! a format check on the tag grammar plus an exact answer match.
//!
//! Run with: `cargo run --example grpo_basics`

use pathforge::grpo::{
    classification_reward, format_reward, group_advantages, grpo_objective, rl_step,
    GrpoConfig, Policy, RolloutPrompt,
};
use pathforge::taxonomy::fixture_tree;
use pathforge::toy::policy::{TokenVocab, ToyPolicy, ToyPrompt};

fn main() {
    // --- rewards ------------------------------------------------------------
    // format_reward: 1.0 iff the text matches
    // <think>…</think><answer>…</answer> exactly; classification_reward:
    // 1.0 iff it parses and the answer equals the ground truth.
    println!("rewards (format, classification vs \"real\"):");
    for text in [
        "<think>depth looks natural</think><answer>real</answer>",
        "<think>flat depth profile</think><answer>print attack</answer>",
        "<answer>real</answer>",
        "<think>no verdict</think>",
    ] {
        println!(
            "  ({:.0}, {:.0})  {text}",
            format_reward(text),
            classification_reward(text, "real")
        );
    }

    // --- group-relative advantages -----------------------------------------
    // Within a group, Â_i = (r_i - mean) / popstd. A group whose rewards all
    // tie is *ineffective*: zero advantages, zero gradient, no learning
    // signal. Counting such groups is the lab's main diagnostic.
    let mixed = group_advantages(&[1.0, 1.0, 0.0, 0.0], 1e-6).unwrap();
    println!("\nrewards [1,1,0,0] -> advantages {:?}", mixed.advantages);
    println!("  effective: {}", mixed.effective);
    let tied = group_advantages(&[1.0, 1.0, 1.0, 1.0], 1e-6).unwrap();
    println!("rewards [1,1,1,1] -> advantages {:?}", tied.advantages);
    println!("  effective: {} (nothing to compare against)", tied.effective);

    // --- one reinforcement step on the toy policy ---------------------------
    let vocab = TokenVocab::from_tree(&fixture_tree()).unwrap();
    let mut policy = ToyPolicy::format_prior(vocab.clone(), 1.0);

    // Prompts carry the modality codes and the ground-truth label the
    // classification reward grades against.
    let prompts: Vec<RolloutPrompt<ToyPrompt>> = vec![
        RolloutPrompt {
            id: "live-demo".into(),
            prompt: ToyPrompt { rgb: 0, depth: 0, ir: 0 },
            truth: "real".into(),
        },
        RolloutPrompt {
            id: "print-demo".into(),
            prompt: ToyPrompt { rgb: 1, depth: 1, ir: 1 },
            truth: "print attack".into(),
        },
    ];
    let config = GrpoConfig { group_size: 8, learning_rate: 5.0, ..GrpoConfig::default() };

    let groups_probe = {
        // Build one step's groups by running rl_step on a clone (the report
        // alone is enough here; the objective check uses a fresh policy).
        let mut probe = policy.clone();
        rl_step(&mut probe, &prompts, &config, 0, 0, |t| vocab.render_tokens(t)).unwrap()
    };
    println!(
        "\nstep 0 report: mean reward {:.3}, {} effective / {} ineffective groups",
        groups_probe.mean_reward(),
        groups_probe.effective_groups(),
        groups_probe.ineffective_groups(),
    );
    for group in &groups_probe.groups {
        println!(
            "  group {:<12} mean reward {:.3}  effective {}",
            group.group_id, group.reward_mean, group.effective
        );
    }

    // Drive the policy for a handful of steps and watch the reward climb.
    let mut rewards = Vec::new();
    for step in 0..30 {
        let report = rl_step(&mut policy, &prompts, &config, 0, step, |t| {
            vocab.render_tokens(t)
        })
        .unwrap();
        rewards.push(report.mean_reward());
    }
    println!(
        "\nmean reward over 30 steps: {:.3} -> {:.3}",
        rewards[0],
        rewards.last().unwrap()
    );
    assert!(rewards.last().unwrap() > &rewards[0]);

    // The objective/gradient pair is exact and exposed directly; at equal
    // new/old parameters every importance ratio is 1 and the value is 0 by
    // construction — a handy self-check for any Policy implementation.
    let current = policy.params().to_vec();
    let group = pathforge::grpo::RolloutGroup {
        id: "probe".into(),
        prompt: ToyPrompt { rgb: 0, depth: 0, ir: 0 },
        truth: "real".into(),
        responses: vec![vec![0, 1], vec![0, 2]],
        rewards: vec![1.0, 0.0],
        advantages: group_advantages(&[1.0, 0.0], 1e-6).unwrap(),
    };
    let (value, gradient) = grpo_objective(&policy, &current, &current, &[group], 0.2).unwrap();
    println!(
        "objective at theta == theta_old: {value:e} (exactly zero); gradient has {} entries",
        gradient.len()
    );
}
