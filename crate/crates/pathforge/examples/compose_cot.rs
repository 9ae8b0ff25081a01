//! Render sampled paths into tagged chain-of-thought text and parse it back.
//!
//! Each tree node carries two clause templates: an affirmative one, emitted
//! when a path steps forward into the node, and a reflective one, emitted
//! when the path backs out of it. Composing a path concatenates the clauses
//! along the walk; rendering wraps the result as
//! `<think>…</think><answer>…</answer>`.
//!
//! Run with: `cargo run --example compose_cot`

use pathforge::cot::{compose, parse, path_id, render};
use pathforge::sampler::{sample_paths, Alpha, FlagScope, PathLimit, SamplerConfig};
use pathforge::taxonomy::fixture_tree;

fn main() {
    let tree = fixture_tree();
    let config = SamplerConfig {
        limit: PathLimit::Count(2),
        alpha: Alpha::new(3, 1).unwrap(),
        seed: 5,
        flag_scope: FlagScope::PerPath,
    };
    let paths = sample_paths(&tree, "real", &config).expect("sampling succeeds");

    for path in &paths {
        // Composition validates the walk against the tree (each step must
        // follow from the previous position) and reads the answer off the
        // terminal leaf. The path id is a stable content hash of the step
        // sequence, so identical paths share it across runs and machines.
        let record = compose(&tree, path, "sample-0001").expect("sampled paths compose");
        println!("path {} ({} steps)", record.path_id, path.len());
        assert_eq!(record.path_id, path_id(path));

        let text = render(&record);
        println!("  {text}\n");

        // The tagged grammar parses back into (think, answer).
        let (think, answer) = parse(&text).expect("rendered text is grammatical");
        assert_eq!(think, record.think);
        assert_eq!(answer, record.answer);
    }

    // The parser enforces the grammar strictly: exactly one think block,
    // immediately followed by exactly one answer block, nothing after.
    for bad in [
        "<answer>real</answer>",
        "<think>looks fine</think>",
        "<think>looks fine</think><answer>real</answer> trailing",
        "<think>a<think>nested</think></think><answer>real</answer>",
    ] {
        let err = parse(bad).expect_err("malformed text is rejected");
        println!("rejected {bad:?}: {err}");
    }
}
