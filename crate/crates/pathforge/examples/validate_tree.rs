//! Load, validate, and canonicalize a reasoning tree.
//!
//! A reasoning tree is a JSON taxonomy whose internal nodes are inspection
//! steps (each carrying an affirmative clause and a reflective clause) and
//! whose leaves are final answers. Loading performs full structural
//! validation — one root, acyclic parent links, unique ids, non-empty
//! clauses — so a loaded tree is always safe to sample from.
//!
//! Run with: `cargo run --example validate_tree`

use pathforge::taxonomy::{
    fixture_tree, leaves_with_name, load_tree_str, max_depth, save_tree,
};
use pathforge::toy::world::TOY_TREE_JSON;

fn main() {
    // The crate bundles two trees: a small hand fixture and the richer
    // taxonomy the training lab uses. Both pass validation on load.
    let fixture = fixture_tree();
    let lab = load_tree_str(TOY_TREE_JSON).expect("bundled tree is valid");

    for (name, tree) in [("fixture", &fixture), ("lab", &lab)] {
        println!(
            "{name}: {} nodes, depth {} (longest root-to-leaf node count)",
            tree.len(),
            max_depth(tree)
        );
        let real_leaves = leaves_with_name(tree, "real");
        println!(
            "  leaves answering \"real\": {:?}",
            real_leaves.iter().map(|id| id.as_str()).collect::<Vec<_>>()
        );
    }

    // Canonical serialization: stable key order and indentation, so the same
    // tree always produces byte-identical text (handy for golden files).
    let canonical = save_tree(&fixture);
    let reloaded = load_tree_str(&canonical).expect("canonical text reloads");
    assert_eq!(save_tree(&reloaded), canonical);
    println!("\ncanonical round-trip: stable ({} bytes)", canonical.len());

    // Validation failures carry precise diagnostics. Here the root lists a
    // child that is not among the nodes.
    let broken = r#"{
        "root": "a",
        "nodes": [
            {"id": "a", "name": "start",
             "clause_positive": "Begin.", "clause_negative": "Step back.",
             "children": ["ghost"]}
        ]
    }"#;
    match load_tree_str(broken) {
        Ok(_) => unreachable!("broken tree must not validate"),
        Err(err) => println!("rejected broken tree: {err}"),
    }
}
