//! Composing sampled paths into tagged chain-of-thought text, and parsing
//! that text back.
//!
//! The rendered grammar is exactly
//!
//! ```text
//! <think>CLAUSES</think><answer>LABEL</answer>
//! ```
//!
//! with no text outside the tags, no repeated tags, and non-empty bodies.
//! The think body is the path's clauses in step order joined by single
//! spaces: a forward step contributes the entered node's `clause_positive`, a
//! reflective step the abandoned node's `clause_negative`. The answer is the
//! name of the leaf the path ends in. Rewards and format checks parse this
//! grammar with [`parse`], so composition and verification cannot drift
//! apart.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::sampler::{Direction, ReasoningPath};
use crate::taxonomy::{NodeId, ReasoningTree};

/// One composed chain-of-thought unit, still structured (render to get text).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CotRecord {
    /// Space-joined clause text, tag-free.
    pub think: String,
    /// Final answer label (the terminal leaf's name).
    pub answer: String,
    /// Stable content hash of the step sequence; survives serialization
    /// round trips and is shared by identical paths across runs.
    pub path_id: String,
    /// Id of the labeled sample this chain was composed for.
    pub source_sample: String,
}

#[derive(Debug, Error)]
pub enum ComposeError {
    #[error("cannot compose an empty path")]
    EmptyPath,
    #[error("path step {index} references unknown node \"{node}\"")]
    UnknownNode { index: usize, node: NodeId },
    #[error("path step {index} ({got}) does not follow from \"{at}\"")]
    DisconnectedStep {
        index: usize,
        at: NodeId,
        got: NodeId,
    },
    #[error("path must end with a forward step into a leaf, found \"{node}\"")]
    BadTerminal { node: NodeId },
}

/// Why a string failed the tagged-grammar check.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("text must start with <think>")]
    MissingThinkOpen,
    #[error("missing </think>")]
    MissingThinkClose,
    #[error("</think> must be followed immediately by <answer>")]
    MissingAnswerOpen,
    #[error("missing </answer>")]
    MissingAnswerClose,
    #[error("text continues after </answer>")]
    TrailingText,
    #[error("think body is empty")]
    EmptyThink,
    #[error("answer body is empty")]
    EmptyAnswer,
    #[error("tag {0} appears inside a body")]
    TagInBody(&'static str),
}

/// Stable identifier for a path: SHA-256 over the step sequence, truncated
/// to 16 hex characters.
pub fn path_id(path: &ReasoningPath) -> String {
    let mut hasher = Sha256::new();
    for step in &path.steps {
        hasher.update(match step.dir {
            Direction::Forward => b"+",
            Direction::Reflect => b"-",
        });
        hasher.update(step.node.as_str().as_bytes());
        hasher.update([0x1f]);
    }
    let digest = hasher.finalize();
    let mut out = String::with_capacity(16);
    for byte in &digest[..8] {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// Compose a path into a [`CotRecord`] for `source_sample`.
///
/// Walks the path against the tree, checking each step actually follows from
/// the previous position, and reads the answer off the terminal leaf.
pub fn compose(
    tree: &ReasoningTree,
    path: &ReasoningPath,
    source_sample: &str,
) -> Result<CotRecord, ComposeError> {
    if path.is_empty() {
        return Err(ComposeError::EmptyPath);
    }

    let mut clauses: Vec<&str> = Vec::with_capacity(path.len());
    let mut at = tree.root().clone();
    for (index, step) in path.steps.iter().enumerate() {
        let node = tree.node(&step.node).ok_or_else(|| ComposeError::UnknownNode {
            index,
            node: step.node.clone(),
        })?;
        match step.dir {
            Direction::Forward => {
                if node.parent.as_ref() != Some(&at) {
                    return Err(ComposeError::DisconnectedStep {
                        index,
                        at,
                        got: step.node.clone(),
                    });
                }
                clauses.push(&node.clause_positive);
                at = step.node.clone();
            }
            Direction::Reflect => {
                if step.node != at {
                    return Err(ComposeError::DisconnectedStep {
                        index,
                        at,
                        got: step.node.clone(),
                    });
                }
                clauses.push(&node.clause_negative);
                at = node.parent.clone().ok_or(ComposeError::BadTerminal {
                    node: step.node.clone(),
                })?;
            }
        }
    }

    let last = path.steps.last().expect("checked non-empty");
    let terminal = tree.node(&last.node).expect("checked above");
    if last.dir != Direction::Forward || !terminal.is_leaf() {
        return Err(ComposeError::BadTerminal {
            node: last.node.clone(),
        });
    }

    Ok(CotRecord {
        think: clauses.join(" "),
        answer: terminal.name.clone(),
        path_id: path_id(path),
        source_sample: source_sample.to_owned(),
    })
}

/// Literal tag opening the reasoning block.
pub const THINK_OPEN: &str = "<think>";
/// Literal tag closing the reasoning block.
pub const THINK_CLOSE: &str = "</think>";
/// Literal tag opening the answer block.
pub const ANSWER_OPEN: &str = "<answer>";
/// Literal tag closing the answer block.
pub const ANSWER_CLOSE: &str = "</answer>";
const ALL_TAGS: [&str; 4] = [THINK_OPEN, THINK_CLOSE, ANSWER_OPEN, ANSWER_CLOSE];

/// Render a record to the exact tagged wire format.
pub fn render(record: &CotRecord) -> String {
    format!(
        "{THINK_OPEN}{}{THINK_CLOSE}{ANSWER_OPEN}{}{ANSWER_CLOSE}",
        record.think, record.answer
    )
}

/// Strict parse of the tagged grammar; returns `(think, answer)`.
///
/// Rejections are total: any duplicated, reordered, nested, or missing tag,
/// any text outside the tags, and any empty body all fail with the first
/// violation found left to right.
pub fn parse(text: &str) -> Result<(String, String), GrammarError> {
    let rest = text
        .strip_prefix(THINK_OPEN)
        .ok_or(GrammarError::MissingThinkOpen)?;
    let think_end = rest.find(THINK_CLOSE).ok_or(GrammarError::MissingThinkClose)?;
    let think = &rest[..think_end];
    let rest = &rest[think_end + THINK_CLOSE.len()..];
    let rest = rest
        .strip_prefix(ANSWER_OPEN)
        .ok_or(GrammarError::MissingAnswerOpen)?;
    let answer_end = rest.find(ANSWER_CLOSE).ok_or(GrammarError::MissingAnswerClose)?;
    let answer = &rest[..answer_end];
    if !rest[answer_end + ANSWER_CLOSE.len()..].is_empty() {
        return Err(GrammarError::TrailingText);
    }
    if think.is_empty() {
        return Err(GrammarError::EmptyThink);
    }
    if answer.is_empty() {
        return Err(GrammarError::EmptyAnswer);
    }
    for body in [think, answer] {
        for tag in ALL_TAGS {
            if body.contains(tag) {
                return Err(GrammarError::TagInBody(tag));
            }
        }
    }
    Ok((think.to_owned(), answer.to_owned()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{direct_path, enumerate_paths, Alpha, Step};
    use crate::taxonomy::{fixture_tree, load_tree_str, random_tree};

    fn tiny() -> ReasoningTree {
        load_tree_str(
            r#"{
              "nodes": [
                {"children": ["a", "b"], "clause_negative": "Rn.", "clause_positive": "Rp.", "id": "r", "name": "start"},
                {"children": ["t"], "clause_negative": "An.", "clause_positive": "Ap.", "id": "a", "name": "left"},
                {"children": [], "clause_negative": "Bn.", "clause_positive": "Bp.", "id": "b", "name": "other"},
                {"children": [], "clause_negative": "Tn.", "clause_positive": "Tp.", "id": "t", "name": "goal"}
              ],
              "root": "r"
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn composes_forward_and_reflect_clauses_in_order() {
        let tree = tiny();
        // +b, -b, +a, +t : wrong branch first, reflect, then the goal.
        let path = ReasoningPath {
            steps: vec![
                Step { dir: Direction::Forward, name: "other".into(), node: "b".into() },
                Step { dir: Direction::Reflect, name: "other".into(), node: "b".into() },
                Step { dir: Direction::Forward, name: "left".into(), node: "a".into() },
                Step { dir: Direction::Forward, name: "goal".into(), node: "t".into() },
            ],
        };
        let rec = compose(&tree, &path, "s1").unwrap();
        assert_eq!(rec.think, "Bp. Bn. Ap. Tp.");
        assert_eq!(rec.answer, "goal");
        assert_eq!(rec.source_sample, "s1");
    }

    #[test]
    fn render_has_exact_shape() {
        let tree = tiny();
        let rec = compose(&tree, &direct_path(&tree, &"t".into()).unwrap(), "s").unwrap();
        assert_eq!(render(&rec), "<think>Ap. Tp.</think><answer>goal</answer>");
    }

    #[test]
    fn compose_rejects_structural_defects() {
        let tree = tiny();
        let empty = ReasoningPath { steps: vec![] };
        assert!(matches!(compose(&tree, &empty, "s"), Err(ComposeError::EmptyPath)));

        let ghost = ReasoningPath {
            steps: vec![Step { dir: Direction::Forward, name: "x".into(), node: "ghost".into() }],
        };
        assert!(matches!(
            compose(&tree, &ghost, "s"),
            Err(ComposeError::UnknownNode { index: 0, .. })
        ));

        // Forward into a node that is not a child of the current position.
        let skip = ReasoningPath {
            steps: vec![Step { dir: Direction::Forward, name: "goal".into(), node: "t".into() }],
        };
        assert!(matches!(
            compose(&tree, &skip, "s"),
            Err(ComposeError::DisconnectedStep { index: 0, .. })
        ));

        // Ends on a reflect step.
        let reflected = ReasoningPath {
            steps: vec![
                Step { dir: Direction::Forward, name: "left".into(), node: "a".into() },
                Step { dir: Direction::Reflect, name: "left".into(), node: "a".into() },
            ],
        };
        assert!(matches!(
            compose(&tree, &reflected, "s"),
            Err(ComposeError::BadTerminal { .. })
        ));

        // Ends forward but on an internal node.
        let internal = ReasoningPath {
            steps: vec![Step { dir: Direction::Forward, name: "left".into(), node: "a".into() }],
        };
        assert!(matches!(
            compose(&tree, &internal, "s"),
            Err(ComposeError::BadTerminal { .. })
        ));
    }

    #[test]
    fn path_id_is_frozen_and_content_addressed() {
        let tree = tiny();
        let direct = direct_path(&tree, &"t".into()).unwrap();
        let id = path_id(&direct);
        assert_eq!(id.len(), 16);
        // Frozen: published datasets key on these ids.
        assert_eq!(id, "ea7a0d73392b8af2");
        assert_eq!(path_id(&direct), id);

        let other = ReasoningPath {
            steps: vec![
                Step { dir: Direction::Forward, name: "other".into(), node: "b".into() },
                Step { dir: Direction::Reflect, name: "other".into(), node: "b".into() },
                Step { dir: Direction::Forward, name: "left".into(), node: "a".into() },
                Step { dir: Direction::Forward, name: "goal".into(), node: "t".into() },
            ],
        };
        assert_ne!(path_id(&other), id);
    }

    #[test]
    fn parse_render_round_trip() {
        let rec = CotRecord {
            think: "One clause. Two clauses.".into(),
            answer: "print attack".into(),
            path_id: String::new(),
            source_sample: String::new(),
        };
        let text = render(&rec);
        let (think, answer) = parse(&text).unwrap();
        assert_eq!(think, rec.think);
        assert_eq!(answer, rec.answer);
    }

    #[test]
    fn parse_rejects_malformed_strings() {
        use GrammarError::*;
        let cases: Vec<(&str, GrammarError)> = vec![
            ("", MissingThinkOpen),
            ("think hard<answer>x</answer>", MissingThinkOpen),
            ("<think>a<answer>x</answer>", MissingThinkClose),
            ("<think>a</think>", MissingAnswerOpen),
            ("<think>a</think> <answer>x</answer>", MissingAnswerOpen),
            ("<answer>x</answer><think>a</think>", MissingThinkOpen),
            ("<think>a</think><answer>x", MissingAnswerClose),
            ("<think>a</think><answer>x</answer>!", TrailingText),
            ("<think>a</think><answer>x</answer><answer>y</answer>", TrailingText),
            ("<think></think><answer>x</answer>", EmptyThink),
            ("<think>a</think><answer></answer>", EmptyAnswer),
            ("<think>a</think><answer>x<think>b</think></answer>", TagInBody("<think>")),
        ];
        for (text, expected) in cases {
            assert_eq!(parse(text).unwrap_err(), expected, "for {text:?}");
        }
        // Duplicated think block: the second <think> lands in the answer
        // position, which the grammar reports as a missing <answer>.
        assert!(parse("<think>a</think><think>b</think><answer>x</answer>").is_err());
    }

    #[test]
    fn fixture_golden_composition() {
        let tree = fixture_tree();
        let path = ReasoningPath {
            steps: vec![
                Step { dir: Direction::Forward, name: "ir analysis".into(), node: "ir".into() },
                Step { dir: Direction::Reflect, name: "ir analysis".into(), node: "ir".into() },
                Step { dir: Direction::Forward, name: "depth analysis".into(), node: "depth".into() },
                Step { dir: Direction::Forward, name: "real".into(), node: "depth.real".into() },
            ],
        };
        let rec = compose(&tree, &path, "sample-007").unwrap();
        assert_eq!(
            render(&rec),
            "<think>Turn to the infrared capture and examine emissivity and heat structure. \
             The infrared channel is inconclusive on its own, so set it aside. \
             Turn to the depth map and examine the facial surface geometry. \
             The depth map shows a rounded facial relief with a clearly protruding nose, \
             consistent with a live person.</think><answer>real</answer>"
        );
    }

    #[test]
    fn compose_is_injective_across_enumerated_paths() {
        // Distinct paths must give distinct think texts when clause texts are
        // pairwise distinct; checked over randomized tree shapes.
        for seed in 0..20 {
            let tree = random_tree(4 + (seed as usize % 8), 1000 + seed);
            let alpha = Alpha::new(3, 1).unwrap();
            let paths = match enumerate_paths(&tree, "target", alpha) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let mut seen = std::collections::BTreeMap::new();
            for p in &paths {
                let rec = compose(&tree, p, "s").unwrap();
                if let Some(prev) = seen.insert(rec.think.clone(), p.clone()) {
                    panic!("think collision between {prev:?} and {p:?}");
                }
            }
        }
    }

    #[test]
    fn every_enumerated_fixture_subpath_renders_to_valid_grammar() {
        let tree = tiny();
        let alpha = Alpha::new(3, 1).unwrap();
        for p in enumerate_paths(&tree, "goal", alpha).unwrap() {
            let rec = compose(&tree, &p, "s").unwrap();
            let (think, answer) = parse(&render(&rec)).unwrap();
            assert_eq!(think, rec.think);
            assert_eq!(answer, rec.answer);
        }
    }
}
