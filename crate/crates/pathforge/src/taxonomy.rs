//! The reasoning tree: a hand-written taxonomy of how a liveness decision is
//! reached.
//!
//! Internal nodes are analysis stages ("turn to the depth map"), leaves are
//! final answers ("real", "print attack"). Every node carries two clause
//! templates: `clause_positive` is emitted when a reasoning path steps forward
//! *into* the node, `clause_negative` when a path reflects *out* of it. Leaf
//! names are the classification label space, and the same label may appear on
//! several leaves (one per modality branch), so lookups go by name.
//!
//! Trees are interchanged as UTF-8 JSON:
//!
//! ```json
//! {
//!   "nodes": [
//!     {"children": [], "clause_negative": "…", "clause_positive": "…",
//!      "id": "rgb.real", "name": "real"},
//!     …
//!   ],
//!   "root": "root"
//! }
//! ```
//!
//! Parent links are derived, never stored. [`save_tree`] writes the canonical
//! form — nodes sorted by id, object keys sorted, two-space indent, trailing
//! newline — and `load_tree ∘ save_tree` is byte-exact on canonical input.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Unique node identifier within one tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub String);

impl NodeId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

/// One node of the reasoning tree, with its derived parent link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub id: NodeId,
    /// Display name; for leaves this is the classification label.
    pub name: String,
    /// Clause emitted when a path steps forward into this node.
    pub clause_positive: String,
    /// Clause emitted when a path reflects back out of this node.
    pub clause_negative: String,
    /// Child ids in authored order (kept stable through load/save).
    pub children: Vec<NodeId>,
    /// Derived at load time; `None` exactly for the root.
    pub parent: Option<NodeId>,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// A validated reasoning tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReasoningTree {
    root: NodeId,
    nodes: BTreeMap<NodeId, TreeNode>,
    depth: usize,
}

/// What can go wrong loading or validating a tree file. Each structural
/// defect names the offending node so the message is actionable on its own.
#[derive(Debug, Error)]
pub enum TreeError {
    #[error("failed to read tree data: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed tree JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("duplicate node id \"{0}\"")]
    DuplicateId(NodeId),
    #[error("node \"{parent}\" lists unknown child \"{child}\"")]
    UnknownChild { parent: NodeId, child: NodeId },
    #[error("node \"{0}\" is listed as a child more than once")]
    MultipleParents(NodeId),
    #[error("declared root \"{0}\" is not among the nodes")]
    RootNotFound(NodeId),
    #[error("declared root \"{root}\" is listed as a child of \"{parent}\"")]
    RootHasParent { root: NodeId, parent: NodeId },
    #[error("multiple roots: node \"{0}\" has no parent but is not the declared root")]
    ExtraRoot(NodeId),
    #[error("cycle detected through node \"{0}\"")]
    Cycle(NodeId),
    #[error("node \"{node}\" has an empty {field}")]
    EmptyClause { node: NodeId, field: &'static str },
}

/// On-disk node shape. Field order is the canonical (sorted) key order.
#[derive(Serialize, Deserialize)]
struct NodeFile {
    children: Vec<NodeId>,
    clause_negative: String,
    clause_positive: String,
    id: NodeId,
    name: String,
}

/// On-disk tree shape. Field order is the canonical (sorted) key order.
#[derive(Serialize, Deserialize)]
struct TreeFile {
    nodes: Vec<NodeFile>,
    root: NodeId,
}

/// Parse and validate a tree from a reader.
pub fn load_tree(mut reader: impl Read) -> Result<ReasoningTree, TreeError> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    load_tree_str(&text)
}

/// Parse and validate a tree from a JSON string.
pub fn load_tree_str(text: &str) -> Result<ReasoningTree, TreeError> {
    let file: TreeFile = serde_json::from_str(text)?;
    build_tree(file)
}

/// Parse and validate a tree from a file path.
pub fn load_tree_path(path: impl AsRef<Path>) -> Result<ReasoningTree, TreeError> {
    let text = std::fs::read_to_string(path)?;
    load_tree_str(&text)
}

fn build_tree(file: TreeFile) -> Result<ReasoningTree, TreeError> {
    // Index nodes, rejecting duplicate ids.
    let mut nodes: BTreeMap<NodeId, TreeNode> = BTreeMap::new();
    for n in file.nodes {
        if nodes.contains_key(&n.id) {
            return Err(TreeError::DuplicateId(n.id));
        }
        nodes.insert(
            n.id.clone(),
            TreeNode {
                id: n.id,
                name: n.name,
                clause_positive: n.clause_positive,
                clause_negative: n.clause_negative,
                children: n.children,
                parent: None,
            },
        );
    }

    if !nodes.contains_key(&file.root) {
        return Err(TreeError::RootNotFound(file.root));
    }

    // Derive parent links; a node referenced twice has two parents (or one
    // parent twice over), both defects under the same diagnostic.
    let ids: Vec<NodeId> = nodes.keys().cloned().collect();
    for parent_id in &ids {
        let children = nodes[parent_id].children.clone();
        for child_id in children {
            let Some(child) = nodes.get_mut(&child_id) else {
                return Err(TreeError::UnknownChild {
                    parent: parent_id.clone(),
                    child: child_id,
                });
            };
            if child.parent.is_some() {
                return Err(TreeError::MultipleParents(child_id));
            }
            child.parent = Some(parent_id.clone());
        }
    }

    if let Some(parent) = nodes[&file.root].parent.clone() {
        return Err(TreeError::RootHasParent {
            root: file.root,
            parent,
        });
    }
    for (id, node) in &nodes {
        if node.parent.is_none() && *id != file.root {
            return Err(TreeError::ExtraRoot(id.clone()));
        }
    }

    // Every node now has exactly one parent except the root, so any node the
    // root cannot reach sits on a parent-link cycle.
    let mut reachable: BTreeSet<NodeId> = BTreeSet::new();
    let mut stack = vec![file.root.clone()];
    while let Some(id) = stack.pop() {
        if reachable.insert(id.clone()) {
            stack.extend(nodes[&id].children.iter().cloned());
        }
    }
    for id in nodes.keys() {
        if !reachable.contains(id) {
            return Err(TreeError::Cycle(id.clone()));
        }
    }

    for node in nodes.values() {
        if node.clause_positive.is_empty() {
            return Err(TreeError::EmptyClause {
                node: node.id.clone(),
                field: "clause_positive",
            });
        }
        if node.clause_negative.is_empty() {
            return Err(TreeError::EmptyClause {
                node: node.id.clone(),
                field: "clause_negative",
            });
        }
    }

    let mut tree = ReasoningTree {
        root: file.root,
        nodes,
        depth: 0,
    };
    tree.depth = max_depth(&tree);
    Ok(tree)
}

impl ReasoningTree {
    pub fn root(&self) -> &NodeId {
        &self.root
    }

    pub fn node(&self, id: &NodeId) -> Option<&TreeNode> {
        self.nodes.get(id)
    }

    /// Nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.values()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Cached depth; equal to [`max_depth`] by construction.
    pub fn depth(&self) -> usize {
        self.depth
    }
}

/// Number of nodes on the longest root-to-leaf path. A lone root counts 1.
pub fn max_depth(tree: &ReasoningTree) -> usize {
    fn walk(tree: &ReasoningTree, id: &NodeId) -> usize {
        let node = &tree.nodes[id];
        1 + node
            .children
            .iter()
            .map(|c| walk(tree, c))
            .max()
            .unwrap_or(0)
    }
    walk(tree, &tree.root)
}

/// Ids of all leaves whose name equals `name`, in id order.
pub fn leaves_with_name<'t>(tree: &'t ReasoningTree, name: &str) -> Vec<&'t NodeId> {
    tree.nodes()
        .filter(|n| n.is_leaf() && n.name == name)
        .map(|n| &n.id)
        .collect()
}

/// Serialize to the canonical on-disk form: nodes sorted by id, keys sorted,
/// two-space indent, trailing newline.
pub fn save_tree(tree: &ReasoningTree) -> String {
    let file = TreeFile {
        nodes: tree
            .nodes()
            .map(|n| NodeFile {
                children: n.children.clone(),
                clause_negative: n.clause_negative.clone(),
                clause_positive: n.clause_positive.clone(),
                id: n.id.clone(),
                name: n.name.clone(),
            })
            .collect(),
        root: tree.root.clone(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("tree serialization cannot fail");
    out.push('\n');
    out
}

/// The face anti-spoofing fixture tree shipped with the crate: three modality
/// branches (RGB, depth, infrared), each deciding live-versus-attack and
/// refining attacks into four types. Depth 4, 22 nodes, five distinct leaf
/// labels each appearing once per modality branch.
pub const FIXTURE_TREE_JSON: &str = include_str!("../data/fas_tree.json");

/// Load the bundled fixture tree. Panics only if the bundled data is invalid,
/// which the test suite rules out.
pub fn fixture_tree() -> ReasoningTree {
    load_tree_str(FIXTURE_TREE_JSON).expect("bundled fixture tree is valid")
}

/// Deterministically generate a valid random tree: `node_count` nodes, each
/// non-root node attached to a uniformly chosen earlier node, at least one
/// leaf named `"target"`, all clauses distinct. Meant for randomized tests
/// and benchmarks, where hand fixtures would under-cover tree shapes.
pub fn random_tree(node_count: usize, seed: u64) -> ReasoningTree {
    use rand::Rng;
    assert!(node_count >= 2, "a sampling tree needs at least two nodes");
    let mut rng = crate::seeding::rng_for(seed, "random-tree");

    let mut children: Vec<Vec<usize>> = vec![Vec::new(); node_count];
    for i in 1..node_count {
        let parent = rng.gen_range(0..i);
        children[parent].push(i);
    }
    let mut names: Vec<String> = (0..node_count).map(|i| format!("stage-{i}")).collect();
    let leaves: Vec<usize> = (0..node_count).filter(|i| children[*i].is_empty()).collect();
    let mut any_target = false;
    for &leaf in &leaves {
        if rng.gen_bool(0.5) {
            names[leaf] = "target".to_owned();
            any_target = true;
        } else {
            names[leaf] = format!("other-{leaf}");
        }
    }
    if !any_target {
        names[leaves[0]] = "target".to_owned();
    }

    let file = TreeFile {
        nodes: (0..node_count)
            .map(|i| NodeFile {
                children: children[i].iter().map(|c| NodeId(format!("n{c:03}"))).collect(),
                clause_negative: format!("negative clause {i}"),
                clause_positive: format!("positive clause {i}"),
                id: NodeId(format!("n{i:03}")),
                name: names[i].clone(),
            })
            .collect(),
        root: NodeId("n000".to_owned()),
    };
    build_tree(file).expect("generated trees are valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mini(json: &str) -> Result<ReasoningTree, TreeError> {
        load_tree_str(json)
    }

    /// Two-node tree used across error-shape tests.
    fn two_node() -> String {
        r#"{
          "nodes": [
            {"children": ["leaf"], "clause_negative": "rn", "clause_positive": "rp", "id": "r", "name": "start"},
            {"children": [], "clause_negative": "ln", "clause_positive": "lp", "id": "leaf", "name": "real"}
          ],
          "root": "r"
        }"#
        .to_owned()
    }

    #[test]
    fn loads_and_links_parents() {
        let t = mini(&two_node()).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.depth(), 2);
        assert_eq!(t.node(&"leaf".into()).unwrap().parent, Some("r".into()));
        assert_eq!(t.node(&"r".into()).unwrap().parent, None);
    }

    #[test]
    fn rejects_duplicate_id() {
        let json = two_node().replace("\"id\": \"leaf\"", "\"id\": \"r\"");
        assert!(matches!(mini(&json), Err(TreeError::DuplicateId(id)) if id.as_str() == "r"));
    }

    #[test]
    fn rejects_unknown_child() {
        let json = two_node().replace("[\"leaf\"]", "[\"ghost\"]");
        assert!(matches!(
            mini(&json),
            Err(TreeError::UnknownChild { child, .. }) if child.as_str() == "ghost"
        ));
    }

    #[test]
    fn rejects_multiple_parents() {
        let json = two_node().replace("[\"leaf\"]", "[\"leaf\", \"leaf\"]");
        assert!(matches!(
            mini(&json),
            Err(TreeError::MultipleParents(id)) if id.as_str() == "leaf"
        ));
    }

    #[test]
    fn rejects_extra_root() {
        let json = two_node().replace("[\"leaf\"]", "[]");
        assert!(matches!(mini(&json), Err(TreeError::ExtraRoot(id)) if id.as_str() == "leaf"));
    }

    #[test]
    fn rejects_self_cycle() {
        let json = r#"{
          "nodes": [
            {"children": ["a"], "clause_negative": "rn", "clause_positive": "rp", "id": "r", "name": "start"},
            {"children": ["b"], "clause_negative": "an", "clause_positive": "ap", "id": "a", "name": "mid"},
            {"children": ["b"], "clause_negative": "bn", "clause_positive": "bp", "id": "b", "name": "leaf"}
          ],
          "root": "r"
        }"#;
        // b is claimed by both a and itself-through-a; first defect wins.
        assert!(matches!(mini(json), Err(TreeError::MultipleParents(id)) if id.as_str() == "b"));
    }

    #[test]
    fn rejects_detached_ring_as_cycle() {
        let json = r#"{
          "nodes": [
            {"children": [], "clause_negative": "rn", "clause_positive": "rp", "id": "r", "name": "start"},
            {"children": ["b"], "clause_negative": "an", "clause_positive": "ap", "id": "a", "name": "x"},
            {"children": ["a"], "clause_negative": "bn", "clause_positive": "bp", "id": "b", "name": "y"}
          ],
          "root": "r"
        }"#;
        assert!(matches!(mini(json), Err(TreeError::Cycle(_))));
    }

    #[test]
    fn rejects_empty_clause() {
        let json = two_node().replace("\"clause_positive\": \"lp\"", "\"clause_positive\": \"\"");
        assert!(matches!(
            mini(&json),
            Err(TreeError::EmptyClause { node, field }) if node.as_str() == "leaf" && field == "clause_positive"
        ));
    }

    #[test]
    fn rejects_root_with_parent() {
        let json = r#"{
          "nodes": [
            {"children": ["r"], "clause_negative": "an", "clause_positive": "ap", "id": "a", "name": "x"},
            {"children": [], "clause_negative": "rn", "clause_positive": "rp", "id": "r", "name": "start"}
          ],
          "root": "r"
        }"#;
        assert!(matches!(mini(json), Err(TreeError::RootHasParent { .. })));
    }

    #[test]
    fn rejects_malformed_json() {
        assert!(matches!(mini("{"), Err(TreeError::Syntax(_))));
    }

    #[test]
    fn single_node_tree_has_depth_one() {
        let json = r#"{
          "nodes": [
            {"children": [], "clause_negative": "n", "clause_positive": "p", "id": "only", "name": "real"}
          ],
          "root": "only"
        }"#;
        let t = mini(json).unwrap();
        assert_eq!(t.depth(), 1);
        assert_eq!(max_depth(&t), 1);
    }

    #[test]
    fn fixture_loads_with_expected_shape() {
        let t = fixture_tree();
        assert_eq!(t.len(), 22);
        // Hand count of the fixture's longest chain:
        // root -> modality -> attack -> attack type = 4 nodes.
        assert_eq!(t.depth(), 4);
        assert_eq!(max_depth(&t), 4);
        // Each label appears once per modality branch.
        for label in ["real", "print attack", "replay attack", "mask attack", "paper mask attack"] {
            assert_eq!(leaves_with_name(&t, label).len(), 3, "label {label:?}");
        }
        assert!(leaves_with_name(&t, "no such label").is_empty());
    }

    #[test]
    fn fixture_is_canonical_and_round_trips() {
        let t = fixture_tree();
        // save ∘ load on canonical bytes is the identity…
        assert_eq!(save_tree(&t), FIXTURE_TREE_JSON);
        // …and load ∘ save preserves the in-memory tree.
        assert_eq!(load_tree_str(&save_tree(&t)).unwrap(), t);
    }

    #[test]
    fn canonicalization_sorts_scrambled_input() {
        // Same two-node tree with node order and key order scrambled.
        let scrambled = r#"{
          "root": "r",
          "nodes": [
            {"id": "leaf", "name": "real", "children": [], "clause_positive": "lp", "clause_negative": "ln"},
            {"name": "start", "id": "r", "clause_positive": "rp", "children": ["leaf"], "clause_negative": "rn"}
          ]
        }"#;
        let canon = save_tree(&mini(scrambled).unwrap());
        assert_eq!(canon, save_tree(&mini(&two_node()).unwrap()));
        let leaf_pos = canon.find("\"id\": \"leaf\"").unwrap();
        let root_pos = canon.find("\"id\": \"r\"").unwrap();
        assert!(leaf_pos < root_pos, "nodes must sort by id");
    }
}
