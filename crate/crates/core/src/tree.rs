//! Rooted non-embedded binary trees with distinct positive leaf labels.
//!
//! A tree with `n` leaves has `n - 1` internal nodes and `2n - 1` edges: each
//! edge is identified with its bottom vertex, and the root node identifies the
//! extra root-edge. Children are semantically unordered; the canonical form
//! stores at every internal node the child subtree with the smaller minimum
//! leaf label first, and keeps nodes in depth-first preorder with the root at
//! index 0. Two trees are equal as non-embedded trees iff their canonical node
//! arrays are identical.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Leaf labels are positive integers.
pub type Label = u64;

/// One node of a [`PhyloTree`]; internal nodes store child indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    Leaf(Label),
    Internal(u32, u32),
}

/// An edge of a tree, identified by the canonical DFS index of its bottom
/// vertex. `EdgeRef(0)` is the root-edge. Semantically the identity of an
/// edge is the set of leaf labels below it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeRef(pub usize);

/// A canonical rooted non-embedded binary tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhyloTree {
    /// Nodes in canonical DFS preorder; the root is `nodes[0]`.
    nodes: Vec<Node>,
}

impl PhyloTree {
    /// A single leaf.
    pub fn leaf(label: Label) -> Result<Self> {
        if label == 0 {
            return Err(Error::InvalidLabel(0));
        }
        Ok(Self {
            nodes: vec![Node::Leaf(label)],
        })
    }

    /// Joins two trees under a new root. Label sets must be disjoint.
    pub fn join(left: Self, right: Self) -> Result<Self> {
        let l_set = left.label_set();
        for l in right.leaf_labels() {
            if l_set.contains(&l) {
                return Err(Error::DuplicateLabel(l));
            }
        }
        let (first, second) = if left.min_label() < right.min_label() {
            (left, right)
        } else {
            (right, left)
        };
        let mut nodes = Vec::with_capacity(first.nodes.len() + second.nodes.len() + 1);
        nodes.push(Node::Internal(1, 1 + first.nodes.len() as u32));
        let shift = |n: Node, off: u32| match n {
            Node::Leaf(l) => Node::Leaf(l),
            Node::Internal(a, b) => Node::Internal(a + off, b + off),
        };
        nodes.extend(first.nodes.iter().map(|&n| shift(n, 1)));
        let off = 1 + first.nodes.len() as u32;
        nodes.extend(second.nodes.iter().map(|&n| shift(n, off)));
        Ok(Self { nodes })
    }

    /// Rebuilds the canonical form from an arbitrary node arena and root.
    /// Only nodes reachable from `root` are kept.
    pub(crate) fn canonical_from(nodes: &[Node], root: usize) -> Self {
        Self::canonical_from_with_map(nodes, root).0
    }

    /// Like [`canonical_from`], also returning `map[old_id] = new_id` for
    /// every node reachable from `root` (unreachable ids map to `usize::MAX`).
    pub(crate) fn canonical_from_with_map(nodes: &[Node], root: usize) -> (Self, Vec<usize>) {
        // Pass 1: subtree minimum labels, via iterative post-order.
        let mut min_label = vec![Label::MAX; nodes.len()];
        let mut stack = vec![(root, false)];
        while let Some((id, expanded)) = stack.pop() {
            match nodes[id] {
                Node::Leaf(l) => min_label[id] = l,
                Node::Internal(a, b) => {
                    let (a, b) = (a as usize, b as usize);
                    if expanded {
                        min_label[id] = min_label[a].min(min_label[b]);
                    } else {
                        stack.push((id, true));
                        stack.push((a, false));
                        stack.push((b, false));
                    }
                }
            }
        }

        // Pass 2: preorder emission with min-label child ordering.
        let mut out = Vec::with_capacity(nodes.len());
        let mut map = vec![usize::MAX; nodes.len()];
        // Entries are (old_id, slot in `out` of the parent field to patch).
        let mut todo: Vec<(usize, Option<(usize, bool)>)> = vec![(root, None)];
        while let Some((id, patch)) = todo.pop() {
            let new_id = out.len();
            map[id] = new_id;
            if let Some((slot, is_left)) = patch {
                if let Node::Internal(a, b) = &mut out[slot] {
                    if is_left {
                        *a = new_id as u32;
                    } else {
                        *b = new_id as u32;
                    }
                }
            }
            match nodes[id] {
                Node::Leaf(l) => out.push(Node::Leaf(l)),
                Node::Internal(a, b) => {
                    let (a, b) = (a as usize, b as usize);
                    debug_assert_ne!(min_label[a], min_label[b], "label sets must be disjoint");
                    let (first, second) = if min_label[a] < min_label[b] { (a, b) } else { (b, a) };
                    out.push(Node::Internal(u32::MAX, u32::MAX));
                    // Preorder: the first child must be emitted next.
                    todo.push((second, Some((new_id, false))));
                    todo.push((first, Some((new_id, true))));
                }
            }
        }
        (Self { nodes: out }, map)
    }

    /// Wraps nodes already in canonical preorder. Debug builds verify the
    /// invariant by re-normalizing (only at small sizes; the check would
    /// otherwise dominate the timing of large sampler draws).
    pub(crate) fn from_preorder(nodes: Vec<Node>) -> Self {
        let tree = Self { nodes };
        debug_assert!(
            tree.nodes.len() > 4096 || tree == Self::canonical_from(&tree.nodes, 0)
        );
        tree
    }

    /// Re-normalizes the tree. Canonical forms are produced by every
    /// constructor, so this is idempotent.
    pub fn canonicalize(&self) -> Self {
        Self::canonical_from(&self.nodes, 0)
    }

    /// Number of leaves.
    pub fn n_leaves(&self) -> usize {
        (self.nodes.len() + 1) / 2
    }

    /// Number of edges, root-edge included; equals the number of nodes.
    pub fn n_edges(&self) -> usize {
        self.nodes.len()
    }

    /// Number of internal nodes.
    pub fn n_internal(&self) -> usize {
        self.nodes.len() / 2
    }

    pub fn node(&self, id: usize) -> Node {
        self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// All edges in canonical DFS order; `EdgeRef(0)` is the root-edge.
    pub fn edges(&self) -> Vec<EdgeRef> {
        (0..self.nodes.len()).map(EdgeRef).collect()
    }

    pub fn is_valid_edge(&self, edge: EdgeRef) -> bool {
        edge.0 < self.nodes.len()
    }

    /// Leaf labels in canonical DFS order.
    pub fn leaf_labels(&self) -> Vec<Label> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Leaf(l) => Some(*l),
                Node::Internal(..) => None,
            })
            .collect()
    }

    pub fn label_set(&self) -> BTreeSet<Label> {
        self.leaf_labels().into_iter().collect()
    }

    /// Smallest leaf label. In canonical form this is the leftmost leaf.
    pub fn min_label(&self) -> Label {
        let mut id = 0;
        loop {
            match self.nodes[id] {
                Node::Leaf(l) => return l,
                Node::Internal(a, _) => id = a as usize,
            }
        }
    }

    /// The set of leaf labels below the bottom vertex of an edge.
    pub fn leaf_set_below(&self, edge: EdgeRef) -> Result<BTreeSet<Label>> {
        if !self.is_valid_edge(edge) {
            return Err(Error::InvalidEdge(edge.0));
        }
        let mut set = BTreeSet::new();
        let mut stack = vec![edge.0];
        while let Some(id) = stack.pop() {
            match self.nodes[id] {
                Node::Leaf(l) => {
                    set.insert(l);
                }
                Node::Internal(a, b) => {
                    stack.push(a as usize);
                    stack.push(b as usize);
                }
            }
        }
        Ok(set)
    }

    /// Finds the edge whose below-leaf-set equals `set`, if any.
    pub fn edge_with_leaf_set(&self, set: &BTreeSet<Label>) -> Option<EdgeRef> {
        (0..self.nodes.len())
            .map(EdgeRef)
            .find(|&e| self.leaf_set_below(e).map(|s| &s == set).unwrap_or(false))
    }

    /// Relabels every leaf through `sigma` and canonicalizes.
    pub fn apply(&self, sigma: &Permutation) -> Result<Self> {
        let nodes = self.relabelled_nodes(sigma)?;
        Ok(Self::canonical_from(&nodes, 0))
    }

    fn relabelled_nodes(&self, sigma: &Permutation) -> Result<Vec<Node>> {
        self.nodes
            .iter()
            .map(|&n| match n {
                Node::Leaf(l) => sigma.apply(l).map(Node::Leaf),
                Node::Internal(a, b) => Ok(Node::Internal(a, b)),
            })
            .collect()
    }

    /// True iff the relabelled tree is the same non-embedded tree.
    pub fn is_fixed(&self, sigma: &Permutation) -> Result<bool> {
        Ok(self.apply(sigma)? == *self)
    }

    /// The permutation that `sigma` induces on the edges of a fixed tree:
    /// the edge with below-leaf-set `L` maps to the edge with below-leaf-set
    /// `sigma(L)`. Errors with [`Error::NotFixed`] if the tree is not fixed.
    pub fn induced_edge_permutation(&self, sigma: &Permutation) -> Result<Vec<EdgeRef>> {
        let relabelled = self.relabelled_nodes(sigma)?;
        let (canon, map) = Self::canonical_from_with_map(&relabelled, 0);
        if canon != *self {
            return Err(Error::NotFixed);
        }
        Ok(map.into_iter().map(EdgeRef).collect())
    }

    /// Subdivides `edge` and hangs a new leaf from the midpoint; the inverse
    /// direction of leaf removal.
    pub fn insert_leaf(&self, edge: EdgeRef, label: Label) -> Result<Self> {
        if label == 0 {
            return Err(Error::InvalidLabel(0));
        }
        if !self.is_valid_edge(edge) {
            return Err(Error::InvalidEdge(edge.0));
        }
        if self.label_set().contains(&label) {
            return Err(Error::LabelCollision(label));
        }
        let mut nodes = self.nodes.clone();
        let leaf = nodes.len() as u32;
        nodes.push(Node::Leaf(label));
        let mid = nodes.len() as u32;
        // The new midpoint takes over the subtree at the edge's bottom vertex.
        nodes.push(Node::Internal(edge.0 as u32, leaf));
        let root = if edge.0 == 0 {
            mid as usize
        } else {
            let bottom = edge.0 as u32;
            let parent = self
                .nodes
                .iter()
                .position(|n| matches!(n, Node::Internal(a, b) if *a == bottom || *b == bottom))
                .expect("non-root node has a parent");
            if let Node::Internal(a, b) = &mut nodes[parent] {
                if *a == bottom {
                    *a = mid;
                } else {
                    *b = mid;
                }
            }
            0
        };
        Ok(Self::canonical_from(&nodes, root))
    }
}

impl fmt::Display for PhyloTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::newick::to_newick(self))
    }
}

impl std::str::FromStr for PhyloTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        crate::newick::from_newick(s)
    }
}
