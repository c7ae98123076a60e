//! Minimal Newick reader/writer for strictly binary integer-labelled trees.
//!
//! Grammar: `tree := subtree ";"`, `subtree := label | "(" subtree "," subtree ")"`,
//! `label := decimal integer >= 1`. No whitespace, no branch lengths, no
//! leading zeros. Output is bit-exact for canonical trees.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::tree::{Label, Node, PhyloTree};

/// Serializes a tree; children appear in canonical order.
pub fn to_newick(tree: &PhyloTree) -> String {
    enum Item {
        Node(usize),
        Byte(u8),
    }
    let mut out = String::with_capacity(4 * tree.n_edges());
    let mut stack = vec![Item::Node(0)];
    while let Some(item) = stack.pop() {
        match item {
            Item::Byte(b) => out.push(b as char),
            Item::Node(id) => match tree.node(id) {
                Node::Leaf(l) => out.push_str(&l.to_string()),
                Node::Internal(a, b) => {
                    out.push('(');
                    stack.push(Item::Byte(b')'));
                    stack.push(Item::Node(b as usize));
                    stack.push(Item::Byte(b','));
                    stack.push(Item::Node(a as usize));
                }
            },
        }
    }
    out.push(';');
    out
}

/// Parses a Newick string and returns the canonical tree.
pub fn from_newick(text: &str) -> Result<PhyloTree> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut nodes: Vec<Node> = Vec::new();
    let mut seen: BTreeSet<Label> = BTreeSet::new();
    // One entry per open '(' holding the finished left child, if any.
    let mut frames: Vec<Option<usize>> = Vec::new();
    // Most recently completed subtree.
    let mut done: Option<usize> = None;

    let err = |pos: usize, msg: &str| Error::NewickParse {
        pos,
        msg: msg.to_string(),
    };

    loop {
        match bytes.get(pos) {
            Some(b'(') => {
                if done.is_some() {
                    return Err(err(pos, "expected ',' , ')' or ';'"));
                }
                frames.push(None);
                pos += 1;
            }
            Some(b'0'..=b'9') => {
                if done.is_some() {
                    return Err(err(pos, "expected ',' , ')' or ';'"));
                }
                let start = pos;
                while matches!(bytes.get(pos), Some(b'0'..=b'9')) {
                    pos += 1;
                }
                let digits = &text[start..pos];
                if digits.len() > 1 && digits.starts_with('0') {
                    return Err(err(start, "leading zero in label"));
                }
                let label: Label = digits
                    .parse()
                    .map_err(|_| err(start, "label out of range"))?;
                if label == 0 {
                    return Err(err(start, "labels must be >= 1"));
                }
                if !seen.insert(label) {
                    return Err(Error::DuplicateLabel(label));
                }
                nodes.push(Node::Leaf(label));
                done = Some(nodes.len() - 1);
            }
            Some(b',') => {
                let left = done.take().ok_or_else(|| err(pos, "expected a subtree"))?;
                match frames.last_mut() {
                    Some(slot @ None) => *slot = Some(left),
                    Some(Some(_)) => return Err(err(pos, "more than two children")),
                    None => return Err(err(pos, "',' outside parentheses")),
                }
                pos += 1;
            }
            Some(b')') => {
                let right = done.take().ok_or_else(|| err(pos, "expected a subtree"))?;
                match frames.pop() {
                    Some(Some(left)) => {
                        nodes.push(Node::Internal(left as u32, right as u32));
                        done = Some(nodes.len() - 1);
                    }
                    Some(None) => return Err(err(pos, "missing second subtree")),
                    None => return Err(err(pos, "unbalanced ')'")),
                }
                pos += 1;
            }
            Some(b';') => {
                if !frames.is_empty() {
                    return Err(err(pos, "unbalanced '('"));
                }
                let root = done.take().ok_or_else(|| err(pos, "empty tree"))?;
                if pos + 1 != bytes.len() {
                    return Err(err(pos + 1, "trailing input after ';'"));
                }
                return Ok(PhyloTree::canonical_from(&nodes, root));
            }
            Some(_) => return Err(err(pos, "unexpected character")),
            None => return Err(err(pos, "missing ';'")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leaf_round_trip() {
        let t = from_newick("7;").unwrap();
        assert_eq!(to_newick(&t), "7;");
    }

    #[test]
    fn cherry_round_trip() {
        let t = from_newick("(1,2);").unwrap();
        assert_eq!(to_newick(&t), "(1,2);");
    }

    #[test]
    fn output_is_canonical() {
        let t = from_newick("((3,4),(1,2));").unwrap();
        assert_eq!(to_newick(&t), "((1,2),(3,4));");
        assert_eq!(t, from_newick("((1,2),(3,4));").unwrap());
    }

    #[test]
    fn parse_errors() {
        assert!(from_newick("(1,2)").is_err()); // missing ';'
        assert!(from_newick("(1,2);x").is_err()); // trailing input
        assert!(from_newick("((1,2);").is_err()); // unbalanced
        assert!(from_newick("(1,2));").is_err()); // unbalanced
        assert!(from_newick("(1,2,3);").is_err()); // not binary
        assert!(from_newick("(1);").is_err()); // one child
        assert!(from_newick("(1,1);").is_err()); // duplicate label
        assert!(from_newick("(0,1);").is_err()); // zero label
        assert!(from_newick("(01,2);").is_err()); // leading zero
        assert!(from_newick("(1, 2);").is_err()); // whitespace
        assert!(from_newick(";").is_err()); // empty
        assert!(from_newick("(,1);").is_err());
    }
}
