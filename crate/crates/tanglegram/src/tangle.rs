//! Tanglegram instances: two binary trees plus a perfect matching of
//! their leaf sets, and the orientation vectors that encode layouts.

use std::collections::HashMap;
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::tree::{BinaryTree, NodeId};

#[derive(Error, Debug, PartialEq, Eq)]
pub enum TangleError {
    #[error("leaf counts differ: left {left}, right {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("label `{0}` has no partner in the other tree")]
    UnmatchedLabel(String),
    #[error("node {0} used in the matching is not a leaf")]
    NotALeaf(NodeId),
    #[error("leaf {0} appears more than once in the matching")]
    DuplicateLeaf(NodeId),
    #[error("matching does not cover every leaf")]
    Incomplete,
}

/// Perfect matching between the leaves of the two trees, frozen as an
/// id-level bijection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafMatching {
    left_to_right: Vec<Option<NodeId>>,
    right_to_left: Vec<Option<NodeId>>,
    pairs: Vec<(NodeId, NodeId)>,
}

impl LeafMatching {
    fn new(
        left: &BinaryTree,
        right: &BinaryTree,
        pairs: Vec<(NodeId, NodeId)>,
    ) -> Result<Self, TangleError> {
        let mut left_to_right = vec![None; left.node_count()];
        let mut right_to_left = vec![None; right.node_count()];
        for &(l, r) in &pairs {
            if l >= left.node_count() || !left.is_leaf(l) {
                return Err(TangleError::NotALeaf(l));
            }
            if r >= right.node_count() || !right.is_leaf(r) {
                return Err(TangleError::NotALeaf(r));
            }
            if left_to_right[l].replace(r).is_some() {
                return Err(TangleError::DuplicateLeaf(l));
            }
            if right_to_left[r].replace(l).is_some() {
                return Err(TangleError::DuplicateLeaf(r));
            }
        }
        if pairs.len() != left.leaf_count() || pairs.len() != right.leaf_count() {
            return Err(TangleError::Incomplete);
        }
        Ok(Self {
            left_to_right,
            right_to_left,
            pairs,
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(NodeId, NodeId)] {
        &self.pairs
    }

    /// Right-tree partner of a left-tree leaf.
    pub fn right_of(&self, left_leaf: NodeId) -> NodeId {
        self.left_to_right[left_leaf].expect("matching covers every leaf")
    }

    /// Left-tree partner of a right-tree leaf.
    pub fn left_of(&self, right_leaf: NodeId) -> NodeId {
        self.right_to_left[right_leaf].expect("matching covers every leaf")
    }
}

/// A binary tanglegram: two rooted binary trees on the same number of
/// leaves plus a perfect matching between the leaf sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tanglegram {
    left: BinaryTree,
    right: BinaryTree,
    matching: LeafMatching,
}

impl Tanglegram {
    pub fn new(
        left: BinaryTree,
        right: BinaryTree,
        pairs: Vec<(NodeId, NodeId)>,
    ) -> Result<Self, TangleError> {
        if left.leaf_count() != right.leaf_count() {
            return Err(TangleError::SizeMismatch {
                left: left.leaf_count(),
                right: right.leaf_count(),
            });
        }
        let matching = LeafMatching::new(&left, &right, pairs)?;
        Ok(Self {
            left,
            right,
            matching,
        })
    }

    /// Match leaves by label equality.
    pub fn match_by_labels(left: BinaryTree, right: BinaryTree) -> Result<Self, TangleError> {
        Self::match_by_labels_mapped(left, right, &HashMap::new())
    }

    /// Match leaves by label, with explicit left-label -> right-label
    /// overrides for mismatched nomenclature.
    pub fn match_by_labels_mapped(
        left: BinaryTree,
        right: BinaryTree,
        map: &HashMap<String, String>,
    ) -> Result<Self, TangleError> {
        if left.leaf_count() != right.leaf_count() {
            return Err(TangleError::SizeMismatch {
                left: left.leaf_count(),
                right: right.leaf_count(),
            });
        }
        let by_label: HashMap<&str, NodeId> = right
            .leaves()
            .iter()
            .map(|&r| (right.label(r).expect("leaf has a label"), r))
            .collect();
        let mut pairs = Vec::with_capacity(left.leaf_count());
        for &l in left.leaves() {
            let label = left.label(l).expect("leaf has a label");
            let target = map.get(label).map(String::as_str).unwrap_or(label);
            let &r = by_label
                .get(target)
                .ok_or_else(|| TangleError::UnmatchedLabel(label.to_string()))?;
            pairs.push((l, r));
        }
        Self::new(left, right, pairs)
    }

    pub fn left(&self) -> &BinaryTree {
        &self.left
    }

    pub fn right(&self) -> &BinaryTree {
        &self.right
    }

    pub fn matching(&self) -> &LeafMatching {
        &self.matching
    }

    /// Number of leaves per tree.
    pub fn leaf_count(&self) -> usize {
        self.left.leaf_count()
    }

    /// Smaller of the two tree heights.
    pub fn min_height(&self) -> usize {
        self.left.height().min(self.right.height())
    }

    /// Larger of the two tree heights.
    pub fn max_height(&self) -> usize {
        self.left.height().max(self.right.height())
    }
}

/// One flip bit per node and tree: `true` means the node's children are
/// drawn swapped relative to stored order. Bits on leaves are ignored.
/// An orientation determines one compatible leaf order per tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    pub left_flips: Vec<bool>,
    pub right_flips: Vec<bool>,
}

impl Orientation {
    /// The input drawing: nothing flipped.
    pub fn unflipped(t: &Tanglegram) -> Self {
        Self {
            left_flips: vec![false; t.left().node_count()],
            right_flips: vec![false; t.right().node_count()],
        }
    }

    pub fn random(t: &Tanglegram, rng: &mut impl Rng) -> Self {
        let mut o = Self::unflipped(t);
        for v in t.left().internal_nodes() {
            o.left_flips[v] = rng.random();
        }
        for v in t.right().internal_nodes() {
            o.right_flips[v] = rng.random();
        }
        o
    }

    /// Flip every internal node on both sides (vertical mirror of the
    /// whole drawing).
    pub fn mirrored(&self, t: &Tanglegram) -> Self {
        let mut o = self.clone();
        for v in t.left().internal_nodes() {
            o.left_flips[v] = !o.left_flips[v];
        }
        for v in t.right().internal_nodes() {
            o.right_flips[v] = !o.right_flips[v];
        }
        o
    }
}

/// Number of inter-tree edge crossings of a concrete layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CrossingCount(pub u64);

impl CrossingCount {
    pub fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Display for CrossingCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
