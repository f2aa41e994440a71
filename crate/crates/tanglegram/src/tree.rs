//! Rooted binary trees stored as flat node arrays.
//!
//! Node ids are indices into the node array and stay stable for the
//! lifetime of a tree, so per-node data (orientation bits, matchings)
//! can be kept in plain vectors indexed by id.

use thiserror::Error;

/// Index of a node inside a [`BinaryTree`].
pub type NodeId = usize;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum TreeError {
    #[error("node id {0} is out of range")]
    InvalidNode(NodeId),
    #[error("node {0} is not a leaf")]
    NotALeaf(NodeId),
    #[error("duplicate leaf label `{0}`")]
    DuplicateLabel(String),
    #[error("leaf label must not be empty")]
    EmptyLabel,
    #[error("root {0} must not have a parent")]
    RootHasParent(NodeId),
    #[error("parent/child links of node {0} are inconsistent")]
    BrokenLink(NodeId),
    #[error("tree is not a single component rooted at {0}")]
    Disconnected(NodeId),
    #[error("tree has no nodes")]
    Empty,
    #[error("expected one flip entry per node, got {got} for {want} nodes")]
    FlipLength { got: usize, want: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    /// Inner node with exactly two children, in stored (unflipped) order.
    Internal {
        children: [NodeId; 2],
    },
    Leaf {
        label: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub parent: Option<NodeId>,
    pub kind: NodeKind,
}

/// A rooted tree in which every inner node has exactly two children.
///
/// Construction validates the shape once; afterwards the tree is
/// immutable (except for [`BinaryTree::swap_leaf_labels`], which keeps
/// every structural invariant intact) and all queries are cheap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryTree {
    nodes: Vec<Node>,
    root: NodeId,
    depth: Vec<usize>,
    // Euler intervals for O(1) ancestry tests.
    tin: Vec<usize>,
    tout: Vec<usize>,
    leaves: Vec<NodeId>,
    height: usize,
}

impl BinaryTree {
    pub fn new(nodes: Vec<Node>, root: NodeId) -> Result<Self, TreeError> {
        if nodes.is_empty() {
            return Err(TreeError::Empty);
        }
        if root >= nodes.len() {
            return Err(TreeError::InvalidNode(root));
        }
        if nodes[root].parent.is_some() {
            return Err(TreeError::RootHasParent(root));
        }
        for (id, node) in nodes.iter().enumerate() {
            if let Some(p) = node.parent {
                if p >= nodes.len() {
                    return Err(TreeError::InvalidNode(p));
                }
                match &nodes[p].kind {
                    NodeKind::Internal { children } if children.contains(&id) => {}
                    _ => return Err(TreeError::BrokenLink(id)),
                }
            } else if id != root {
                return Err(TreeError::Disconnected(id));
            }
            if let NodeKind::Internal { children } = &node.kind {
                for &c in children {
                    if c >= nodes.len() {
                        return Err(TreeError::InvalidNode(c));
                    }
                    if nodes[c].parent != Some(id) {
                        return Err(TreeError::BrokenLink(id));
                    }
                }
                if children[0] == children[1] {
                    return Err(TreeError::BrokenLink(id));
                }
            }
        }

        // One DFS settles connectivity, acyclicity, depths, Euler
        // intervals and the leaf list.
        let mut depth = vec![usize::MAX; nodes.len()];
        let mut tin = vec![0usize; nodes.len()];
        let mut tout = vec![0usize; nodes.len()];
        let mut leaves = Vec::new();
        let mut seen = 0usize;
        let mut clock = 0usize;
        let mut stack = vec![(root, 0usize, false)];
        while let Some((v, d, exiting)) = stack.pop() {
            if exiting {
                tout[v] = clock;
                clock += 1;
                continue;
            }
            if depth[v] != usize::MAX {
                return Err(TreeError::Disconnected(root));
            }
            depth[v] = d;
            tin[v] = clock;
            clock += 1;
            seen += 1;
            stack.push((v, d, true));
            match &nodes[v].kind {
                NodeKind::Leaf { label } => {
                    if label.is_empty() {
                        return Err(TreeError::EmptyLabel);
                    }
                    leaves.push(v);
                }
                NodeKind::Internal { children } => {
                    stack.push((children[1], d + 1, false));
                    stack.push((children[0], d + 1, false));
                }
            }
        }
        if seen != nodes.len() {
            return Err(TreeError::Disconnected(root));
        }

        let mut labels: Vec<&str> = leaves
            .iter()
            .map(|&l| match &nodes[l].kind {
                NodeKind::Leaf { label } => label.as_str(),
                _ => unreachable!(),
            })
            .collect();
        labels.sort_unstable();
        for pair in labels.windows(2) {
            if pair[0] == pair[1] {
                return Err(TreeError::DuplicateLabel(pair[0].to_string()));
            }
        }

        let height = leaves.iter().map(|&l| depth[l]).max().unwrap_or(0);
        Ok(Self {
            nodes,
            root,
            depth,
            tin,
            tout,
            leaves,
            height,
        })
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    /// Maximum root-to-leaf edge count.
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn depth(&self, v: NodeId) -> usize {
        self.depth[v]
    }

    pub fn node(&self, v: NodeId) -> &Node {
        &self.nodes[v]
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.nodes[v].parent
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        matches!(self.nodes[v].kind, NodeKind::Leaf { .. })
    }

    pub fn children(&self, v: NodeId) -> Option<[NodeId; 2]> {
        match self.nodes[v].kind {
            NodeKind::Internal { children } => Some(children),
            NodeKind::Leaf { .. } => None,
        }
    }

    pub fn label(&self, v: NodeId) -> Option<&str> {
        match &self.nodes[v].kind {
            NodeKind::Leaf { label } => Some(label),
            NodeKind::Internal { .. } => None,
        }
    }

    /// Leaves in stored (unflipped) depth-first order.
    pub fn leaves(&self) -> &[NodeId] {
        &self.leaves
    }

    pub fn internal_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|&v| !self.is_leaf(v))
    }

    /// True if `anc` is `v` or an ancestor of `v`.
    pub fn is_ancestor_or_self(&self, anc: NodeId, v: NodeId) -> bool {
        self.tin[anc] <= self.tin[v] && self.tout[v] <= self.tout[anc]
    }

    /// Deepest common ancestor of two leaves; `lca(u, u) == u`.
    pub fn lca(&self, u: NodeId, v: NodeId) -> Result<NodeId, TreeError> {
        for x in [u, v] {
            if x >= self.nodes.len() {
                return Err(TreeError::InvalidNode(x));
            }
            if !self.is_leaf(x) {
                return Err(TreeError::NotALeaf(x));
            }
        }
        let (mut a, mut b) = (u, v);
        while self.depth[a] > self.depth[b] {
            a = self.nodes[a].parent.expect("deeper node has a parent");
        }
        while self.depth[b] > self.depth[a] {
            b = self.nodes[b].parent.expect("deeper node has a parent");
        }
        while a != b {
            a = self.nodes[a].parent.expect("non-root has a parent");
            b = self.nodes[b].parent.expect("non-root has a parent");
        }
        Ok(a)
    }

    /// All leaves below (or equal to) `v`, in stored depth-first order.
    pub fn subtree_leaves(&self, v: NodeId) -> Result<Vec<NodeId>, TreeError> {
        if v >= self.nodes.len() {
            return Err(TreeError::InvalidNode(v));
        }
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            match self.nodes[x].kind {
                NodeKind::Leaf { .. } => out.push(x),
                NodeKind::Internal { children } => {
                    stack.push(children[1]);
                    stack.push(children[0]);
                }
            }
        }
        Ok(out)
    }

    /// Leaf ids in drawn top-to-bottom order: depth-first, visiting the
    /// two children of node `v` swapped wherever `flips[v]` is true.
    pub fn leaf_order(&self, flips: &[bool]) -> Result<Vec<NodeId>, TreeError> {
        let mut out = Vec::with_capacity(self.leaves.len());
        self.leaf_order_into(flips, &mut out)?;
        Ok(out)
    }

    /// Allocation-free variant of [`BinaryTree::leaf_order`] for hot loops.
    pub fn leaf_order_into(&self, flips: &[bool], out: &mut Vec<NodeId>) -> Result<(), TreeError> {
        if flips.len() != self.nodes.len() {
            return Err(TreeError::FlipLength {
                got: flips.len(),
                want: self.nodes.len(),
            });
        }
        out.clear();
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            match self.nodes[v].kind {
                NodeKind::Leaf { .. } => out.push(v),
                NodeKind::Internal { children } => {
                    let [a, b] = children;
                    let (first, second) = if flips[v] { (b, a) } else { (a, b) };
                    stack.push(second);
                    stack.push(first);
                }
            }
        }
        Ok(())
    }

    /// Exchange the labels of two leaves. Structure and ids are untouched.
    pub fn swap_leaf_labels(&mut self, a: NodeId, b: NodeId) -> Result<(), TreeError> {
        for x in [a, b] {
            if x >= self.nodes.len() {
                return Err(TreeError::InvalidNode(x));
            }
            if !self.is_leaf(x) {
                return Err(TreeError::NotALeaf(x));
            }
        }
        if a == b {
            return Ok(());
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.nodes.split_at_mut(hi);
        match (&mut head[lo].kind, &mut tail[0].kind) {
            (NodeKind::Leaf { label: la }, NodeKind::Leaf { label: lb }) => std::mem::swap(la, lb),
            _ => unreachable!(),
        }
        Ok(())
    }
}

/// Incremental constructor used by the parser and the generators.
#[derive(Debug, Default)]
pub struct TreeBuilder {
    nodes: Vec<Node>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn leaf(&mut self, label: impl Into<String>) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(Node {
            parent: None,
            kind: NodeKind::Leaf {
                label: label.into(),
            },
        });
        id
    }

    pub fn join(&mut self, first: NodeId, second: NodeId) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(Node {
            parent: None,
            kind: NodeKind::Internal {
                children: [first, second],
            },
        });
        self.nodes[first].parent = Some(id);
        self.nodes[second].parent = Some(id);
        id
    }

    pub fn build(self, root: NodeId) -> Result<BinaryTree, TreeError> {
        BinaryTree::new(self.nodes, root)
    }
}

/// Complete binary tree over `labels` (leaf count must be a power of two),
/// leaves in the given left-to-right order.
pub fn complete_tree(labels: &[String]) -> Result<BinaryTree, TreeError> {
    assert!(
        labels.len().is_power_of_two(),
        "complete tree needs a power-of-two leaf count"
    );
    let mut b = TreeBuilder::new();
    let mut layer: Vec<NodeId> = labels.iter().map(|l| b.leaf(l.clone())).collect();
    while layer.len() > 1 {
        layer = layer
            .chunks(2)
            .map(|pair| b.join(pair[0], pair[1]))
            .collect();
    }
    let root = layer[0];
    b.build(root)
}

/// Caterpillar: the spine descends through the second child; labels appear
/// top-to-bottom in the given order.
pub fn caterpillar_tree(labels: &[String]) -> Result<BinaryTree, TreeError> {
    assert!(labels.len() >= 2, "caterpillar needs at least two leaves");
    let mut b = TreeBuilder::new();
    let ids: Vec<NodeId> = labels.iter().map(|l| b.leaf(l.clone())).collect();
    let mut spine = *ids.last().unwrap();
    for &leaf in ids.iter().rev().skip(1) {
        spine = b.join(leaf, spine);
    }
    b.build(spine)
}
