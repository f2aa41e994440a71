//! Hierarchy sort: per-level barycentric crossing reduction with
//! sibling-only swaps, driven by collapse-and-expand cycles.
//!
//! Both trees are first padded with chains of unary dummy nodes so every
//! leaf sits at the same level. The working level then moves from the
//! leaves up to just below the roots and back; at each level one tree is
//! fixed and the other's level nodes are reordered by barycenter, where
//! only the two children of a real inner node may swap. Crossings are
//! always evaluated at the true leaf level (dummies never change the
//! leaf order), and the best orientation seen is what the solver
//! returns.

use std::time::Instant;

use thiserror::Error;

use crate::crossings::count_crossings;
use crate::solver::{SolveResult, SolveStats};
use crate::tangle::{CrossingCount, Orientation, Tanglegram};
use crate::tree::{BinaryTree, Node, NodeId, NodeKind};

#[derive(Error, Debug, PartialEq, Eq)]
pub enum HierarchyError {
    #[error("cannot collapse above the level below the roots")]
    CollapseAtRoot,
    #[error("cannot expand below the leaf level")]
    ExpandAtLeaves,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedSide {
    Left,
    Right,
}

impl FixedSide {
    fn other(self) -> FixedSide {
        match self {
            FixedSide::Left => FixedSide::Right,
            FixedSide::Right => FixedSide::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Origin {
    /// A node of the base tree (inner nodes and leaves keep their ids).
    Real(NodeId),
    /// Unary pass-through on the chain that lowers a base leaf.
    Dummy(NodeId),
}

#[derive(Debug, Clone)]
struct PaddedNode {
    parent: Option<usize>,
    children: Vec<usize>, // empty (leaf), one (dummy) or two entries
    level: usize,
    origin: Origin,
}

/// A base tree padded so that every leaf sits at the deepest level.
/// Real nodes keep their base ids; dummies take fresh ids above them.
/// Contracting the dummies recovers the base tree exactly.
#[derive(Debug, Clone)]
pub struct LeveledTree {
    nodes: Vec<PaddedNode>,
    root: usize,
    depth: usize,
    /// Per base leaf: its representative node at each level 0..=depth.
    level_ancestors: Vec<Vec<usize>>,
    /// Base leaf labels, kept so contraction restores the tree exactly.
    labels: Vec<Option<String>>,
}

impl LeveledTree {
    fn build(tree: &BinaryTree, depth: usize) -> Self {
        assert!(depth >= tree.height());
        let mut nodes: Vec<PaddedNode> = (0..tree.node_count())
            .map(|id| PaddedNode {
                parent: tree.parent(id),
                children: tree.children(id).map(|c| c.to_vec()).unwrap_or_default(),
                level: tree.depth(id),
                origin: Origin::Real(id),
            })
            .collect();
        for &leaf in tree.leaves() {
            let base_depth = tree.depth(leaf);
            if base_depth == depth {
                continue;
            }
            // Splice a dummy chain between the leaf's parent and the leaf.
            let mut upper = nodes[leaf].parent;
            for level in base_depth..depth {
                let id = nodes.len();
                nodes.push(PaddedNode {
                    parent: upper,
                    children: Vec::new(),
                    level,
                    origin: Origin::Dummy(leaf),
                });
                match upper {
                    Some(p) => {
                        if level == base_depth {
                            let slot = nodes[p]
                                .children
                                .iter()
                                .position(|&c| c == leaf)
                                .expect("parent links to leaf");
                            nodes[p].children[slot] = id;
                        } else {
                            nodes[p].children.push(id);
                        }
                    }
                    None => unreachable!("a leaf shallower than depth has a parent"),
                }
                upper = Some(id);
            }
            let chain_end = upper.expect("chain has at least one dummy");
            nodes[chain_end].children.push(leaf);
            nodes[leaf].parent = Some(chain_end);
            nodes[leaf].level = depth;
        }

        let mut level_ancestors = vec![Vec::new(); tree.node_count()];
        for &leaf in tree.leaves() {
            let mut chain = vec![0usize; depth + 1];
            let mut v = leaf;
            loop {
                chain[nodes[v].level] = v;
                match nodes[v].parent {
                    Some(p) => v = p,
                    None => break,
                }
            }
            level_ancestors[leaf] = chain;
        }

        let labels = (0..tree.node_count())
            .map(|id| tree.label(id).map(str::to_string))
            .collect();
        LeveledTree {
            nodes,
            root: tree.root(),
            depth,
            level_ancestors,
            labels,
        }
    }

    /// Common padded depth of all leaves.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn dummy_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.origin, Origin::Dummy(_)))
            .count()
    }

    /// Level of a node; base leaves all report `depth()`.
    pub fn level(&self, node: usize) -> usize {
        self.nodes[node].level
    }

    /// Representative of a base leaf at a level: the real ancestor, the
    /// chain dummy, or the leaf itself at the deepest level.
    pub fn representative(&self, base_leaf: NodeId, level: usize) -> usize {
        self.level_ancestors[base_leaf][level]
    }

    /// Nodes at a level in drawn order under `flips` (indexed by base id).
    pub fn level_order(&self, level: usize, flips: &[bool]) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            let node = &self.nodes[v];
            if node.level == level {
                out.push(v);
                continue;
            }
            match node.children.as_slice() {
                [] => {}
                [only] => stack.push(*only),
                [a, b] => {
                    let flip = match node.origin {
                        Origin::Real(id) => flips[id],
                        Origin::Dummy(_) => false,
                    };
                    let (first, second) = if flip { (*b, *a) } else { (*a, *b) };
                    stack.push(second);
                    stack.push(first);
                }
                _ => unreachable!("padded nodes have at most two children"),
            }
        }
        out
    }

    /// Remove every dummy, restoring the base tree.
    pub fn contracted(&self) -> BinaryTree {
        let real_count = self
            .nodes
            .iter()
            .filter(|n| matches!(n.origin, Origin::Real(_)))
            .count();
        let mut nodes = Vec::with_capacity(real_count);
        for id in 0..real_count {
            let padded = &self.nodes[id];
            debug_assert!(matches!(padded.origin, Origin::Real(r) if r == id));
            let mut parent = padded.parent;
            while let Some(p) = parent {
                match self.nodes[p].origin {
                    Origin::Dummy(_) => parent = self.nodes[p].parent,
                    Origin::Real(r) => {
                        parent = Some(r);
                        break;
                    }
                }
            }
            let kind = if padded.children.is_empty() {
                // Base leaves have no children even while padded deeper.
                NodeKind::Leaf {
                    label: self.labels[id].clone().expect("base leaf has a label"),
                }
            } else {
                let mut children = [0usize; 2];
                for (slot, &c) in padded.children.iter().enumerate() {
                    let mut down = c;
                    while let Origin::Dummy(_) = self.nodes[down].origin {
                        down = self.nodes[down].children[0];
                    }
                    children[slot] = down;
                }
                NodeKind::Internal { children }
            };
            nodes.push(Node { parent, kind });
        }
        BinaryTree::new(nodes, self.root).expect("contraction restores the base shape")
    }
}

/// Pad both trees of a tanglegram to the larger height.
pub fn equalize_depth(t: &Tanglegram) -> (LeveledTree, LeveledTree) {
    let depth = t.max_height();
    (
        LeveledTree::build(t.left(), depth),
        LeveledTree::build(t.right(), depth),
    )
}

/// Mutable solver state: the padded trees, the orientation under
/// construction, the working level and the best layout seen so far.
pub struct HsState<'a> {
    t: &'a Tanglegram,
    left: LeveledTree,
    right: LeveledTree,
    pub orientation: Orientation,
    current_level: usize,
    best: (CrossingCount, Orientation),
    pub cycles_run: u64,
    pub passes_run: u64,
}

impl<'a> HsState<'a> {
    pub fn new(t: &'a Tanglegram) -> Self {
        let (left, right) = equalize_depth(t);
        let orientation = Orientation::unflipped(t);
        let initial = count_crossings(t, &orientation).expect("orientation fits");
        let depth = left.depth();
        Self {
            t,
            left,
            right,
            best: (initial, orientation.clone()),
            orientation,
            current_level: depth,
            cycles_run: 0,
            passes_run: 0,
        }
    }

    pub fn depth(&self) -> usize {
        self.left.depth()
    }

    pub fn current_level(&self) -> usize {
        self.current_level
    }

    pub fn best_seen(&self) -> (CrossingCount, &Orientation) {
        (self.best.0, &self.best.1)
    }

    pub fn leveled_trees(&self) -> (&LeveledTree, &LeveledTree) {
        (&self.left, &self.right)
    }

    /// Move the working level one step toward the roots.
    pub fn collapse(&mut self) -> Result<(), HierarchyError> {
        if self.current_level <= 1 {
            return Err(HierarchyError::CollapseAtRoot);
        }
        self.current_level -= 1;
        Ok(())
    }

    /// Move the working level one step back toward the leaves.
    pub fn expand(&mut self) -> Result<(), HierarchyError> {
        if self.current_level >= self.depth() {
            return Err(HierarchyError::ExpandAtLeaves);
        }
        self.current_level += 1;
        Ok(())
    }

    /// One barycentric pass at `level`: the fixed side provides positions,
    /// the other side swaps children of its real inner nodes one level
    /// up wherever the top child's barycenter exceeds the bottom one's.
    /// All barycenters come from positions snapshotted at pass start.
    /// Returns the number of swaps; updates the best layout seen.
    pub fn barycentric_pass(&mut self, level: usize, fixed: FixedSide) -> usize {
        assert!(
            level >= 1 && level <= self.depth(),
            "pass level {level} outside 1..={}",
            self.depth()
        );
        let (fixed_tree, free_tree) = match fixed {
            FixedSide::Left => (&self.left, &self.right),
            FixedSide::Right => (&self.right, &self.left),
        };
        let fixed_flips = match fixed {
            FixedSide::Left => &self.orientation.left_flips,
            FixedSide::Right => &self.orientation.right_flips,
        };

        // 1-based positions of the fixed tree's level nodes.
        let fixed_order = fixed_tree.level_order(level, fixed_flips);
        let mut position = vec![0usize; fixed_tree.node_count()];
        for (i, &v) in fixed_order.iter().enumerate() {
            position[v] = i + 1;
        }

        // Barycenter numerator/denominator per free-side level node: the
        // positions of the level representatives of all matched partners.
        let mut sum = vec![0u64; free_tree.node_count()];
        let mut count = vec![0u64; free_tree.node_count()];
        let free_base = match fixed {
            FixedSide::Left => self.t.right(),
            FixedSide::Right => self.t.left(),
        };
        for &leaf in free_base.leaves() {
            let partner = match fixed {
                FixedSide::Left => self.t.matching().left_of(leaf),
                FixedSide::Right => self.t.matching().right_of(leaf),
            };
            let unit = free_tree.representative(leaf, level);
            let rep = fixed_tree.representative(partner, level);
            sum[unit] += position[rep] as u64;
            count[unit] += 1;
        }

        // Swap decisions, parents in drawn top-to-bottom order.
        let free_flips = match fixed {
            FixedSide::Left => self.orientation.right_flips.clone(),
            FixedSide::Right => self.orientation.left_flips.clone(),
        };
        let parents = free_tree.level_order(level - 1, &free_flips);
        let mut swaps = 0usize;
        let mut new_flips = free_flips;
        for p in parents {
            let node = &free_tree.nodes[p];
            let Origin::Real(real) = node.origin else {
                continue;
            };
            let [a, b] = match node.children.as_slice() {
                [a, b] => [*a, *b],
                _ => continue,
            };
            let (top, bottom) = if new_flips[real] { (b, a) } else { (a, b) };
            // barycenter(top) > barycenter(bottom), compared exactly.
            if sum[top] * count[bottom] > sum[bottom] * count[top] {
                new_flips[real] = !new_flips[real];
                swaps += 1;
            }
        }
        match fixed {
            FixedSide::Left => self.orientation.right_flips = new_flips,
            FixedSide::Right => self.orientation.left_flips = new_flips,
        }
        self.passes_run += 1;

        let now = count_crossings(self.t, &self.orientation).expect("orientation fits");
        if now < self.best.0 {
            self.best = (now, self.orientation.clone());
        }
        swaps
    }

    /// Alternate fixed sides at the current level until a side change no
    /// longer helps, capped at `max_passes`.
    fn reduce_level(&mut self, max_passes: usize) -> usize {
        let mut total = 0;
        let mut fixed = FixedSide::Left;
        let mut idle = 0;
        for _ in 0..max_passes {
            let swaps = self.barycentric_pass(self.current_level, fixed);
            total += swaps;
            if swaps == 0 {
                idle += 1;
                if idle >= 2 {
                    break;
                }
            } else {
                idle = 0;
            }
            fixed = fixed.other();
        }
        total
    }
}

const MAX_CYCLES: u64 = 8;
const MAX_PASSES_PER_LEVEL: usize = 4;

/// Run collapse-and-expand cycles until the crossing count stops
/// improving (or a full cycle performs no swap), then return the best
/// layout seen, evaluated at the true leaf level.
pub fn hierarchy_sort(t: &Tanglegram) -> SolveResult {
    let start = Instant::now();
    let mut state = HsState::new(t);
    let depth = state.depth();
    if depth >= 1 {
        while state.cycles_run < MAX_CYCLES {
            let best_before = state.best.0;
            let mut cycle_swaps = 0;
            cycle_swaps += state.reduce_level(MAX_PASSES_PER_LEVEL);
            while state.current_level() > 1 {
                state.collapse().expect("above root level");
                cycle_swaps += state.reduce_level(MAX_PASSES_PER_LEVEL);
            }
            while state.current_level() < depth {
                state.expand().expect("below leaf level");
                cycle_swaps += state.reduce_level(MAX_PASSES_PER_LEVEL);
            }
            state.cycles_run += 1;
            if cycle_swaps == 0 || state.best.0 >= best_before {
                break;
            }
        }
    }
    let (crossings, orientation) = state.best;
    SolveResult {
        crossings,
        orientation,
        stats: SolveStats {
            objective: crossings.value(),
            nodes_visited: state.passes_run,
            pruned: 0,
            cycles: state.cycles_run,
            elapsed: start.elapsed(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tangle::Tanglegram;
    use crate::tree::{caterpillar_tree, complete_tree};

    fn labels(n: usize) -> Vec<String> {
        (1..=n).map(|i| i.to_string()).collect()
    }

    #[test]
    fn equal_heights_need_no_dummies() {
        let t = Tanglegram::match_by_labels(
            complete_tree(&labels(8)).unwrap(),
            complete_tree(&labels(8)).unwrap(),
        )
        .unwrap();
        let (l, r) = equalize_depth(&t);
        assert_eq!(l.dummy_count(), 0);
        assert_eq!(r.dummy_count(), 0);
        assert_eq!(l.depth(), 3);
    }

    #[test]
    fn shallow_side_gains_chains() {
        // Left height 2 (complete on 4), right height 4.
        let mut b = crate::tree::TreeBuilder::new();
        let l1 = b.leaf("1");
        let l2 = b.leaf("2");
        let l3 = b.leaf("3");
        let l4 = b.leaf("4");
        let j1 = b.join(l3, l4);
        let j2 = b.join(l2, j1);
        let j3 = b.join(l1, j2);
        let extra = b.leaf("5");
        let root = b.join(extra, j3);
        let right = b.build(root).unwrap();
        assert_eq!(right.height(), 4);

        let mut left_labels = labels(4);
        left_labels.push("5".into());
        let left = caterpillar_tree(&left_labels).unwrap();
        let t = Tanglegram::match_by_labels(left, right).unwrap();
        let (l, r) = equalize_depth(&t);
        assert_eq!(l.depth(), 4);
        for &leaf in t.left().leaves() {
            assert_eq!(l.level(leaf), 4);
        }
        for &leaf in t.right().leaves() {
            assert_eq!(r.level(leaf), 4);
        }
    }

    #[test]
    fn caterpillar_vs_complete_padding() {
        let left = caterpillar_tree(&labels(8)).unwrap(); // height 7
        let right = complete_tree(&labels(8)).unwrap(); // height 3
        let t = Tanglegram::match_by_labels(left, right).unwrap();
        let (l, r) = equalize_depth(&t);
        assert_eq!(l.depth(), 7);
        assert!(l.dummy_count() > 0);
        // Every right leaf sits at depth 3 and needs 4 dummies.
        assert_eq!(r.dummy_count(), 8 * 4);
        for &leaf in t.right().leaves() {
            assert_eq!(r.level(leaf), 7);
            for level in 3..7 {
                let rep = r.representative(leaf, level);
                assert_ne!(rep, leaf);
            }
        }
    }

    #[test]
    fn contraction_restores_structure() {
        let left = caterpillar_tree(&labels(6)).unwrap();
        let right = complete_tree(&labels(8)).unwrap();
        for tree in [&left, &right] {
            let padded = LeveledTree::build(tree, 9);
            assert_eq!(padded.contracted(), *tree);
        }
    }

    #[test]
    fn collapse_expand_bounds() {
        let t = Tanglegram::match_by_labels(
            complete_tree(&labels(8)).unwrap(),
            complete_tree(&labels(8)).unwrap(),
        )
        .unwrap();
        let mut st = HsState::new(&t);
        assert_eq!(st.current_level(), 3);
        assert_eq!(st.expand().unwrap_err(), HierarchyError::ExpandAtLeaves);
        st.collapse().unwrap();
        // One collapse from the leaf level: four working units per tree.
        let (l, _) = st.leveled_trees();
        assert_eq!(l.level_order(2, &st.orientation.left_flips).len(), 4);
        st.collapse().unwrap();
        assert_eq!(st.current_level(), 1);
        assert_eq!(st.collapse().unwrap_err(), HierarchyError::CollapseAtRoot);
        // Full collapse leaves the two units just below each root.
        let (l, _) = st.leveled_trees();
        assert_eq!(l.level_order(1, &st.orientation.left_flips).len(), 2);
        st.expand().unwrap();
        assert_eq!(st.current_level(), 2);
    }

    #[test]
    fn sorted_children_stay_inverted_children_swap() {
        // Left fixed identity; right has its two root blocks swapped, so
        // the root children's barycenters are inverted and must swap.
        let right_labels: Vec<String> = ["3", "4", "1", "2"].map(String::from).into();
        let t = Tanglegram::match_by_labels(
            complete_tree(&labels(4)).unwrap(),
            complete_tree(&right_labels).unwrap(),
        )
        .unwrap();
        let mut st = HsState::new(&t);
        st.collapse().unwrap(); // level 1: the root children
        let swaps = st.barycentric_pass(1, FixedSide::Left);
        assert_eq!(swaps, 1);
        assert!(st.orientation.right_flips[t.right().root()]);

        // A second pass sees sorted barycenters and does nothing.
        let swaps = st.barycentric_pass(1, FixedSide::Left);
        assert_eq!(swaps, 0);
    }

    #[test]
    fn identity_instance_needs_no_swaps() {
        let t = Tanglegram::match_by_labels(
            complete_tree(&labels(8)).unwrap(),
            complete_tree(&labels(8)).unwrap(),
        )
        .unwrap();
        let r = hierarchy_sort(&t);
        assert_eq!(r.crossings.value(), 0);
        assert_eq!(r.stats.objective, 0);
    }

    #[test]
    fn never_worse_than_the_input_drawing() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let mut right = labels(16);
            right.shuffle(&mut rng);
            let t = Tanglegram::match_by_labels(
                complete_tree(&labels(16)).unwrap(),
                complete_tree(&right).unwrap(),
            )
            .unwrap();
            let initial = count_crossings(&t, &Orientation::unflipped(&t)).unwrap();
            let r = hierarchy_sort(&t);
            assert!(r.crossings <= initial);
        }
    }

    #[test]
    fn deterministic_output() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
        let mut right = labels(16);
        right.shuffle(&mut rng);
        let t = Tanglegram::match_by_labels(
            complete_tree(&labels(16)).unwrap(),
            complete_tree(&right).unwrap(),
        )
        .unwrap();
        let a = hierarchy_sort(&t);
        let b = hierarchy_sort(&t);
        assert_eq!(a.orientation, b.orientation);
        assert_eq!(a.crossings, b.crossings);
    }
}
