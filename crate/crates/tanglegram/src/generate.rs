//! Seeded random tanglegram generators.
//!
//! Four instance families:
//!   A — pairs of complete binary trees with random leaf orders;
//!   B — two identical complete trees, then a fraction of the leaves of
//!       the second tree swap positions via distance-biased random walks;
//!   C — pairs of general binary trees grown by repeatedly joining two
//!       random set members under a fresh parent;
//!   D — like C, but the second tree is a mutation of the first (leaf
//!       swaps plus subtree reattachments along coin-flip walks).
//!
//! Everything is driven by a caller-seeded ChaCha stream; the serialized
//! instance files, not the raw random stream, are the compatibility
//! contract.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::tangle::Tanglegram;
use crate::tree::{complete_tree, BinaryTree, Node, NodeId, NodeKind, TreeBuilder};

#[derive(Error, Debug, PartialEq, Eq)]
pub enum GenError {
    #[error("set {0:?} needs a power-of-two leaf count, got {1}")]
    NotPowerOfTwo(GenSet, usize),
    #[error("need at least two leaves, got {0}")]
    TooSmall(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenSet {
    A,
    B,
    C,
    D,
}

impl GenSet {
    pub fn name(self) -> &'static str {
        match self {
            GenSet::A => "A",
            GenSet::B => "B",
            GenSet::C => "C",
            GenSet::D => "D",
        }
    }
}

impl std::str::FromStr for GenSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(GenSet::A),
            "B" | "b" => Ok(GenSet::B),
            "C" | "c" => Ok(GenSet::C),
            "D" | "d" => Ok(GenSet::D),
            other => Err(format!("unknown instance set `{other}` (expected A-D)")),
        }
    }
}

/// Generation parameters. The mutation knobs default to the values the
/// families were defined with: 20% leaf swaps for B, 10% swaps plus 25%
/// reattachments for D, and walks that keep climbing with probability
/// 0.75.
#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub set: GenSet,
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    pub swap_fraction: f64,
    pub reattach_fraction: f64,
    pub climb_probability: f64,
}

impl GenConfig {
    pub fn new(set: GenSet, n: usize, count: usize, seed: u64) -> Self {
        Self {
            set,
            n,
            count,
            seed,
            swap_fraction: match set {
                GenSet::B => 0.20,
                GenSet::D => 0.10,
                _ => 0.0,
            },
            reattach_fraction: match set {
                GenSet::D => 0.25,
                _ => 0.0,
            },
            climb_probability: 0.75,
        }
    }
}

fn labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

fn shuffled_labels(n: usize, rng: &mut impl Rng) -> Vec<String> {
    let mut l = labels(n);
    l.shuffle(rng);
    l
}

/// Set A: two complete binary trees with independently shuffled leaf
/// orders; the label matching is then a uniformly random bijection.
pub fn gen_complete_random(n: usize, rng: &mut impl Rng) -> Result<Tanglegram, GenError> {
    if n < 2 {
        return Err(GenError::TooSmall(n));
    }
    if !n.is_power_of_two() {
        return Err(GenError::NotPowerOfTwo(GenSet::A, n));
    }
    let left = complete_tree(&shuffled_labels(n, rng)).expect("power of two");
    let right = complete_tree(&shuffled_labels(n, rng)).expect("power of two");
    Ok(Tanglegram::match_by_labels(left, right).expect("labels agree"))
}

/// Two identical complete trees with aligned leaves: the crossing-free
/// starting point of set B.
pub fn gen_identical_complete(n: usize) -> Result<Tanglegram, GenError> {
    if n < 2 {
        return Err(GenError::TooSmall(n));
    }
    if !n.is_power_of_two() {
        return Err(GenError::NotPowerOfTwo(GenSet::B, n));
    }
    let left = complete_tree(&labels(n)).expect("power of two");
    let right = complete_tree(&labels(n)).expect("power of two");
    Ok(Tanglegram::match_by_labels(left, right).expect("labels agree"))
}

/// Random walk used by the leaf-swap mutation: climb from `start` toward
/// the root, continuing with `climb_probability` per step (stopping early
/// at the root), then descend by fair coin flips to a leaf. Nearby leaves
/// are reached more often than distant ones.
fn walk_to_leaf(
    tree: &BinaryTree,
    start: NodeId,
    climb_probability: f64,
    rng: &mut impl Rng,
) -> NodeId {
    let mut v = start;
    while v != tree.root() && rng.random_bool(climb_probability) {
        v = tree.parent(v).expect("non-root has a parent");
    }
    while let Some([a, b]) = tree.children(v) {
        v = if rng.random_bool(0.5) { b } else { a };
    }
    v
}

/// Set B mutation: perform `floor(fraction * n)` swap operations on the
/// right tree. Each operation picks a leaf uniformly, walks to a second
/// leaf, and exchanges the two leaves' positions (their labels, hence
/// their matching targets). Walks ending where they started are no-ops,
/// so the realized number of displaced leaves is at most the budget.
pub fn mutate_leaf_swaps(t: &Tanglegram, fraction: f64, rng: &mut impl Rng) -> Tanglegram {
    mutate_leaf_swaps_with(t, fraction, 0.75, rng)
}

pub fn mutate_leaf_swaps_with(
    t: &Tanglegram,
    fraction: f64,
    climb_probability: f64,
    rng: &mut impl Rng,
) -> Tanglegram {
    let n = t.leaf_count();
    let budget = (fraction * n as f64).floor() as usize;
    let mut right = t.right().clone();
    let leaves: Vec<NodeId> = right.leaves().to_vec();
    for _ in 0..budget {
        let first = leaves[rng.random_range(0..leaves.len())];
        let second = walk_to_leaf(&right, first, climb_probability, rng);
        right
            .swap_leaf_labels(first, second)
            .expect("both are leaves");
    }
    Tanglegram::match_by_labels(t.left().clone(), right).expect("labels agree")
}

/// Set C: each tree grows from `n` singletons by repeatedly joining two
/// uniformly random distinct set members under a new parent.
pub fn gen_general_random(n: usize, rng: &mut impl Rng) -> Result<Tanglegram, GenError> {
    if n < 2 {
        return Err(GenError::TooSmall(n));
    }
    let left = random_join_tree(&shuffled_labels(n, rng), rng);
    let right = random_join_tree(&shuffled_labels(n, rng), rng);
    Ok(Tanglegram::match_by_labels(left, right).expect("labels agree"))
}

fn random_join_tree(leaf_labels: &[String], rng: &mut impl Rng) -> BinaryTree {
    let mut b = TreeBuilder::new();
    let mut pool: Vec<NodeId> = leaf_labels.iter().map(|l| b.leaf(l.clone())).collect();
    while pool.len() > 1 {
        let first = pool.swap_remove(rng.random_range(0..pool.len()));
        let second = pool.swap_remove(rng.random_range(0..pool.len()));
        pool.push(b.join(first, second));
    }
    let root = pool[0];
    b.build(root).expect("join process yields a valid tree")
}

/// Editable tree used by the reattachment surgery. Dead slots stay in
/// place until the final rebuild so ids remain stable mid-mutation.
struct EditTree {
    parent: Vec<Option<usize>>,
    children: Vec<Option<[usize; 2]>>,
    label: Vec<Option<String>>,
    root: usize,
}

impl EditTree {
    fn from_tree(tree: &BinaryTree) -> Self {
        Self {
            parent: (0..tree.node_count()).map(|v| tree.parent(v)).collect(),
            children: (0..tree.node_count()).map(|v| tree.children(v)).collect(),
            label: (0..tree.node_count())
                .map(|v| tree.label(v).map(str::to_string))
                .collect(),
            root: tree.root(),
        }
    }

    fn is_descendant_or_self(&self, v: usize, anc: usize) -> bool {
        let mut cur = v;
        loop {
            if cur == anc {
                return true;
            }
            match self.parent[cur] {
                Some(p) => cur = p,
                None => return false,
            }
        }
    }

    fn replace_child(&mut self, parent: usize, old: usize, new: usize) {
        let slots = self.children[parent].as_mut().expect("internal node");
        let slot = slots.iter().position(|&c| c == old).expect("child present");
        slots[slot] = new;
    }

    /// Detach the subtree at `v`, suppressing the unary parent. Returns
    /// (suppressed parent, sibling that took its place).
    fn detach(&mut self, v: usize) -> (usize, usize) {
        let p = self.parent[v].expect("non-root subtree");
        let [a, b] = self.children[p].expect("parent is internal");
        let sibling = if a == v { b } else { a };
        match self.parent[p] {
            Some(g) => {
                self.replace_child(g, p, sibling);
                self.parent[sibling] = Some(g);
            }
            None => {
                self.parent[sibling] = None;
                self.root = sibling;
            }
        }
        self.parent[v] = None;
        self.children[p] = None; // dead slot
        self.label[p] = None;
        (p, sibling)
    }

    /// Reattach the detached subtree `v` by subdividing the edge above
    /// `target` with a fresh binary node (`target` may be the root, which
    /// puts the new node on top).
    fn attach_above(&mut self, v: usize, target: usize, v_on_top: bool, dead: usize) {
        // Reuse the suppressed parent's slot for the new node.
        let m = dead;
        self.children[m] = Some(if v_on_top { [v, target] } else { [target, v] });
        match self.parent[target] {
            Some(p) => {
                self.replace_child(p, target, m);
                self.parent[m] = Some(p);
            }
            None => {
                self.parent[m] = None;
                self.root = m;
            }
        }
        self.parent[target] = Some(m);
        self.parent[v] = Some(m);
    }

    /// Compact live nodes into a fresh `BinaryTree`.
    fn rebuild(&self) -> BinaryTree {
        let mut remap = vec![usize::MAX; self.parent.len()];
        let mut order = Vec::new();
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            remap[v] = order.len();
            order.push(v);
            if let Some([a, b]) = self.children[v] {
                stack.push(b);
                stack.push(a);
            }
        }
        let nodes: Vec<Node> = order
            .iter()
            .map(|&v| Node {
                parent: self.parent[v].map(|p| remap[p]),
                kind: match self.children[v] {
                    Some([a, b]) => NodeKind::Internal {
                        children: [remap[a], remap[b]],
                    },
                    None => NodeKind::Leaf {
                        label: self.label[v].clone().expect("live leaf has a label"),
                    },
                },
            })
            .collect();
        BinaryTree::new(nodes, remap[self.root]).expect("surgery keeps the tree valid")
    }
}

const REATTACH_RETRIES: usize = 16;

/// Set D mutation: `floor(swap_fraction * n)` leaf swaps followed by
/// `floor(reattach_fraction * (n - 1))` subtree reattachments on the
/// right tree. A reattachment detaches a uniformly random non-root
/// subtree and walks from its old position (continue with the climb
/// probability, pick a child edge by coin) to the edge that gets
/// subdivided; walks that end inside the moving subtree are redrawn a
/// bounded number of times, then the operation is skipped.
pub fn mutate_general(
    t: &Tanglegram,
    swap_fraction: f64,
    reattach_fraction: f64,
    rng: &mut impl Rng,
) -> Tanglegram {
    mutate_general_with(t, swap_fraction, reattach_fraction, 0.75, rng)
}

pub fn mutate_general_with(
    t: &Tanglegram,
    swap_fraction: f64,
    reattach_fraction: f64,
    climb_probability: f64,
    rng: &mut impl Rng,
) -> Tanglegram {
    let n = t.leaf_count();
    let swapped = mutate_leaf_swaps_with(t, swap_fraction, climb_probability, rng);
    let reattachments = (reattach_fraction * (n - 1) as f64).floor() as usize;
    if reattachments == 0 {
        return swapped;
    }

    let mut edit = EditTree::from_tree(swapped.right());
    for _ in 0..reattachments {
        // Uniform non-root live subtree.
        let candidates: Vec<usize> = (0..edit.parent.len())
            .filter(|&v| edit.parent[v].is_some())
            .collect();
        if candidates.is_empty() {
            break;
        }
        let v = candidates[rng.random_range(0..candidates.len())];
        let old_parent = edit.parent[v].expect("candidate is non-root");

        // Walk on the tree with the subtree still attached; targets
        // inside the moving subtree force a redraw.
        let mut target = None;
        for _ in 0..REATTACH_RETRIES {
            let mut cur = old_parent;
            while rng.random_bool(climb_probability) {
                match edit.children[cur] {
                    Some([a, b]) => cur = if rng.random_bool(0.5) { b } else { a },
                    None => break,
                }
            }
            if !edit.is_descendant_or_self(cur, v) {
                target = Some(cur);
                break;
            }
        }
        let Some(mut target) = target else {
            continue; // retries exhausted, skip this operation
        };

        let (dead, sibling) = edit.detach(v);
        if target == dead {
            // The walked-to edge merged into the sibling edge.
            target = sibling;
        }
        let v_on_top = rng.random_bool(0.5);
        edit.attach_above(v, target, v_on_top, dead);
    }
    let right = edit.rebuild();
    Tanglegram::match_by_labels(swapped.left().clone(), right).expect("labels agree")
}

/// Generate `config.count` instances of the configured family.
pub fn gen_set(config: &GenConfig) -> Result<Vec<Tanglegram>, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = Vec::with_capacity(config.count);
    for _ in 0..config.count {
        out.push(gen_instance(config, &mut rng)?);
    }
    Ok(out)
}

fn gen_instance(config: &GenConfig, rng: &mut ChaCha8Rng) -> Result<Tanglegram, GenError> {
    match config.set {
        GenSet::A => gen_complete_random(config.n, rng),
        GenSet::B => {
            let base = gen_identical_complete(config.n)?;
            Ok(mutate_leaf_swaps_with(
                &base,
                config.swap_fraction,
                config.climb_probability,
                rng,
            ))
        }
        GenSet::C => gen_general_random(config.n, rng),
        GenSet::D => {
            if config.n < 2 {
                return Err(GenError::TooSmall(config.n));
            }
            let left = random_join_tree(&shuffled_labels(config.n, rng), rng);
            let right = left.clone();
            let base = Tanglegram::match_by_labels(left, right).expect("labels agree");
            Ok(mutate_general_with(
                &base,
                config.swap_fraction,
                config.reattach_fraction,
                config.climb_probability,
                rng,
            ))
        }
    }
}
