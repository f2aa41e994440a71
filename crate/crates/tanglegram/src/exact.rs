//! Exact crossing minimization.
//!
//! One binary variable per inner node of either tree encodes whether that
//! node's children swap relative to the input drawing. For any two
//! matching edges the pair's crossing state in a candidate layout depends
//! only on the flip bits of the two lowest common ancestors (one per
//! tree): the state toggles exactly when one of the two bits is set.
//! Summing the resulting pair terms gives an unconstrained quadratic
//! 0/1 objective whose value equals the crossing count, solved here by
//! depth-first branch and bound with a term-wise lower bound.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::crossings::count_crossings;
use crate::tangle::{CrossingCount, Orientation, Tanglegram};
use crate::tree::NodeId;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum ExactError {
    #[error("assignment covers {got} variables, model has {want}")]
    IncompleteAssignment { got: usize, want: usize },
    #[error("instance has {got} internal nodes, brute force is capped at {cap}")]
    TooLarge { got: usize, cap: usize },
}

/// Quadratic 0/1 objective whose value equals the crossing count of the
/// orientation encoded by its variables. Variables 0..left_vars are the
/// inner nodes of the left tree in id order, the rest the inner nodes of
/// the right tree; quadratic terms only ever couple one variable per
/// side.
///
/// The objective is a sum of per-ancestor-pair terms: the pair (v, w)
/// collects `cross` edge pairs that cross in the input drawing and `non`
/// pairs that do not, and contributes `cross` when the two bits agree
/// and `non` when they differ. The solver bounds on those terms; the
/// expanded constant/linear/quadratic coefficients are the same sum.
#[derive(Debug, Clone)]
pub struct QuboModel {
    constant: i64,
    linear: Vec<i64>,
    /// Dense left-by-right coefficient matrix.
    quadratic: Vec<i64>,
    /// Per (left var, right var): edge pairs crossing in the reference.
    cross_pairs: Vec<u32>,
    /// Per (left var, right var): edge pairs not crossing there.
    non_pairs: Vec<u32>,
    left_vars: Vec<NodeId>,
    right_vars: Vec<NodeId>,
    left_nodes: usize,
    right_nodes: usize,
}

impl QuboModel {
    pub fn num_vars(&self) -> usize {
        self.left_vars.len() + self.right_vars.len()
    }

    pub fn constant(&self) -> i64 {
        self.constant
    }

    fn quad(&self, li: usize, rj: usize) -> i64 {
        self.quadratic[li * self.right_vars.len() + rj]
    }

    /// Objective value of a complete assignment.
    pub fn evaluate(&self, assignment: &[bool]) -> Result<i64, ExactError> {
        if assignment.len() != self.num_vars() {
            return Err(ExactError::IncompleteAssignment {
                got: assignment.len(),
                want: self.num_vars(),
            });
        }
        let nl = self.left_vars.len();
        let mut value = self.constant;
        for (i, &set) in assignment.iter().enumerate() {
            if set {
                value += self.linear[i];
            }
        }
        for li in 0..nl {
            if !assignment[li] {
                continue;
            }
            for rj in 0..self.right_vars.len() {
                if assignment[nl + rj] {
                    value += self.quad(li, rj);
                }
            }
        }
        Ok(value)
    }

    pub fn orientation_to_assignment(&self, o: &Orientation) -> Vec<bool> {
        self.left_vars
            .iter()
            .map(|&v| o.left_flips[v])
            .chain(self.right_vars.iter().map(|&v| o.right_flips[v]))
            .collect()
    }

    pub fn assignment_to_orientation(&self, assignment: &[bool]) -> Orientation {
        let mut o = Orientation {
            left_flips: vec![false; self.left_nodes],
            right_flips: vec![false; self.right_nodes],
        };
        for (i, &v) in self.left_vars.iter().enumerate() {
            o.left_flips[v] = assignment[i];
        }
        let nl = self.left_vars.len();
        for (j, &v) in self.right_vars.iter().enumerate() {
            o.right_flips[v] = assignment[nl + j];
        }
        o
    }
}

/// All-pairs leaf LCA table for one tree, indexed by leaf rank.
fn leaf_lca_table(tree: &crate::tree::BinaryTree) -> (Vec<usize>, Vec<NodeId>) {
    let n = tree.leaf_count();
    let mut leaf_rank = vec![usize::MAX; tree.node_count()];
    for (i, &l) in tree.leaves().iter().enumerate() {
        leaf_rank[l] = i;
    }
    let mut lca = vec![0 as NodeId; n * n];
    for (i, &l) in tree.leaves().iter().enumerate() {
        lca[i * n + i] = l;
    }
    for v in tree.internal_nodes() {
        let [a, b] = tree.children(v).expect("internal node");
        let left_leaves = tree.subtree_leaves(a).expect("valid node");
        let right_leaves = tree.subtree_leaves(b).expect("valid node");
        for &x in &left_leaves {
            for &y in &right_leaves {
                let (xi, yi) = (leaf_rank[x], leaf_rank[y]);
                lca[xi * n + yi] = v;
                lca[yi * n + xi] = v;
            }
        }
    }
    (leaf_rank, lca)
}

/// Assemble the quadratic objective for a tanglegram. Pairs that cross in
/// the input drawing contribute `1 - x_v - x_w + 2 x_v x_w` (they stay
/// crossed iff both or neither ancestor flips); pairs that do not cross
/// contribute `x_v + x_w - 2 x_v x_w`.
pub fn build_qubo(t: &Tanglegram) -> QuboModel {
    let left_vars: Vec<NodeId> = t.left().internal_nodes().collect();
    let right_vars: Vec<NodeId> = t.right().internal_nodes().collect();
    let mut left_var_of = vec![usize::MAX; t.left().node_count()];
    for (i, &v) in left_vars.iter().enumerate() {
        left_var_of[v] = i;
    }
    let mut right_var_of = vec![usize::MAX; t.right().node_count()];
    for (j, &v) in right_vars.iter().enumerate() {
        right_var_of[v] = j;
    }

    let (left_rank, left_lca) = leaf_lca_table(t.left());
    let (right_rank, right_lca) = leaf_lca_table(t.right());
    let n = t.leaf_count();

    // Positions in the input drawing.
    let reference = Orientation::unflipped(t);
    let left_order = t.left().leaf_order(&reference.left_flips).expect("fits");
    let right_order = t.right().leaf_order(&reference.right_flips).expect("fits");
    let mut lpos = vec![0usize; t.left().node_count()];
    for (i, &l) in left_order.iter().enumerate() {
        lpos[l] = i;
    }
    let mut rpos = vec![0usize; t.right().node_count()];
    for (i, &r) in right_order.iter().enumerate() {
        rpos[r] = i;
    }

    let nl = left_vars.len();
    let nr = right_vars.len();
    let mut model = QuboModel {
        constant: 0,
        linear: vec![0; nl + nr],
        quadratic: vec![0; nl * nr],
        cross_pairs: vec![0; nl * nr],
        non_pairs: vec![0; nl * nr],
        left_vars,
        right_vars,
        left_nodes: t.left().node_count(),
        right_nodes: t.right().node_count(),
    };

    let pairs = t.matching().pairs();
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let (a, b) = pairs[i];
            let (c, d) = pairs[j];
            let v = left_lca[left_rank[a] * n + left_rank[c]];
            let w = right_lca[right_rank[b] * n + right_rank[d]];
            let vi = left_var_of[v];
            let wj = right_var_of[w];
            debug_assert!(vi != usize::MAX && wj != usize::MAX);
            let crossing = (lpos[a] < lpos[c]) != (rpos[b] < rpos[d]);
            if crossing {
                model.constant += 1;
                model.linear[vi] -= 1;
                model.linear[nl + wj] -= 1;
                model.quadratic[vi * nr + wj] += 2;
                model.cross_pairs[vi * nr + wj] += 1;
            } else {
                model.linear[vi] += 1;
                model.linear[nl + wj] += 1;
                model.quadratic[vi * nr + wj] -= 2;
                model.non_pairs[vi * nr + wj] += 1;
            }
        }
    }
    model
}

/// Result of an exact solve. `proved_optimal` is false only when a time
/// limit cut the search short, in which case `optimum` is the incumbent.
#[derive(Debug, Clone)]
pub struct ExactResult {
    pub optimum: CrossingCount,
    pub orientation: Orientation,
    pub proved_optimal: bool,
    pub nodes_explored: u64,
    pub elapsed: Duration,
}

pub const BRUTE_FORCE_CAP: usize = 24;

/// Exhaustive enumeration of every orientation, counting crossings with
/// the core counter. Independent of the quadratic model on purpose: this
/// is the oracle the exact solver is checked against.
pub fn brute_force(t: &Tanglegram) -> Result<ExactResult, ExactError> {
    brute_force_capped(t, BRUTE_FORCE_CAP)
}

pub fn brute_force_capped(t: &Tanglegram, cap: usize) -> Result<ExactResult, ExactError> {
    let start = Instant::now();
    let left_vars: Vec<NodeId> = t.left().internal_nodes().collect();
    let right_vars: Vec<NodeId> = t.right().internal_nodes().collect();
    let k = left_vars.len() + right_vars.len();
    if k > cap {
        return Err(ExactError::TooLarge { got: k, cap });
    }

    let mut o = Orientation::unflipped(t);
    let mut best_value = u64::MAX;
    let mut best = o.clone();
    let mut left_buf = Vec::new();
    let mut right_buf = Vec::new();
    let mut right_pos = vec![0usize; t.right().node_count()];
    let mut perm = vec![0usize; t.leaf_count()];
    for mask in 0u64..(1u64 << k) {
        for (i, &v) in left_vars.iter().enumerate() {
            o.left_flips[v] = mask >> i & 1 == 1;
        }
        for (j, &v) in right_vars.iter().enumerate() {
            o.right_flips[v] = mask >> (left_vars.len() + j) & 1 == 1;
        }
        t.left()
            .leaf_order_into(&o.left_flips, &mut left_buf)
            .expect("fits");
        t.right()
            .leaf_order_into(&o.right_flips, &mut right_buf)
            .expect("fits");
        for (i, &r) in right_buf.iter().enumerate() {
            right_pos[r] = i;
        }
        for (i, &l) in left_buf.iter().enumerate() {
            perm[i] = right_pos[t.matching().right_of(l)];
        }
        let value = crate::crossings::count_inversions(&perm);
        if value < best_value {
            best_value = value;
            best = o.clone();
        }
    }
    Ok(ExactResult {
        optimum: CrossingCount(best_value),
        orientation: best,
        proved_optimal: true,
        nodes_explored: 1u64 << k,
        elapsed: start.elapsed(),
    })
}

struct Search<'a> {
    model: &'a QuboModel,
    /// Variable indices in descending total absolute coefficient mass.
    order: Vec<usize>,
    assigned: Vec<Option<bool>>,
    /// Sum of the pair terms with both endpoints assigned.
    fixed_value: u64,
    /// Sum of min(cross, non) over pair terms still undetermined; every
    /// pair term is non-negative, so this is their cheapest completion.
    pending_min: u64,
    incumbent_value: u64,
    incumbent: Vec<bool>,
    nodes: u64,
    pruned: u64,
    deadline: Option<Instant>,
    timed_out: bool,
}

impl<'a> Search<'a> {
    fn new(model: &'a QuboModel, incumbent: Vec<bool>, incumbent_value: u64) -> Self {
        let k = model.num_vars();
        let nl = model.left_vars.len();
        let nr = model.right_vars.len();
        let mut mass: Vec<i64> = model.linear.iter().map(|&l| l.abs()).collect();
        debug_assert_eq!(mass.len(), k);
        for li in 0..nl {
            for rj in 0..nr {
                let q = model.quad(li, rj).abs();
                mass[li] += q;
                mass[nl + rj] += q;
            }
        }
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(mass[i]));

        let pending_min = model
            .cross_pairs
            .iter()
            .zip(&model.non_pairs)
            .map(|(&c, &n)| c.min(n) as u64)
            .sum();
        Self {
            model,
            order,
            assigned: vec![None; k],
            fixed_value: 0,
            pending_min,
            incumbent_value,
            incumbent,
            nodes: 0,
            pruned: 0,
            deadline: None,
            timed_out: false,
        }
    }

    fn bound(&self) -> u64 {
        self.fixed_value + self.pending_min
    }

    /// Pair term value once both bits are known: agreeing bits keep the
    /// reference crossing state.
    #[inline]
    fn pair_value(&self, idx: usize, agree: bool) -> u64 {
        if agree {
            self.model.cross_pairs[idx] as u64
        } else {
            self.model.non_pairs[idx] as u64
        }
    }

    #[inline]
    fn pair_min(&self, idx: usize) -> u64 {
        self.model.cross_pairs[idx].min(self.model.non_pairs[idx]) as u64
    }

    /// Settled-pair cost of assigning `value` to variable `i`, i.e. the
    /// sum of the pair terms it completes.
    fn settle_cost(&self, i: usize, value: bool) -> u64 {
        let nl = self.model.left_vars.len();
        let nr = self.model.right_vars.len();
        let mut cost = 0;
        if i < nl {
            for rj in 0..nr {
                if let Some(other) = self.assigned[nl + rj] {
                    cost += self.pair_value(i * nr + rj, value == other);
                }
            }
        } else {
            let rj = i - nl;
            for li in 0..nl {
                if let Some(other) = self.assigned[li] {
                    cost += self.pair_value(li * nr + rj, value == other);
                }
            }
        }
        cost
    }

    /// Pending-bound mass of the pairs that assigning `i` settles.
    fn settle_min(&self, i: usize) -> u64 {
        let nl = self.model.left_vars.len();
        let nr = self.model.right_vars.len();
        let mut min_sum = 0;
        if i < nl {
            for rj in 0..nr {
                if self.assigned[nl + rj].is_some() {
                    min_sum += self.pair_min(i * nr + rj);
                }
            }
        } else {
            let rj = i - nl;
            for li in 0..nl {
                if self.assigned[li].is_some() {
                    min_sum += self.pair_min(li * nr + rj);
                }
            }
        }
        min_sum
    }

    fn dfs(&mut self, pos: usize) {
        if self.timed_out {
            return;
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(4096) {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    self.timed_out = true;
                    return;
                }
            }
        }
        if pos == self.order.len() {
            if self.fixed_value < self.incumbent_value {
                self.incumbent_value = self.fixed_value;
                for (slot, v) in self.incumbent.iter_mut().zip(&self.assigned) {
                    *slot = v.expect("complete assignment");
                }
            }
            return;
        }
        let i = self.order[pos];
        let settle_min = self.settle_min(i);
        let cost0 = self.settle_cost(i, false);
        // Mirroring every bit preserves the objective, so the first
        // branch variable can be pinned to zero without losing any value;
        // for the rest, try the cheaper completion side first.
        let (first, second) = if pos == 0 {
            ((false, cost0), None)
        } else {
            let cost1 = self.settle_cost(i, true);
            if cost1 < cost0 {
                ((true, cost1), Some((false, cost0)))
            } else {
                ((false, cost0), Some((true, cost1)))
            }
        };
        for (value, cost) in std::iter::once(first).chain(second) {
            self.assigned[i] = Some(value);
            self.fixed_value += cost;
            self.pending_min -= settle_min;
            if self.bound() < self.incumbent_value {
                self.dfs(pos + 1);
            } else {
                self.pruned += 1;
            }
            self.pending_min += settle_min;
            self.fixed_value -= cost;
            self.assigned[i] = None;
            if self.timed_out {
                return;
            }
        }
    }
}

/// Exact branch and bound over the quadratic model. The incumbent is
/// seeded from `warm_start` when given (callers pass the best heuristic
/// orientation). On hitting the time limit the incumbent is returned
/// with `proved_optimal == false`.
pub fn solve_exact(
    t: &Tanglegram,
    time_limit: Option<Duration>,
    warm_start: Option<&Orientation>,
) -> ExactResult {
    let start = Instant::now();
    let model = build_qubo(t);

    // Reference drawing as the default incumbent.
    let mut incumbent = vec![false; model.num_vars()];
    let mut incumbent_value = model.constant as u64;
    if let Some(o) = warm_start {
        let assignment = model.orientation_to_assignment(o);
        let value = model.evaluate(&assignment).expect("assignment is complete");
        debug_assert!(value >= 0);
        if (value as u64) < incumbent_value {
            incumbent = assignment;
            incumbent_value = value as u64;
        }
    }

    let mut search = Search::new(&model, incumbent, incumbent_value);
    search.deadline = time_limit.map(|d| start + d);
    search.dfs(0);

    let orientation = search.model.assignment_to_orientation(&search.incumbent);
    debug_assert_eq!(
        count_crossings(t, &orientation).expect("fits").value(),
        search.incumbent_value,
    );
    ExactResult {
        optimum: CrossingCount(search.incumbent_value),
        orientation,
        proved_optimal: !search.timed_out,
        nodes_explored: search.nodes,
        elapsed: start.elapsed(),
    }
}
