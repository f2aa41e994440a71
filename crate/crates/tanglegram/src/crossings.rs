//! Crossing counters.
//!
//! The crossing number of a layout equals the number of inversions of the
//! permutation mapping each left-leaf position to its partner's position
//! on the right. [`count_crossings`] counts inversions with a Fenwick
//! tree in O(n log n); [`count_crossings_naive`] is the quadratic
//! pairwise oracle the fast path is checked against.

use crate::tangle::{CrossingCount, Orientation, Tanglegram};
use crate::tree::TreeError;

struct Fenwick {
    data: Vec<u64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self {
            data: vec![0; n + 1],
        }
    }

    /// Sum over [0, i].
    fn prefix(&self, mut i: usize) -> u64 {
        let mut s = 0;
        i += 1;
        while i > 0 {
            s += self.data[i];
            i &= i - 1;
        }
        s
    }

    fn add(&mut self, mut i: usize) {
        i += 1;
        while i < self.data.len() {
            self.data[i] += 1;
            i += i & i.wrapping_neg();
        }
    }
}

/// Pairs `i < j` with `perm[i] > perm[j]`.
pub(crate) fn count_inversions(perm: &[usize]) -> u64 {
    let mut fw = Fenwick::new(perm.len());
    let mut inversions = 0;
    for (seen, &v) in perm.iter().enumerate() {
        inversions += seen as u64 - fw.prefix(v);
        fw.add(v);
    }
    inversions
}

/// The left-to-right position permutation induced by an orientation.
pub(crate) fn position_permutation(
    t: &Tanglegram,
    o: &Orientation,
) -> Result<Vec<usize>, TreeError> {
    let left = t.left().leaf_order(&o.left_flips)?;
    let right = t.right().leaf_order(&o.right_flips)?;
    let mut right_pos = vec![0usize; t.right().node_count()];
    for (i, &r) in right.iter().enumerate() {
        right_pos[r] = i;
    }
    Ok(left
        .iter()
        .map(|&l| right_pos[t.matching().right_of(l)])
        .collect())
}

/// Inter-tree edge crossings of the layout encoded by `o`, in O(n log n).
pub fn count_crossings(t: &Tanglegram, o: &Orientation) -> Result<CrossingCount, TreeError> {
    let perm = position_permutation(t, o)?;
    Ok(CrossingCount(count_inversions(&perm)))
}

/// Quadratic oracle: edges (a,b) and (c,d) cross iff
/// `(pos(a) < pos(c)) != (pos(b) < pos(d))`.
pub fn count_crossings_naive(t: &Tanglegram, o: &Orientation) -> Result<CrossingCount, TreeError> {
    let perm = position_permutation(t, o)?;
    let mut crossings = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            // Left positions already satisfy i < j.
            if perm[i] > perm[j] {
                crossings += 1;
            }
        }
    }
    Ok(CrossingCount(crossings))
}
