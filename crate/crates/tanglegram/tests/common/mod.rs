//! Shared fixtures for the integration and acceptance suites.
//!
//! Each test target compiles this module independently and uses a
//! different subset of it.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

use tanglegram::newick::parse_tanglegram;
use tanglegram::tree::{caterpillar_tree, complete_tree, TreeBuilder};
use tanglegram::{BinaryTree, Tanglegram};

pub fn labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

pub fn identity_complete(n: usize) -> Tanglegram {
    Tanglegram::match_by_labels(
        complete_tree(&labels(n)).unwrap(),
        complete_tree(&labels(n)).unwrap(),
    )
    .unwrap()
}

pub fn identity_caterpillar(n: usize) -> Tanglegram {
    Tanglegram::match_by_labels(
        caterpillar_tree(&labels(n)).unwrap(),
        caterpillar_tree(&labels(n)).unwrap(),
    )
    .unwrap()
}

/// Complete pair with an independently shuffled right leaf order.
pub fn shuffled_complete(n: usize, rng: &mut impl Rng) -> Tanglegram {
    let mut right = labels(n);
    right.shuffle(rng);
    Tanglegram::match_by_labels(
        complete_tree(&labels(n)).unwrap(),
        complete_tree(&right).unwrap(),
    )
    .unwrap()
}

fn attach_root_leaf(spine: &BinaryTree, root_leaf: &str) -> BinaryTree {
    fn copy(b: &mut TreeBuilder, tree: &BinaryTree, v: usize) -> usize {
        match tree.children(v) {
            Some([x, y]) => {
                let cx = copy(b, tree, x);
                let cy = copy(b, tree, y);
                b.join(cx, cy)
            }
            None => b.leaf(tree.label(v).unwrap().to_string()),
        }
    }
    let mut b = TreeBuilder::new();
    let leaf = b.leaf(root_leaf.to_string());
    let spine_root = copy(&mut b, spine, spine.root());
    let root = b.join(leaf, spine_root);
    b.build(root).unwrap()
}

/// Caterpillar pair on which the plain recursive split performs badly:
/// each root carries one special leaf directly, the matching special
/// leaf sits at the tail of the other tree's spine, and the numbered
/// leaves run down both spines in the same order. The cheap diagonal
/// split at the roots keeps only the two special edges and strands the
/// whole numbered bundle, while the improved split retains it. The
/// optimum is one crossing (the two special edges must exchange ends).
pub fn skewed_caterpillar_pair(m: usize) -> Tanglegram {
    assert!(m >= 2);
    let mut s_labels = labels(m);
    s_labels.push("y".to_string());
    let mut t_labels = labels(m);
    t_labels.push("x".to_string());
    let left = attach_root_leaf(&caterpillar_tree(&s_labels).unwrap(), "x");
    let right = attach_root_leaf(&caterpillar_tree(&t_labels).unwrap(), "y");
    Tanglegram::match_by_labels(left, right).unwrap()
}

/// Hand-picked unbalanced instance whose hierarchy-sort trajectory goes
/// from 13 crossings to 11 after the first leaf-level pass and ends at
/// 2 after the collapse-and-expand cycles (both trees pad to four
/// levels).
pub fn worked_hierarchy_example() -> Tanglegram {
    parse_tanglegram("((1,((2,3),(6,5))),(4,7));\n(((2,7),((4,3),(5,1))),6);\n").unwrap()
}
