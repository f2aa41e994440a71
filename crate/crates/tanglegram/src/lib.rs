//! Binary tanglegram layout.
//!
//! A tanglegram is a pair of rooted binary trees whose leaf sets are in
//! one-to-one correspondence; matched leaves are joined by inter-tree
//! edges. Drawing both trees plane with their leaves on two facing
//! vertical lines, the only freedom is the order in which each inner
//! node's children are stacked, and the quality of a layout is the
//! number of inter-tree edge crossings. This crate provides:
//!
//! - the instance model and crossing counters ([`tangle`], [`crossings`],
//!   [`tree`]),
//! - three heuristics: recursive splitting, its diagonal-split variant
//!   with a branch-and-bound driver ([`recursive`]), and the
//!   collapse-and-expand barycentric heuristic ([`hierarchy`]),
//! - an exact solver built on a quadratic 0/1 formulation plus a
//!   brute-force oracle ([`exact`]),
//! - seeded random instance generators for four families ([`generate`]),
//! - Newick/tanglegram file I/O, SVG rendering and a CSV benchmark
//!   harness ([`newick`], [`svg`], [`mod@bench`]).

pub mod bench;
pub mod crossings;
pub mod exact;
pub mod generate;
pub mod hierarchy;
pub mod newick;
pub mod recursive;
pub mod solver;
pub mod svg;
pub mod tangle;
pub mod tree;

pub use crossings::{count_crossings, count_crossings_naive};
pub use exact::{brute_force, build_qubo, solve_exact, ExactResult, QuboModel};
pub use hierarchy::{equalize_depth, hierarchy_sort, HsState, LeveledTree};
pub use newick::{load_tanglegram, parse_newick, save_tanglegram, write_newick};
pub use recursive::{
    current_level_crossings, edge_class_counts, rec_split, rec_split_bb, rec_split_improved,
    Arrangement, EdgeClassCounts, SubInstance,
};
pub use solver::{SolveResult, SolveStats};
pub use svg::{render_svg, render_svg_to_file};
pub use tangle::{CrossingCount, LeafMatching, Orientation, TangleError, Tanglegram};
pub use tree::{BinaryTree, Node, NodeId, NodeKind, TreeBuilder, TreeError};
