//! Shared result types for the heuristic solvers.

use std::time::Duration;

use crate::tangle::{CrossingCount, Orientation};

/// Per-solve counters. `objective` is the solver's own view of the
/// crossing count; it ignores interactions the algorithm drops and must
/// never be reported as the layout quality.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Solver-internal objective value.
    pub objective: u64,
    /// Recursion nodes or barycentric passes, depending on the solver.
    pub nodes_visited: u64,
    /// Branches discarded by bounding.
    pub pruned: u64,
    /// Collapse-and-expand cycles (hierarchy sort only).
    pub cycles: u64,
    pub elapsed: Duration,
}

/// Outcome of a heuristic solve. `crossings` is always recomputed from
/// the returned orientation by the core crossing counter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub crossings: CrossingCount,
    pub orientation: Orientation,
    pub stats: SolveStats,
}
