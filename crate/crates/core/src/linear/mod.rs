//! Exact minimization (and, where tractable, maximization) of modular costs
//! over combinatorial families: cardinality lower bounds, bipartite
//! matchings, s-t paths and spanning trees.
//!
//! For the graph families the ground set is the edge (arc) list and element
//! `e` is `edges[e]`. New families (e.g. s-t cuts) slot in as further
//! [`ConstraintSpec`] variants with a solver, a max-solver or an
//! `Unsupported` answer, and a feasibility check.

mod assignment;
mod graph;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

pub use assignment::min_cost_assignment;
pub use graph::{dijkstra, kruskal, maximum_matching_size, UnionFind};

use crate::cost::WeightVector;
use crate::error::{Error, Result};
use crate::subset::{compensated_sum, Subset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchingMode {
    /// Every vertex on both sides is matched (requires `left == right`).
    Perfect,
    /// Any matching of maximum cardinality.
    MaximumCardinality,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstraintSpec {
    CardinalityLb { ground_size: usize, min_size: usize },
    BipartiteMatching {
        left: usize,
        right: usize,
        edges: Vec<(usize, usize)>,
        mode: MatchingMode,
    },
    ShortestPath {
        vertices: usize,
        arcs: Vec<(usize, usize)>,
        source: usize,
        target: usize,
    },
    SpanningTree { vertices: usize, edges: Vec<(usize, usize)> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasibilityWitness {
    Size(usize),
    /// `(left, right)` vertex pairs.
    Matching(Vec<(usize, usize)>),
    /// Vertex sequence from source to target.
    Path(Vec<usize>),
    Tree(Vec<(usize, usize)>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearSolveResult {
    pub set: Subset,
    pub objective: f64,
    pub witness: FeasibilityWitness,
}

/// Outcome of a maximization request.
#[derive(Clone, Debug, PartialEq)]
pub enum MaxSolve {
    Solved(LinearSolveResult),
    /// Maximization over this family is intractable (longest path).
    Unsupported,
}

impl ConstraintSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ConstraintSpec::CardinalityLb { .. } => "cardinality",
            ConstraintSpec::BipartiteMatching { .. } => "bipartite matching",
            ConstraintSpec::ShortestPath { .. } => "s-t path",
            ConstraintSpec::SpanningTree { .. } => "spanning tree",
        }
    }

    pub fn ground_size(&self) -> usize {
        match self {
            ConstraintSpec::CardinalityLb { ground_size, .. } => *ground_size,
            ConstraintSpec::BipartiteMatching { edges, .. } => edges.len(),
            ConstraintSpec::ShortestPath { arcs, .. } => arcs.len(),
            ConstraintSpec::SpanningTree { edges, .. } => edges.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn simple(edges: &[(usize, usize)], a_max: usize, b_max: usize, directed: bool, bip: bool) -> Result<()> {
            let mut seen = HashSet::new();
            for (i, &(a, b)) in edges.iter().enumerate() {
                if a >= a_max || b >= b_max {
                    return Err(Error::param("edges", format!("edge {i} = ({a}, {b}) has an endpoint out of range")));
                }
                if !bip && a == b {
                    return Err(Error::param("edges", format!("edge {i} is a self loop")));
                }
                let key = if directed || bip { (a, b) } else { (a.min(b), a.max(b)) };
                if !seen.insert(key) {
                    return Err(Error::param("edges", format!("edge {i} duplicates an earlier edge")));
                }
            }
            Ok(())
        }
        match self {
            ConstraintSpec::CardinalityLb { ground_size, .. } => {
                if *ground_size == 0 {
                    return Err(Error::param("ground_size", "must be positive"));
                }
            }
            ConstraintSpec::BipartiteMatching {
                left,
                right,
                edges,
                mode,
            } => {
                simple(edges, *left, *right, true, true)?;
                if *mode == MatchingMode::Perfect && left != right {
                    return Err(Error::param("mode", "perfect matching needs left == right"));
                }
            }
            ConstraintSpec::ShortestPath {
                vertices,
                arcs,
                source,
                target,
            } => {
                simple(arcs, *vertices, *vertices, true, false)?;
                if source >= vertices || target >= vertices {
                    return Err(Error::param("source", "source/target out of range"));
                }
                if source == target {
                    return Err(Error::param("target", "source and target must differ"));
                }
            }
            ConstraintSpec::SpanningTree { vertices, edges } => {
                if *vertices == 0 {
                    return Err(Error::param("vertices", "must be positive"));
                }
                simple(edges, *vertices, *vertices, false, false)?;
            }
        }
        if self.ground_size() == 0 {
            return Err(Error::param("edges", "ground set is empty"));
        }
        Ok(())
    }
}

fn check_dims(constraint: &ConstraintSpec, weights: &WeightVector) -> Result<()> {
    if weights.len() != constraint.ground_size() {
        return Err(Error::param(
            "weights",
            format!(
                "{} weights for a {} ground set of size {}",
                weights.len(),
                constraint.name(),
                constraint.ground_size()
            ),
        ));
    }
    Ok(())
}

fn finish(set: Vec<usize>, weights: &[f64], witness: FeasibilityWitness) -> LinearSolveResult {
    let set = Subset::from_elems(set);
    let objective = compensated_sum(set.iter().map(|e| weights[e]));
    LinearSolveResult { set, objective, witness }
}

/// Exact minimum-weight member of the family.
pub fn solve_linear(constraint: &ConstraintSpec, weights: &WeightVector) -> Result<LinearSolveResult> {
    check_dims(constraint, weights)?;
    solve_raw(constraint, weights.values())
}

/// Same as [`solve_linear`] on an unchecked slice (hot loop of the drivers).
pub(crate) fn solve_raw(constraint: &ConstraintSpec, w: &[f64]) -> Result<LinearSolveResult> {
    match constraint {
        ConstraintSpec::CardinalityLb { ground_size, min_size } => {
            if min_size > ground_size {
                return Err(Error::infeasible(
                    constraint.name(),
                    format!("min size {min_size} exceeds ground set size {ground_size}"),
                ));
            }
            let mut order: Vec<usize> = (0..*ground_size).collect();
            order.sort_by(|&a, &b| w[a].total_cmp(&w[b]).then(a.cmp(&b)));
            order.truncate(*min_size);
            Ok(finish(order, w, FeasibilityWitness::Size(*min_size)))
        }
        ConstraintSpec::BipartiteMatching {
            left,
            right,
            edges,
            mode,
        } => {
            let chosen = matching(*left, *right, edges, w, *mode)?;
            let pairs = chosen.iter().map(|&e| edges[e]).collect();
            Ok(finish(chosen, w, FeasibilityWitness::Matching(pairs)))
        }
        ConstraintSpec::ShortestPath {
            vertices,
            arcs,
            source,
            target,
        } => {
            let path = dijkstra(*vertices, arcs, w, *source, *target).ok_or_else(|| {
                Error::infeasible(constraint.name(), format!("target {target} unreachable from {source}"))
            })?;
            let mut verts = vec![*source];
            verts.extend(path.iter().map(|&a| arcs[a].1));
            Ok(finish(path, w, FeasibilityWitness::Path(verts)))
        }
        ConstraintSpec::SpanningTree { vertices, edges } => {
            let mut order: Vec<usize> = (0..edges.len()).collect();
            order.sort_by(|&a, &b| w[a].total_cmp(&w[b]).then(a.cmp(&b)));
            spanning_tree(constraint, *vertices, edges, &order, w)
        }
    }
}

fn spanning_tree(
    constraint: &ConstraintSpec,
    vertices: usize,
    edges: &[(usize, usize)],
    order: &[usize],
    w: &[f64],
) -> Result<LinearSolveResult> {
    let tree = kruskal(vertices, edges, order)
        .ok_or_else(|| Error::infeasible(constraint.name(), "graph is disconnected"))?;
    let pairs = tree.iter().map(|&e| edges[e]).collect();
    Ok(finish(tree, w, FeasibilityWitness::Tree(pairs)))
}

/// Exact maximum-weight member of the family, where tractable.
pub fn solve_linear_max(constraint: &ConstraintSpec, weights: &WeightVector) -> Result<MaxSolve> {
    check_dims(constraint, weights)?;
    let w = weights.values();
    match constraint {
        ConstraintSpec::CardinalityLb { ground_size, min_size } => {
            if min_size > ground_size {
                return Err(Error::infeasible(constraint.name(), "min size exceeds ground set size"));
            }
            // nonnegative weights and an upward-closed family: V is a maximizer
            Ok(MaxSolve::Solved(finish(
                (0..*ground_size).collect(),
                w,
                FeasibilityWitness::Size(*ground_size),
            )))
        }
        ConstraintSpec::BipartiteMatching {
            left,
            right,
            edges,
            mode,
        } => {
            // all candidate matchings share one cardinality, so a constant shift
            // of the negated weights keeps the argmax
            let top = w.iter().copied().fold(0.0f64, f64::max);
            let flipped: Vec<f64> = w.iter().map(|&x| top - x).collect();
            let chosen = matching(*left, *right, edges, &flipped, *mode)?;
            let pairs = chosen.iter().map(|&e| edges[e]).collect();
            Ok(MaxSolve::Solved(finish(chosen, w, FeasibilityWitness::Matching(pairs))))
        }
        ConstraintSpec::ShortestPath { .. } => Ok(MaxSolve::Unsupported),
        ConstraintSpec::SpanningTree { vertices, edges } => {
            let mut order: Vec<usize> = (0..edges.len()).collect();
            order.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b)));
            spanning_tree(constraint, *vertices, edges, &order, w).map(MaxSolve::Solved)
        }
    }
}

/// Minimum-weight perfect / maximum-cardinality matching; returns edge indices.
fn matching(left: usize, right: usize, edges: &[(usize, usize)], w: &[f64], mode: MatchingMode) -> Result<Vec<usize>> {
    let transpose = left > right;
    let (rows, cols) = if transpose { (right, left) } else { (left, right) };
    // a missing edge costs more than any real matching can differ by
    let big = 2.0 * compensated_sum(w.iter().copied()) + 1.0;
    let mut cost = vec![vec![big; cols]; rows];
    let mut edge_at = vec![vec![usize::MAX; cols]; rows];
    for (e, &(l, r)) in edges.iter().enumerate() {
        let (a, b) = if transpose { (r, l) } else { (l, r) };
        cost[a][b] = w[e];
        edge_at[a][b] = e;
    }
    let assign = min_cost_assignment(&cost);
    let mut chosen: Vec<usize> = assign
        .iter()
        .enumerate()
        .map(|(a, &b)| edge_at[a][b])
        .filter(|&e| e != usize::MAX)
        .collect();
    if mode == MatchingMode::Perfect && chosen.len() < rows {
        return Err(Error::infeasible(
            "bipartite matching",
            format!("no perfect matching exists (best covers {} of {rows})", chosen.len()),
        ));
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Membership test for the family, with per-constraint precomputation
/// (maximum matching size) done once.
#[derive(Clone, Debug)]
pub struct FeasibilityChecker<'a> {
    constraint: &'a ConstraintSpec,
    matching_size: usize,
}

impl<'a> FeasibilityChecker<'a> {
    pub fn new(constraint: &'a ConstraintSpec) -> Self {
        let matching_size = match constraint {
            ConstraintSpec::BipartiteMatching {
                left,
                right,
                edges,
                mode: MatchingMode::MaximumCardinality,
            } => maximum_matching_size(*left, *right, edges),
            ConstraintSpec::BipartiteMatching { left, .. } => *left,
            _ => 0,
        };
        FeasibilityChecker {
            constraint,
            matching_size,
        }
    }

    /// Size every member must have, when the family fixes it.
    pub fn required_size(&self) -> Option<usize> {
        match self.constraint {
            ConstraintSpec::BipartiteMatching { .. } => Some(self.matching_size),
            ConstraintSpec::SpanningTree { vertices, .. } => Some(vertices - 1),
            _ => None,
        }
    }

    pub fn is_feasible(&self, set: &[usize]) -> bool {
        let m = self.constraint.ground_size();
        if set.iter().any(|&e| e >= m) {
            return false;
        }
        match self.constraint {
            ConstraintSpec::CardinalityLb { min_size, .. } => set.len() >= *min_size,
            ConstraintSpec::BipartiteMatching { left, right, edges, .. } => {
                if set.len() != self.matching_size {
                    return false;
                }
                let mut used_l = vec![false; *left];
                let mut used_r = vec![false; *right];
                for &e in set {
                    let (l, r) = edges[e];
                    if used_l[l] || used_r[r] {
                        return false;
                    }
                    used_l[l] = true;
                    used_r[r] = true;
                }
                true
            }
            ConstraintSpec::ShortestPath {
                vertices,
                arcs,
                source,
                target,
            } => {
                let mut out = vec![usize::MAX; *vertices];
                for &a in set {
                    let (u, v) = arcs[a];
                    if out[u] != usize::MAX {
                        return false;
                    }
                    out[u] = v;
                }
                let mut visited = vec![false; *vertices];
                let mut v = *source;
                let mut steps = 0;
                while v != *target {
                    if visited[v] || out[v] == usize::MAX {
                        return false;
                    }
                    visited[v] = true;
                    v = out[v];
                    steps += 1;
                }
                steps == set.len()
            }
            ConstraintSpec::SpanningTree { vertices, edges } => {
                if set.len() + 1 != *vertices {
                    return false;
                }
                let mut uf = UnionFind::new(*vertices);
                set.iter().all(|&e| uf.union(edges[e].0, edges[e].1))
            }
        }
    }
}

/// True iff `set` belongs to the family.
pub fn check_feasible(constraint: &ConstraintSpec, set: &Subset) -> bool {
    FeasibilityChecker::new(constraint).is_feasible(set.as_slice())
}
