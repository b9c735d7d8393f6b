//! Treedepth colorings: verification and the pluggable coloring provider.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::base::{ColorSet, VertexId};
use crate::graph::treedepth::{treedepth_exact, TREEDEPTH_EXHAUSTIVE_CAP};
use crate::graph::{decomposition_forest, GraphError, LabeledGraph};

/// A `(p, palette)`-treedepth coloring: every union of at most `p` color
/// classes induces a subgraph of treedepth at most the number of classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreedepthColoring {
    pub p: u32,
    pub palette: u32,
    pub color: BTreeMap<VertexId, u32>,
}

impl TreedepthColoring {
    pub fn color_of(&self, v: VertexId) -> u32 {
        self.color[&v]
    }

    /// Vertices colored within `u`.
    pub fn class(&self, u: ColorSet) -> std::collections::BTreeSet<VertexId> {
        self.color
            .iter()
            .filter(|(_, &c)| u.contains(c))
            .map(|(&v, _)| v)
            .collect()
    }

    /// The synthetic round cost charged for producing this coloring in a
    /// simulated run: `c_color * ceil(log2 n)`.
    pub fn simulated_round_cost(n: usize) -> u32 {
        C_COLOR * (usize::BITS - n.max(1).next_power_of_two().leading_zeros()).max(1)
    }
}

/// Constant factor of the provider's declared O(log n) round cost.
pub const C_COLOR: u32 = 4;

/// How the provider should obtain a coloring.
#[derive(Debug, Clone)]
pub enum ColoringStrategy {
    /// Minimize the palette by exhaustive search (small n only).
    Exhaustive,
    /// Construct a coloring that is valid by construction (forest depth
    /// classes, or treedepth-witness depth classes), then verify when small.
    Greedy,
    /// Use the given coloring, verified before acceptance.
    User(TreedepthColoring),
}

/// Verifies the treedepth-coloring invariant exhaustively: for every
/// `U ⊆ [palette]` with `|U| ≤ p`, `treedepth(G[U]) ≤ |U|`.
pub fn verify_treedepth_coloring(
    graph: &LabeledGraph,
    coloring: &TreedepthColoring,
    p: u32,
) -> Result<bool, GraphError> {
    if graph.n() > TREEDEPTH_EXHAUSTIVE_CAP {
        return Err(GraphError::SizeLimit(format!(
            "verification needs treedepth_exact; capped at {TREEDEPTH_EXHAUSTIVE_CAP} vertices"
        )));
    }
    for v in graph.vertices() {
        if !coloring.color.contains_key(&v) {
            return Ok(false);
        }
    }
    for u in ColorSet::subsets_up_to(coloring.palette, p) {
        let class = graph.color_class(&coloring.color, u);
        if class.is_empty() {
            continue;
        }
        let sub = graph.induced(&class);
        let (t, _) = treedepth_exact(&sub)?;
        if t > u.len() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Produces a verified `(p, palette)`-treedepth coloring.
///
/// The exhaustive strategy minimizes the palette; the greedy strategy uses a
/// construction that is valid by construction and verifies it on small
/// inputs; user colorings are verified before being accepted.
pub fn coloring_provider(
    graph: &LabeledGraph,
    p: u32,
    strategy: &ColoringStrategy,
) -> Result<TreedepthColoring, GraphError> {
    match strategy {
        ColoringStrategy::User(c) => {
            let mut c = c.clone();
            c.p = p;
            if graph.n() <= TREEDEPTH_EXHAUSTIVE_CAP && !verify_treedepth_coloring(graph, &c, p)? {
                return Err(GraphError::HeuristicFailed);
            }
            Ok(c)
        }
        ColoringStrategy::Greedy => {
            let c = greedy_coloring(graph, p)?;
            if graph.n() <= 10 && !verify_treedepth_coloring(graph, &c, p)? {
                return Err(GraphError::HeuristicFailed);
            }
            Ok(c)
        }
        ColoringStrategy::Exhaustive => exhaustive_coloring(graph, p),
    }
}

/// Depth classes of a treedepth witness form a `(p, t)`-treedepth coloring
/// for every `p`: restricting the witness to at most `j` depth classes
/// leaves a cover forest with at most `j` levels.
fn greedy_coloring(graph: &LabeledGraph, p: u32) -> Result<TreedepthColoring, GraphError> {
    let is_forest = graph.m() + graph.components().len() == graph.n();
    if is_forest {
        // the DFS forest of a forest is the forest itself; depth mod (p+1)
        // keeps every selected run of levels shorter than |U|+1
        let f = decomposition_forest(graph);
        let color: BTreeMap<VertexId, u32> = graph
            .vertices()
            .map(|v| (v, f.depth(v).unwrap() % (p + 1) + 1))
            .collect();
        let palette = color.values().copied().max().unwrap_or(1);
        return Ok(TreedepthColoring { p, palette, color });
    }
    if graph.n() > TREEDEPTH_EXHAUSTIVE_CAP {
        return Err(GraphError::SizeLimit(
            "greedy coloring of non-forests needs an exact treedepth witness".into(),
        ));
    }
    let (t, witness) = treedepth_exact(graph)?;
    let color: BTreeMap<VertexId, u32> = graph
        .vertices()
        .map(|v| (v, witness.depth(v).unwrap() + 1))
        .collect();
    Ok(TreedepthColoring { p, palette: t, color })
}

/// Finds a minimum-palette coloring by backtracking over palette sizes.
fn exhaustive_coloring(graph: &LabeledGraph, p: u32) -> Result<TreedepthColoring, GraphError> {
    if graph.n() > 10 {
        return Err(GraphError::SizeLimit(
            "exhaustive coloring search is capped at 10 vertices".into(),
        ));
    }
    let verts = graph.vertex_vec();
    for palette in 1..=(graph.n() as u32) {
        let mut assignment: BTreeMap<VertexId, u32> = BTreeMap::new();
        if try_color(graph, &verts, 0, palette, p, &mut assignment)? {
            return Ok(TreedepthColoring {
                p,
                palette,
                color: assignment,
            });
        }
    }
    unreachable!("a rainbow coloring always verifies");
}

fn try_color(
    graph: &LabeledGraph,
    verts: &[VertexId],
    i: usize,
    palette: u32,
    p: u32,
    assignment: &mut BTreeMap<VertexId, u32>,
) -> Result<bool, GraphError> {
    if i == verts.len() {
        let c = TreedepthColoring {
            p,
            palette,
            color: assignment.clone(),
        };
        return verify_treedepth_coloring(graph, &c, p);
    }
    // symmetry break: vertex i may only open color max_used + 1
    let max_used = assignment.values().copied().max().unwrap_or(0);
    for c in 1..=palette.min(max_used + 1) {
        assignment.insert(verts[i], c);
        // quick prune: partial assignment restricted to colored vertices must
        // already satisfy the invariant on the colored prefix
        if partial_ok(graph, assignment, p)? && try_color(graph, verts, i + 1, palette, p, assignment)? {
            return Ok(true);
        }
        assignment.remove(&verts[i]);
    }
    Ok(false)
}

fn partial_ok(
    graph: &LabeledGraph,
    assignment: &BTreeMap<VertexId, u32>,
    p: u32,
) -> Result<bool, GraphError> {
    let palette = assignment.values().copied().max().unwrap_or(1);
    for u in ColorSet::subsets_up_to(palette, p) {
        let class = graph.color_class(assignment, u);
        if class.is_empty() {
            continue;
        }
        let sub = graph.induced(&class);
        let (t, _) = treedepth_exact(&sub)?;
        if t > u.len() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::example_g1;

    fn star() -> LabeledGraph {
        LabeledGraph::from_edges(4, &[(1, 2), (1, 3), (1, 4)])
    }

    #[test]
    fn star_center_leaves_is_valid() {
        let g = star();
        let color: BTreeMap<VertexId, u32> =
            [(1, 1), (2, 2), (3, 2), (4, 2)].into_iter().map(|(v, c)| (VertexId(v), c)).collect();
        let c = TreedepthColoring { p: 2, palette: 2, color };
        assert!(verify_treedepth_coloring(&g, &c, 2).unwrap());
    }

    #[test]
    fn monochromatic_triangle_fails() {
        let g = LabeledGraph::from_edges(3, &[(1, 2), (1, 3), (2, 3)]);
        let color: BTreeMap<VertexId, u32> =
            (1..=3).map(|v| (VertexId(v), 1)).collect();
        let c = TreedepthColoring { p: 2, palette: 1, color };
        assert!(!verify_treedepth_coloring(&g, &c, 2).unwrap());
    }

    #[test]
    fn exhaustive_star_palette_two() {
        let g = star();
        let c = coloring_provider(&g, 2, &ColoringStrategy::Exhaustive).unwrap();
        assert_eq!(c.palette, 2);
        assert!(verify_treedepth_coloring(&g, &c, 2).unwrap());
    }

    #[test]
    fn exhaustive_single_edge() {
        let g = LabeledGraph::from_edges(2, &[(1, 2)]);
        let c = coloring_provider(&g, 2, &ColoringStrategy::Exhaustive).unwrap();
        assert_eq!(c.palette, 2);
    }

    #[test]
    fn greedy_on_path_verifies() {
        let edges: Vec<(u32, u32)> = (1..7).map(|i| (i, i + 1)).collect();
        let g = LabeledGraph::from_edges(7, &edges);
        let c = coloring_provider(&g, 2, &ColoringStrategy::Greedy).unwrap();
        assert!(verify_treedepth_coloring(&g, &c, 2).unwrap());
    }

    #[test]
    fn greedy_on_g1_verifies() {
        let g = example_g1();
        for p in 1..=4 {
            let c = coloring_provider(&g, p, &ColoringStrategy::Greedy).unwrap();
            assert!(verify_treedepth_coloring(&g, &c, p).unwrap());
        }
    }
}
