//! Skeletons: a graph, a treedepth coloring, and one decomposition forest
//! per color subset.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::base::ColorSet;
use crate::graph::{
    decomposition_forest, in_fd, GraphError, LabeledGraph, RootedForest, TreedepthColoring,
};

/// A `p`-skeleton: for every nonempty `U ⊆ [palette]` with `|U| ≤ p`, a
/// decomposition forest of the subgraph induced by colors in `U`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skeleton {
    pub graph: LabeledGraph,
    pub coloring: TreedepthColoring,
    pub forests: BTreeMap<ColorSet, RootedForest>,
}

impl Skeleton {
    pub fn p(&self) -> u32 {
        self.coloring.p
    }

    pub fn forest(&self, u: ColorSet) -> Option<&RootedForest> {
        self.forests.get(&u)
    }

    /// Largest `F_d` membership bound across all color-set forests; the
    /// natural instance-level parameter `d` for lca predicate ranges.
    pub fn depth_bound(&self) -> u32 {
        self.forests.values().map(|f| f.fd_bound()).max().unwrap_or(1)
    }
}

/// Builds the skeleton centrally: `Col(p)` is every nonempty subset of the
/// palette with at most `p` colors, and each entry is the deterministic DFS
/// decomposition forest of the induced subgraph.
pub fn build_skeleton(graph: &LabeledGraph, coloring: &TreedepthColoring) -> Result<Skeleton, GraphError> {
    let mut forests = BTreeMap::new();
    for u in ColorSet::subsets_up_to(coloring.palette, coloring.p) {
        let class = graph.color_class(&coloring.color, u);
        let sub = graph.induced(&class);
        let forest = decomposition_forest(&sub);
        debug_assert!(in_fd(&forest, 1u32 << u.len().min(30)));
        forests.insert(u, forest);
    }
    Ok(Skeleton {
        graph: graph.clone(),
        coloring: coloring.clone(),
        forests,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::VertexId;
    use crate::graph::{coloring_provider, example_g1, ColoringStrategy};

    #[test]
    fn edgeless_one_color() {
        let g = LabeledGraph::from_edges(2, &[]);
        let color = [(VertexId(1), 1), (VertexId(2), 1)].into_iter().collect();
        let c = TreedepthColoring { p: 1, palette: 1, color };
        let s = build_skeleton(&g, &c).unwrap();
        assert_eq!(s.forests.len(), 1);
        let f = s.forest(ColorSet::singleton(1)).unwrap();
        assert_eq!(f.roots().len(), 2);
        assert_eq!(f.max_depth(), 0);
    }

    #[test]
    fn star_two_colors() {
        let g = LabeledGraph::from_edges(4, &[(1, 2), (1, 3), (1, 4)]);
        let color = [(1, 1), (2, 2), (3, 2), (4, 2)]
            .into_iter()
            .map(|(v, c)| (VertexId(v), c))
            .collect();
        let c = TreedepthColoring { p: 2, palette: 2, color };
        let s = build_skeleton(&g, &c).unwrap();
        assert_eq!(s.forests.len(), 3); // {1}, {2}, {1,2}
        let full = s.forest(ColorSet::from_iter([1, 2])).unwrap();
        assert_eq!(full.roots(), vec![VertexId(1)]);
        assert_eq!(full.max_depth(), 1);
    }

    #[test]
    fn g1_skeleton_depth_bounds() {
        let g = example_g1();
        let c = coloring_provider(&g, 3, &ColoringStrategy::Greedy).unwrap();
        let s = build_skeleton(&g, &c).unwrap();
        for (u, f) in &s.forests {
            assert!(in_fd(f, 1 << u.len()), "Prop depth: F^U must lie in F_(2^|U|)");
        }
        // monotonicity of forest vertex sets under subset inclusion
        for (u1, f1) in &s.forests {
            for (u2, f2) in &s.forests {
                if u1.is_subset(*u2) {
                    assert!(f1.member_set().is_subset(&f2.member_set()));
                }
            }
        }
    }
}
