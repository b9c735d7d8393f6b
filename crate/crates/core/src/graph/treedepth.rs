//! Exact treedepth by branching on elimination roots, with memoization on
//! vertex subsets. Intended for small instances only.

use std::collections::{BTreeSet, HashMap};

use crate::base::VertexId;
use crate::graph::{GraphError, LabeledGraph, RootedForest};

/// Hard cap on the exhaustive search.
pub const TREEDEPTH_EXHAUSTIVE_CAP: usize = 20;

/// Computes the exact treedepth of `graph` together with a witness forest:
/// a rooted forest over the same vertices, of depth `t - 1` (so `t` levels),
/// whose ancestor relation covers every edge.
///
/// Errors with `SizeLimit` above [`TREEDEPTH_EXHAUSTIVE_CAP`] vertices.
pub fn treedepth_exact(graph: &LabeledGraph) -> Result<(u32, RootedForest), GraphError> {
    if graph.n() == 0 {
        return Err(GraphError::Invalid("treedepth of the empty graph".into()));
    }
    if graph.n() > TREEDEPTH_EXHAUSTIVE_CAP {
        return Err(GraphError::SizeLimit(format!(
            "treedepth_exact is capped at {TREEDEPTH_EXHAUSTIVE_CAP} vertices, got {}",
            graph.n()
        )));
    }
    let verts = graph.vertex_vec();
    let index: HashMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let full: u32 = if verts.len() == 32 { u32::MAX } else { (1u32 << verts.len()) - 1 };

    let mut solver = Solver {
        graph,
        verts: &verts,
        index: &index,
        memo: HashMap::new(),
    };
    let t = solver.depth_of(full);
    let mut forest = RootedForest::new();
    solver.build_witness(full, None, &mut forest);
    debug_assert_eq!(forest.max_depth() + 1, t);
    Ok((t, forest))
}

struct Solver<'a> {
    graph: &'a LabeledGraph,
    verts: &'a [VertexId],
    index: &'a HashMap<VertexId, usize>,
    memo: HashMap<u32, u32>,
}

impl<'a> Solver<'a> {
    fn components_of(&self, mask: u32) -> Vec<u32> {
        let mut remaining = mask;
        let mut comps = Vec::new();
        while remaining != 0 {
            let start = remaining.trailing_zeros() as usize;
            let mut comp = 1u32 << start;
            let mut frontier = vec![start];
            while let Some(i) = frontier.pop() {
                for w in self.graph.neighbors(self.verts[i]) {
                    let j = self.index[&w];
                    let bit = 1u32 << j;
                    if mask & bit != 0 && comp & bit == 0 {
                        comp |= bit;
                        frontier.push(j);
                    }
                }
            }
            comps.push(comp);
            remaining &= !comp;
        }
        comps
    }

    /// Treedepth of the induced subgraph on `mask` (number of levels).
    fn depth_of(&mut self, mask: u32) -> u32 {
        if mask == 0 {
            return 0;
        }
        if let Some(&d) = self.memo.get(&mask) {
            return d;
        }
        let comps = self.components_of(mask);
        let d = if comps.len() > 1 {
            comps.into_iter().map(|c| self.depth_of(c)).max().unwrap()
        } else {
            if mask.count_ones() == 1 {
                1
            } else {
                let mut best = u32::MAX;
                let mut bits = mask;
                while bits != 0 {
                    let i = bits.trailing_zeros();
                    bits &= bits - 1;
                    let rest = mask & !(1u32 << i);
                    let sub = 1 + self.depth_of(rest);
                    best = best.min(sub);
                    if best == 2 {
                        break; // cannot beat depth 2 on a connected graph with >=2 vertices
                    }
                }
                best
            }
        };
        self.memo.insert(mask, d);
        d
    }

    /// Reconstructs a witness forest for `mask` under `parent`.
    fn build_witness(&mut self, mask: u32, parent: Option<VertexId>, forest: &mut RootedForest) {
        if mask == 0 {
            return;
        }
        let comps = self.components_of(mask);
        if comps.len() > 1 {
            for c in comps {
                self.build_witness(c, parent, forest);
            }
            return;
        }
        let target = self.depth_of(mask);
        // find a root achieving the optimum; prefer the smallest id for determinism
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros();
            bits &= bits - 1;
            let rest = mask & !(1u32 << i);
            let sub = if rest == 0 { 0 } else { self.depth_of(rest) };
            if 1 + sub == target || (mask.count_ones() == 1 && target == 1) {
                let v = self.verts[i as usize];
                match parent {
                    None => forest.add_root(v),
                    Some(p) => forest.add_child(p, v),
                }
                self.build_witness(rest, Some(v), forest);
                return;
            }
        }
        unreachable!("no optimal root found");
    }
}

/// Returns whether `forest` is a treedepth witness for `graph`: it spans the
/// vertices and its ancestor relation covers every edge. (Unlike a
/// decomposition forest, witness edges need not be graph edges.)
pub fn is_treedepth_witness(forest: &RootedForest, graph: &LabeledGraph) -> bool {
    forest.member_set() == graph.vertex_vec().into_iter().collect::<BTreeSet<_>>()
        && graph
            .edges()
            .into_iter()
            .all(|(u, v)| forest.is_ancestor(u, v) || forest.is_ancestor(v, u))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: u32) -> LabeledGraph {
        let edges: Vec<(u32, u32)> = (1..n).map(|i| (i, i + 1)).collect();
        LabeledGraph::from_edges(n, &edges)
    }

    #[test]
    fn single_vertex() {
        let g = LabeledGraph::from_edges(1, &[]);
        let (t, w) = treedepth_exact(&g).unwrap();
        assert_eq!(t, 1);
        assert!(is_treedepth_witness(&w, &g));
    }

    #[test]
    fn paths() {
        // paths on 2^t - 1 vertices have treedepth t
        let (t3, w3) = treedepth_exact(&path(3)).unwrap();
        assert_eq!(t3, 2);
        assert!(is_treedepth_witness(&w3, &path(3)));
        let (t7, w7) = treedepth_exact(&path(7)).unwrap();
        assert_eq!(t7, 3);
        assert!(is_treedepth_witness(&w7, &path(7)));
        assert_eq!(treedepth_exact(&path(8)).unwrap().0, 4);
    }

    #[test]
    fn cliques_and_stars() {
        let k4 = LabeledGraph::from_edges(4, &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
        assert_eq!(treedepth_exact(&k4).unwrap().0, 4);
        let star = LabeledGraph::from_edges(4, &[(1, 2), (1, 3), (1, 4)]);
        assert_eq!(treedepth_exact(&star).unwrap().0, 2);
    }

    #[test]
    fn disconnected_is_max() {
        let g = LabeledGraph::from_edges(5, &[(1, 2), (3, 4), (4, 5)]);
        assert_eq!(treedepth_exact(&g).unwrap().0, 2);
    }

    #[test]
    fn size_cap() {
        let g = path(21);
        assert!(matches!(treedepth_exact(&g), Err(GraphError::SizeLimit(_))));
    }

    #[test]
    fn monotone_under_induced_subgraphs() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = rng.gen_range(2..=8u32);
            let mut edges = Vec::new();
            for u in 1..=n {
                for v in (u + 1)..=n {
                    if rng.gen_bool(0.4) {
                        edges.push((u, v));
                    }
                }
            }
            let g = LabeledGraph::from_edges(n, &edges);
            let (t, _) = treedepth_exact(&g).unwrap();
            let keep: BTreeSet<VertexId> =
                (1..=n).filter(|_| rng.gen_bool(0.6)).map(VertexId).collect();
            if keep.is_empty() {
                continue;
            }
            let h = g.induced(&keep);
            let (th, _) = treedepth_exact(&h).unwrap();
            assert!(th <= t, "treedepth must be monotone under induced subgraphs");
        }
    }
}
