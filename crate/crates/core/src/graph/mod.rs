//! Labeled graphs, rooted/decomposition forests, treedepth machinery,
//! treedepth colorings, and skeletons.

mod coloring;
mod forest;
mod gen;
mod io;
mod skeleton;
mod treedepth;

pub use coloring::{coloring_provider, verify_treedepth_coloring, ColoringStrategy, TreedepthColoring};
pub use forest::{decomposition_forest, in_fd, is_decomposition_forest, RootedForest};
pub use gen::{generate, Family};
pub use io::{format_graph, parse_graph};
pub use skeleton::{build_skeleton, Skeleton};
pub use treedepth::{is_treedepth_witness, treedepth_exact};

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::base::{Label, Labeling, VertexId};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("heuristic coloring failed verification")]
    HeuristicFailed,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// An undirected simple graph with per-vertex label sets over a finite
/// alphabet. No self-loops, no duplicate edges; adjacency is symmetric.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledGraph {
    pub(crate) alphabet: BTreeSet<Label>,
    adj: BTreeMap<VertexId, BTreeSet<VertexId>>,
    labels: Labeling,
    /// Declared id bound N (poly(n)); ids are in 1..=N.
    id_bound: u32,
}

impl LabeledGraph {
    pub fn new(alphabet: BTreeSet<Label>) -> Self {
        LabeledGraph {
            alphabet,
            adj: BTreeMap::new(),
            labels: Labeling::new(),
            id_bound: 0,
        }
    }

    /// Builds a graph with vertices `1..=n` and the given edges.
    pub fn from_edges(n: u32, edges: &[(u32, u32)]) -> Self {
        let mut g = LabeledGraph::new(BTreeSet::new());
        for v in 1..=n {
            g.add_vertex(VertexId(v));
        }
        for &(u, v) in edges {
            g.add_edge(VertexId(u), VertexId(v));
        }
        g
    }

    pub fn add_vertex(&mut self, v: VertexId) {
        assert!(v.0 >= 1, "vertex ids are positive");
        self.adj.entry(v).or_default();
        self.id_bound = self.id_bound.max(v.0);
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) {
        assert_ne!(u, v, "no self-loops");
        self.add_vertex(u);
        self.add_vertex(v);
        self.adj.get_mut(&u).unwrap().insert(v);
        self.adj.get_mut(&v).unwrap().insert(u);
    }

    pub fn set_labels(&mut self, v: VertexId, labels: BTreeSet<Label>) {
        self.add_vertex(v);
        self.alphabet.extend(labels.iter().cloned());
        self.labels.0.insert(v, labels);
    }

    pub fn add_label(&mut self, v: VertexId, label: Label) {
        self.add_vertex(v);
        self.alphabet.insert(label.clone());
        self.labels.add(v, label);
    }

    pub fn set_id_bound(&mut self, bound: u32) {
        assert!(bound >= self.id_bound, "id bound below an existing id");
        self.id_bound = bound;
    }

    /// The declared identifier bound N. Defaults to the largest id used.
    pub fn id_bound(&self) -> u32 {
        self.id_bound.max(1)
    }

    pub fn alphabet(&self) -> &BTreeSet<Label> {
        &self.alphabet
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.adj.values().map(|s| s.len()).sum::<usize>() / 2
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_vec(&self) -> Vec<VertexId> {
        self.adj.keys().copied().collect()
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.get(&v).into_iter().flatten().copied()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj.get(&v).map_or(0, |s| s.len())
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adj.get(&u).map_or(false, |s| s.contains(&v))
    }

    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for (&u, nbrs) in &self.adj {
            for &v in nbrs {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn labels(&self) -> &Labeling {
        &self.labels
    }

    pub fn labels_of(&self, v: VertexId) -> BTreeSet<Label> {
        self.labels.get(v)
    }

    /// The subgraph induced by `keep`, with labels restricted accordingly.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> LabeledGraph {
        let mut g = LabeledGraph::new(self.alphabet.clone());
        g.id_bound = self.id_bound;
        for &v in keep {
            if self.has_vertex(v) {
                g.add_vertex(v);
                if let Some(l) = self.labels.0.get(&v) {
                    g.labels.0.insert(v, l.clone());
                }
            }
        }
        for &v in keep {
            for w in self.neighbors(v) {
                if w > v && keep.contains(&w) {
                    g.add_edge(v, w);
                }
            }
        }
        g
    }

    /// Breadth-first distances from `src`; unreachable vertices are absent.
    pub fn bfs_distances(&self, src: VertexId) -> BTreeMap<VertexId, u32> {
        let mut dist = BTreeMap::new();
        if !self.has_vertex(src) {
            return dist;
        }
        dist.insert(src, 0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let du = dist[&u];
            for w in self.neighbors(u) {
                if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(w) {
                    e.insert(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn dist(&self, u: VertexId, v: VertexId) -> Option<u32> {
        self.bfs_distances(u).get(&v).copied()
    }

    /// The closed ball of radius `r` around `v`.
    pub fn ball(&self, v: VertexId, r: u32) -> BTreeSet<VertexId> {
        self.bfs_distances(v)
            .into_iter()
            .filter(|&(_, d)| d <= r)
            .map(|(w, _)| w)
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        match self.vertices().next() {
            None => true,
            Some(v) => self.bfs_distances(v).len() == self.n(),
        }
    }

    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.vertices() {
            if !seen.contains(&v) {
                let comp: BTreeSet<VertexId> = self.bfs_distances(v).into_keys().collect();
                seen.extend(comp.iter().copied());
                out.push(comp);
            }
        }
        out
    }

    /// Eccentricity-based diameter; disconnected graphs report the largest
    /// within-component diameter.
    pub fn diameter(&self) -> u32 {
        let mut d = 0;
        for v in self.vertices() {
            for (_, dist) in self.bfs_distances(v) {
                d = d.max(dist);
            }
        }
        d
    }

    /// Vertices whose color (per the map) lies in the given set.
    pub fn color_class(&self, color_of: &BTreeMap<VertexId, u32>, u: crate::base::ColorSet) -> BTreeSet<VertexId> {
        self.vertices()
            .filter(|v| color_of.get(v).map_or(false, |c| u.contains(*c)))
            .collect()
    }
}

/// The four-vertex labeled graph used as a running example: a triangle
/// {1,2,3} with a pendant vertex 4 attached to 3; vertices 1,2 carry label
/// "0" and vertices 3,4 carry label "1".
pub fn example_g1() -> LabeledGraph {
    let mut g = LabeledGraph::from_edges(4, &[(1, 2), (1, 3), (2, 3), (3, 4)]);
    g.add_label(VertexId(1), Label::sym("0"));
    g.add_label(VertexId(2), Label::sym("0"));
    g.add_label(VertexId(3), Label::sym("1"));
    g.add_label(VertexId(4), Label::sym("1"));
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let g = example_g1();
        assert_eq!(g.n(), 4);
        assert_eq!(g.m(), 4);
        assert!(g.has_edge(VertexId(1), VertexId(3)));
        assert!(!g.has_edge(VertexId(1), VertexId(4)));
        assert_eq!(g.dist(VertexId(1), VertexId(4)), Some(2));
        assert_eq!(g.diameter(), 2);
        assert!(g.is_connected());
    }

    #[test]
    fn induced_subgraph() {
        let g = example_g1();
        let keep: BTreeSet<VertexId> = [1, 3, 4].into_iter().map(VertexId).collect();
        let h = g.induced(&keep);
        assert_eq!(h.n(), 3);
        assert_eq!(h.m(), 2);
        assert!(h.has_edge(VertexId(1), VertexId(3)));
        assert!(!h.has_vertex(VertexId(2)));
    }
}
