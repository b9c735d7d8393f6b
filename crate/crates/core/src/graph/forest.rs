//! Rooted forests and decomposition forests.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::base::VertexId;
use crate::graph::LabeledGraph;

/// A rooted forest over a subset of vertex ids. Roots have no parent and
/// depth 0; every other member's depth is its parent's depth plus one.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootedForest {
    parent: BTreeMap<VertexId, Option<VertexId>>,
    depth: BTreeMap<VertexId, u32>,
}

impl RootedForest {
    pub fn new() -> Self {
        RootedForest::default()
    }

    pub fn add_root(&mut self, v: VertexId) {
        self.parent.insert(v, None);
        self.depth.insert(v, 0);
    }

    pub fn add_child(&mut self, parent: VertexId, child: VertexId) {
        let d = self.depth[&parent] + 1;
        self.parent.insert(child, Some(parent));
        self.depth.insert(child, d);
    }

    pub fn is_member(&self, v: VertexId) -> bool {
        self.parent.contains_key(&v)
    }

    pub fn members(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.parent.keys().copied()
    }

    pub fn member_set(&self) -> BTreeSet<VertexId> {
        self.parent.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent.get(&v).copied().flatten()
    }

    pub fn depth(&self, v: VertexId) -> Option<u32> {
        self.depth.get(&v).copied()
    }

    pub fn children(&self, v: VertexId) -> Vec<VertexId> {
        self.parent
            .iter()
            .filter(|(_, p)| **p == Some(v))
            .map(|(c, _)| *c)
            .collect()
    }

    pub fn roots(&self) -> Vec<VertexId> {
        self.parent
            .iter()
            .filter(|(_, p)| p.is_none())
            .map(|(v, _)| *v)
            .collect()
    }

    /// Maximum depth over members; empty forests have depth 0.
    pub fn max_depth(&self) -> u32 {
        self.depth.values().copied().max().unwrap_or(0)
    }

    /// Path from the root to `v`, inclusive.
    pub fn root_path(&self, v: VertexId) -> Vec<VertexId> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    pub fn root_of(&self, v: VertexId) -> VertexId {
        *self.root_path(v).first().unwrap()
    }

    /// The ancestor of `v` at the given depth (including `v` itself when
    /// `d = depth(v)`), or `None` if `d > depth(v)`.
    pub fn ancestor_at_depth(&self, v: VertexId, d: u32) -> Option<VertexId> {
        let path = self.root_path(v);
        path.get(d as usize).copied()
    }

    /// Whether `a` is an ancestor of `v` (including `a == v`).
    pub fn is_ancestor(&self, a: VertexId, v: VertexId) -> bool {
        self.root_path(v).contains(&a)
    }

    /// Members of the subtree rooted at `v`, including `v`.
    pub fn subtree(&self, v: VertexId) -> BTreeSet<VertexId> {
        self.members().filter(|&w| self.is_ancestor(v, w)).collect()
    }

    /// The lca depth of `x` and `y`: the number of shared nodes of their
    /// root paths minus one, or -1 when they lie in different trees.
    pub fn lca_depth(&self, x: VertexId, y: VertexId) -> i32 {
        let px = self.root_path(x);
        let py = self.root_path(y);
        let mut shared = 0usize;
        for (a, b) in px.iter().zip(py.iter()) {
            if a == b {
                shared += 1;
            } else {
                break;
            }
        }
        shared as i32 - 1
    }

    /// Distance between two members within the forest, or `None` when they
    /// lie in different trees.
    pub fn tree_distance(&self, x: VertexId, y: VertexId) -> Option<u32> {
        let l = self.lca_depth(x, y);
        if l < 0 {
            return None;
        }
        let dx = self.depth(x)? as i32;
        let dy = self.depth(y)? as i32;
        Some((dx - l + dy - l) as u32)
    }

    /// Diameter of the tree containing `root` (over members of that tree).
    fn tree_diameter(&self, root: VertexId) -> u32 {
        let members: Vec<VertexId> = self
            .members()
            .filter(|&v| self.root_of(v) == root)
            .collect();
        let mut diam = 0;
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                if let Some(d) = self.tree_distance(a, b) {
                    diam = diam.max(d);
                }
            }
        }
        diam
    }

    /// The smallest `d` such that this forest lies in `F_d`: the largest
    /// tree diameter plus one (at least 1).
    pub fn fd_bound(&self) -> u32 {
        self.roots()
            .into_iter()
            .map(|r| self.tree_diameter(r) + 1)
            .max()
            .unwrap_or(1)
    }

    /// Sanity check: acyclic parent relation with consistent depths.
    pub fn validate(&self) -> bool {
        self.parent.keys().all(|&v| {
            let d = self.depth[&v];
            match self.parent(v) {
                None => d == 0,
                Some(p) => self.is_member(p) && self.depth.get(&p) == Some(&(d - 1)) && {
                    // acyclicity: the root path terminates
                    self.root_path(v).len() == d as usize + 1
                },
            }
        })
    }
}

/// Membership test for the class `F_d`: every tree has diameter at most
/// `d - 1` (measured in the tree).
pub fn in_fd(forest: &RootedForest, d: u32) -> bool {
    forest
        .roots()
        .into_iter()
        .all(|r| forest.tree_diameter(r) + 1 <= d)
}

/// Builds a decomposition forest of `host` by depth-first search. Each
/// component is rooted at its minimum-id vertex, and neighbors are visited
/// in ascending id order, so the result is deterministic.
pub fn decomposition_forest(host: &LabeledGraph) -> RootedForest {
    let mut forest = RootedForest::new();
    let mut visited: BTreeSet<VertexId> = BTreeSet::new();
    for root in host.vertex_vec() {
        if visited.contains(&root) {
            continue;
        }
        forest.add_root(root);
        visited.insert(root);
        // iterative DFS, smallest neighbor id first
        let mut stack = vec![root];
        while let Some(u) = stack.last().copied() {
            let next = host.neighbors(u).find(|w| !visited.contains(w));
            match next {
                Some(w) => {
                    forest.add_child(u, w);
                    visited.insert(w);
                    stack.push(w);
                }
                None => {
                    stack.pop();
                }
            }
        }
    }
    debug_assert!(is_decomposition_forest(&forest, host));
    forest
}

/// Checks the decomposition-forest property: the forest spans every vertex
/// of the host, every host edge joins an ancestor-descendant pair, and every
/// forest edge is a host edge.
pub fn is_decomposition_forest(forest: &RootedForest, host: &LabeledGraph) -> bool {
    if forest.member_set() != host.vertex_vec().into_iter().collect() {
        return false;
    }
    for v in forest.members() {
        if let Some(p) = forest.parent(v) {
            if !host.has_edge(p, v) {
                return false;
            }
        }
    }
    host.edges().into_iter().all(|(u, v)| {
        forest.is_ancestor(u, v) || forest.is_ancestor(v, u)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::example_g1;

    #[test]
    fn dfs_triangle_is_path() {
        let g = LabeledGraph::from_edges(3, &[(1, 2), (1, 3), (2, 3)]);
        let f = decomposition_forest(&g);
        assert!(is_decomposition_forest(&f, &g));
        assert_eq!(f.roots(), vec![VertexId(1)]);
        // DFS with ascending tie-break: 1 -> 2 -> 3
        assert_eq!(f.parent(VertexId(2)), Some(VertexId(1)));
        assert_eq!(f.parent(VertexId(3)), Some(VertexId(2)));
        assert_eq!(f.depth(VertexId(3)), Some(2));
    }

    #[test]
    fn dfs_edgeless_is_singletons() {
        let g = LabeledGraph::from_edges(3, &[]);
        let f = decomposition_forest(&g);
        assert_eq!(f.roots().len(), 3);
        assert!(f.members().all(|v| f.depth(v) == Some(0)));
        assert!(in_fd(&f, 1));
    }

    #[test]
    fn dfs_g1_chain() {
        let g = example_g1();
        let f = decomposition_forest(&g);
        assert!(is_decomposition_forest(&f, &g));
        // DFS from 1: 1 -> 2 -> 3 -> 4
        assert_eq!(f.depth(VertexId(4)), Some(3));
    }

    #[test]
    fn fd_membership() {
        let mut f = RootedForest::new();
        f.add_root(VertexId(1));
        assert!(in_fd(&f, 1));
        f.add_child(VertexId(1), VertexId(2));
        f.add_child(VertexId(2), VertexId(3));
        // rooted path of 3 nodes: diameter 2 > d-1 for d=2
        assert!(!in_fd(&f, 2));
        assert!(in_fd(&f, 3));
    }

    #[test]
    fn lca_depths() {
        let mut f = RootedForest::new();
        f.add_root(VertexId(1));
        f.add_child(VertexId(1), VertexId(2));
        f.add_child(VertexId(1), VertexId(3));
        f.add_root(VertexId(4));
        assert_eq!(f.lca_depth(VertexId(2), VertexId(3)), 0);
        assert_eq!(f.lca_depth(VertexId(2), VertexId(2)), 1);
        assert_eq!(f.lca_depth(VertexId(1), VertexId(2)), 0);
        assert_eq!(f.lca_depth(VertexId(2), VertexId(4)), -1);
    }
}
