//! Seeded instance generators for tests, benchmarks, and the CLI.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::base::{Label, VertexId};
use crate::graph::LabeledGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Uniform random tree (random parent attachment).
    Tree,
    /// Path 1-2-...-n.
    Path,
    /// Square grid on ceil(sqrt n)^2 >= n vertices, truncated to n.
    Grid,
    /// Random graph with maximum degree 3.
    BoundedDegree,
    /// Disjoint cliques of size 2..=4.
    DisjointCliques,
}

impl Family {
    pub fn parse(s: &str) -> Option<Family> {
        match s {
            "tree" => Some(Family::Tree),
            "path" => Some(Family::Path),
            "grid" => Some(Family::Grid),
            "bounded-degree" => Some(Family::BoundedDegree),
            "disjoint-cliques" => Some(Family::DisjointCliques),
            _ => None,
        }
    }
}

/// Generates an n-vertex graph of the family, labeling each vertex with "a"
/// with probability 1/2 (and "b" with probability 1/4), deterministically
/// from the seed.
pub fn generate(family: Family, n: u32, seed: u64) -> LabeledGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = match family {
        Family::Path => {
            let edges: Vec<(u32, u32)> = (1..n).map(|i| (i, i + 1)).collect();
            LabeledGraph::from_edges(n, &edges)
        }
        Family::Tree => {
            let mut edges = Vec::new();
            for v in 2..=n {
                let parent = rng.gen_range(1..v);
                edges.push((parent, v));
            }
            LabeledGraph::from_edges(n, &edges)
        }
        Family::BoundedDegree => {
            let mut g = LabeledGraph::from_edges(n, &[]);
            // random spanning tree with degree cap, then a few extra edges
            for v in 2..=n {
                let candidates: Vec<u32> = (1..v)
                    .filter(|&u| g.degree(VertexId(u)) < 3)
                    .collect();
                if let Some(&u) = candidates.choose(&mut rng) {
                    g.add_edge(VertexId(u), VertexId(v));
                }
            }
            for _ in 0..n / 4 {
                let u = rng.gen_range(1..=n);
                let v = rng.gen_range(1..=n);
                if u != v
                    && !g.has_edge(VertexId(u), VertexId(v))
                    && g.degree(VertexId(u)) < 3
                    && g.degree(VertexId(v)) < 3
                {
                    g.add_edge(VertexId(u), VertexId(v));
                }
            }
            g
        }
        Family::Grid => {
            let side = (n as f64).sqrt().ceil() as u32;
            let mut g = LabeledGraph::from_edges(n, &[]);
            let idx = |r: u32, c: u32| r * side + c + 1;
            for r in 0..side {
                for c in 0..side {
                    let v = idx(r, c);
                    if v > n {
                        continue;
                    }
                    if c + 1 < side && idx(r, c + 1) <= n {
                        g.add_edge(VertexId(v), VertexId(idx(r, c + 1)));
                    }
                    if r + 1 < side && idx(r + 1, c) <= n {
                        g.add_edge(VertexId(v), VertexId(idx(r + 1, c)));
                    }
                }
            }
            g
        }
        Family::DisjointCliques => {
            let mut g = LabeledGraph::from_edges(n, &[]);
            let mut v = 1u32;
            while v <= n {
                let size = rng.gen_range(2..=4u32).min(n - v + 1);
                for a in v..v + size {
                    for b in (a + 1)..v + size {
                        g.add_edge(VertexId(a), VertexId(b));
                    }
                }
                v += size;
            }
            g
        }
    };
    for v in 1..=n {
        if rng.gen_bool(0.5) {
            g.add_label(VertexId(v), Label::sym("a"));
        }
        if rng.gen_bool(0.25) {
            g.add_label(VertexId(v), Label::sym("b"));
        }
    }
    g.set_id_bound(n.max(1));
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = generate(Family::Tree, 12, 42);
        let b = generate(Family::Tree, 12, 42);
        assert_eq!(a, b);
        let c = generate(Family::Tree, 12, 43);
        assert_ne!(a, c);
    }

    #[test]
    fn trees_are_trees() {
        for seed in 0..5 {
            let g = generate(Family::Tree, 20, seed);
            assert_eq!(g.m(), 19);
            assert!(g.is_connected());
        }
    }

    #[test]
    fn bounded_degree_cap() {
        let g = generate(Family::BoundedDegree, 30, 3);
        assert!(g.vertices().all(|v| g.degree(v) <= 3));
    }

    #[test]
    fn cliques_are_disjoint() {
        let g = generate(Family::DisjointCliques, 10, 1);
        for comp in g.components() {
            let k = comp.len();
            let sub = g.induced(&comp);
            assert_eq!(sub.m(), k * (k - 1) / 2);
        }
    }
}
