//! lca-types: maximally specified label/lca profiles of variable tuples on
//! bounded-depth rooted forests.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::base::{Label, Labeling, VertexId};
use crate::graph::RootedForest;
use crate::logic::{Atom, Formula, LogicError, Var};

/// An lca-type over `k` variables with ambient depth parameter `d`.
///
/// `delta` is the symmetric matrix of pairwise lca depths (`-1` = different
/// trees; `delta[i][i]` is the depth of variable `i`). `gamma[i]` constrains
/// the labels of variable `i`: a mapped `true` requires presence, `false`
/// requires absence, and unmapped labels are unconstrained. Full types over
/// an alphabet map every alphabet label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LcaType {
    pub k: usize,
    pub d: u32,
    pub gamma: Vec<BTreeMap<Label, bool>>,
    pub delta: Vec<Vec<i32>>,
}

/// The canonical realization of a non-trivial type: the forest induced by
/// its delta matrix (union of the tuple's root paths), a labeling realizing
/// its gamma constraints, and the tuple itself.
#[derive(Debug, Clone)]
pub struct TypeRealization {
    pub forest: RootedForest,
    pub labels: Labeling,
    pub tuple: Vec<VertexId>,
}

impl LcaType {
    /// Structural consistency of the delta matrix within depth budget `d`:
    /// symmetry, ranges, the triple meet condition, and the tree diameter
    /// bound of `F_d`.
    pub fn delta_consistent(delta: &[Vec<i32>], d: u32) -> bool {
        let k = delta.len();
        for i in 0..k {
            if delta[i].len() != k {
                return false;
            }
            if delta[i][i] < 0 || delta[i][i] > d as i32 - 1 {
                return false;
            }
        }
        for i in 0..k {
            for j in 0..k {
                if delta[i][j] != delta[j][i] {
                    return false;
                }
                if i != j && (delta[i][j] < -1 || delta[i][j] > delta[i][i].min(delta[j][j])) {
                    return false;
                }
                if i != j && delta[i][j] >= 0 {
                    // diameter within a tree of F_d
                    let dist = delta[i][i] + delta[j][j] - 2 * delta[i][j];
                    if dist > d as i32 - 1 {
                        return false;
                    }
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    if delta[i][l] < delta[i][j].min(delta[j][l]) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The canonical representative of the node shared by variables at a
    /// given depth: the smallest variable index whose path passes through it.
    fn node_rep(&self, i: usize, s: i32) -> usize {
        (0..self.k)
            .find(|&j| self.delta[i][j] >= s && self.delta[j][j] >= s)
            .unwrap_or(i)
    }

    /// Variables sharing variable `i`'s node (same position in the forest).
    pub fn colocated(&self, i: usize) -> Vec<usize> {
        (0..self.k)
            .filter(|&j| {
                self.delta[i][j] == self.delta[i][i] && self.delta[j][j] == self.delta[i][i]
            })
            .collect()
    }

    /// Whether the type is trivial (always false): inconsistent delta, or
    /// label constraints conflicting on a shared node.
    pub fn is_trivial(&self) -> bool {
        if !Self::delta_consistent(&self.delta, self.d) {
            return true;
        }
        for i in 0..self.k {
            for &j in &self.colocated(i) {
                for (l, req) in &self.gamma[i] {
                    if let Some(other) = self.gamma[j].get(l) {
                        if other != req {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    /// Builds the canonical realization of a non-trivial type. Vertex ids
    /// are assigned deterministically.
    pub fn realize(&self) -> Option<TypeRealization> {
        if self.is_trivial() {
            return None;
        }
        let mut forest = RootedForest::new();
        let mut node_of: BTreeMap<(usize, i32), VertexId> = BTreeMap::new();
        let mut next_id = 1u32;
        for i in 0..self.k {
            for s in 0..=self.delta[i][i] {
                let rep = self.node_rep(i, s);
                let key = (rep, s);
                if !node_of.contains_key(&key) {
                    let v = VertexId(next_id);
                    next_id += 1;
                    if s == 0 {
                        forest.add_root(v);
                    } else {
                        let parent = node_of[&(self.node_rep(i, s - 1), s - 1)];
                        forest.add_child(parent, v);
                    }
                    node_of.insert(key, v);
                }
            }
        }
        let tuple: Vec<VertexId> = (0..self.k)
            .map(|i| node_of[&(self.node_rep(i, self.delta[i][i]), self.delta[i][i])])
            .collect();
        let mut labels = Labeling::new();
        for i in 0..self.k {
            for (l, req) in &self.gamma[i] {
                if *req {
                    labels.add(tuple[i], l.clone());
                }
            }
        }
        Some(TypeRealization { forest, labels, tuple })
    }

    /// The type as a formula over the given variables.
    pub fn formula(&self, vars: &[Var]) -> Formula {
        assert_eq!(vars.len(), self.k);
        let mut conj = Vec::new();
        for i in 0..self.k {
            for (l, req) in &self.gamma[i] {
                let lit = Formula::atom(Atom::Lab(l.clone(), vars[i].clone()));
                conj.push(if *req { lit } else { Formula::not(lit) });
            }
        }
        for i in 0..self.k {
            for j in i..self.k {
                conj.push(Formula::atom(Atom::Lca {
                    i: self.delta[i][j],
                    x: vars[i].clone(),
                    y: vars[j].clone(),
                }));
            }
        }
        Formula::and(conj)
    }

    /// Restriction to the first `m` variables (used when a variable has
    /// been eliminated).
    pub fn restrict(&self, m: usize) -> LcaType {
        LcaType {
            k: m,
            d: self.d,
            gamma: self.gamma[..m].to_vec(),
            delta: (0..m)
                .map(|i| (0..m).map(|j| self.delta[i][j]).collect())
                .collect(),
        }
    }
}

/// Enumerates all realizable delta matrices over `k` variables with depths
/// below `d`, by attaching one root path at a time.
pub fn enumerate_deltas(k: usize, d: u32) -> Vec<Vec<Vec<i32>>> {
    let mut out: Vec<Vec<Vec<i32>>> = vec![vec![]];
    for j in 0..k {
        let mut next = Vec::new();
        for partial in &out {
            let mut rows: BTreeSet<Vec<i32>> = BTreeSet::new();
            // new tree at any depth
            for a in 0..d as i32 {
                let mut row: Vec<i32> = vec![-1; j];
                row.push(a);
                rows.insert(row);
            }
            // attach to an existing node
            let mut seen_nodes: BTreeSet<Vec<i32>> = BTreeSet::new();
            for i0 in 0..j {
                for s0 in 0..=partial[i0][i0] {
                    // meets determined by the attach node
                    let meets: Vec<i32> = (0..j).map(|i| s0.min(partial[i][i0])).collect();
                    if !seen_nodes.insert(meets.clone()) {
                        continue;
                    }
                    for a in s0..d as i32 {
                        // diameter filter within the tree
                        let ok = (0..j).all(|i| {
                            meets[i] < 0
                                || partial[i][i] + a - 2 * meets[i] <= d as i32 - 1
                        });
                        if !ok {
                            continue;
                        }
                        let mut row = meets.clone();
                        row.push(a);
                        rows.insert(row);
                    }
                }
            }
            for row in rows {
                let mut delta = partial.clone();
                for (i, r) in delta.iter_mut().enumerate() {
                    r.push(row[i]);
                }
                delta.push(row);
                next.push(delta);
            }
        }
        out = next;
        let _ = j;
    }
    debug_assert!(out.iter().all(|m| LcaType::delta_consistent(m, d)));
    out
}

/// Enumerates every non-trivial full lca-type over `k` variables, depth
/// parameter `d`, and the given alphabet. The candidate space has size at
/// most `2^(k|Λ|) * (d+1)^(k^2)`; the call errs above `cap` candidates.
pub fn enumerate_types(
    k: usize,
    d: u32,
    alphabet: &BTreeSet<Label>,
    cap: u64,
) -> Result<Vec<LcaType>, LogicError> {
    let bound = (2f64.powi((k * alphabet.len()) as i32))
        * ((d as f64 + 1.0).powi((k * k) as i32));
    if !bound.is_finite() || bound > cap as f64 {
        return Err(LogicError::SizeLimit(format!(
            "type space 2^(k|A|)(d+1)^(k^2) = {bound:.3e} exceeds cap {cap}"
        )));
    }
    let deltas = enumerate_deltas(k, d);
    let labels: Vec<Label> = alphabet.iter().cloned().collect();
    let mut out = Vec::new();
    for delta in deltas {
        let mut gammas: Vec<Vec<BTreeMap<Label, bool>>> = vec![vec![]];
        for _ in 0..k {
            let mut next = Vec::new();
            for g in &gammas {
                for mask in 0..(1u64 << labels.len()) {
                    let mut m = BTreeMap::new();
                    for (bi, l) in labels.iter().enumerate() {
                        m.insert(l.clone(), mask & (1 << bi) != 0);
                    }
                    let mut g2 = g.clone();
                    g2.push(m);
                    next.push(g2);
                }
            }
            gammas = next;
        }
        for gamma in gammas {
            let t = LcaType { k, d, gamma, delta: delta.clone() };
            if !t.is_trivial() {
                out.push(t);
            }
        }
    }
    Ok(out)
}

/// Whether the forest restricted to the tuple (and its ancestors) is
/// isomorphic to the type's induced forest via a label-matching isomorphism
/// sending the tuple onto the type's tuple. Equivalently: the tuple's delta
/// matrix matches and every label constraint holds.
pub fn type_isomorphism_check(
    forest: &RootedForest,
    labels: &Labeling,
    tuple: &[VertexId],
    t: &LcaType,
) -> bool {
    if tuple.len() != t.k || t.is_trivial() {
        return false;
    }
    for i in 0..t.k {
        for j in 0..t.k {
            if forest.lca_depth(tuple[i], tuple[j]) != t.delta[i][j] {
                return false;
            }
        }
    }
    for i in 0..t.k {
        for (l, req) in &t.gamma[i] {
            if labels.has(tuple[i], l) != *req {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_var_depth_one() {
        // k=1, d=1, empty alphabet: only delta(1,1)=0
        let ts = enumerate_types(1, 1, &BTreeSet::new(), 1_000_000).unwrap();
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].delta[0][0], 0);
    }

    #[test]
    fn single_var_depth_two_one_label() {
        let alphabet: BTreeSet<Label> = [Label::sym("a")].into();
        let ts = enumerate_types(1, 2, &alphabet, 1_000_000).unwrap();
        // depth 0 or 1, label present or absent
        assert_eq!(ts.len(), 4);
    }

    #[test]
    fn count_within_paper_bound() {
        for (k, d, nl) in [(1usize, 2u32, 1usize), (2, 2, 1), (2, 3, 0), (3, 2, 0)] {
            let alphabet: BTreeSet<Label> =
                (0..nl).map(|i| Label::sym(&format!("l{i}"))).collect();
            let ts = enumerate_types(k, d, &alphabet, 100_000_000).unwrap();
            let bound = 2u64.pow((k * nl) as u32) * (d as u64 + 1).pow((k * k) as u32);
            assert!((ts.len() as u64) <= bound, "{} > {bound}", ts.len());
        }
    }

    #[test]
    fn realization_round_trip() {
        let alphabet: BTreeSet<Label> = [Label::sym("a")].into();
        for t in enumerate_types(2, 3, &alphabet, 100_000_000).unwrap() {
            let r = t.realize().expect("non-trivial types realize");
            assert!(r.forest.validate());
            assert!(
                type_isomorphism_check(&r.forest, &r.labels, &r.tuple, &t),
                "realization must satisfy its own type"
            );
        }
    }

    #[test]
    fn label_mismatch_fails_isomorphism() {
        let alphabet: BTreeSet<Label> = [Label::sym("a")].into();
        let t = enumerate_types(1, 2, &alphabet, 1_000_000)
            .unwrap()
            .into_iter()
            .find(|t| t.gamma[0][&Label::sym("a")])
            .unwrap();
        let r = t.realize().unwrap();
        let empty = Labeling::new();
        assert!(!type_isomorphism_check(&r.forest, &empty, &r.tuple, &t));
    }

    #[test]
    fn asymmetric_delta_is_trivial() {
        let t = LcaType {
            k: 2,
            d: 3,
            gamma: vec![BTreeMap::new(), BTreeMap::new()],
            delta: vec![vec![1, 0], vec![1, 1]],
        };
        assert!(t.is_trivial());
    }

    #[test]
    fn deltas_respect_diameter() {
        // d=2: two depth-1 nodes meeting at depth 0 gives distance 2 > d-1
        for delta in enumerate_deltas(2, 2) {
            if delta[0][0] == 1 && delta[1][1] == 1 && delta[0][1] >= 0 {
                assert_eq!(delta[0][1], 1, "distance-2 pair must be excluded in F_2");
            }
        }
    }
}
