//! Quantifier elimination over labeled rooted forests: one existential
//! variable at a time, dispatching on the three positions the witness can
//! take relative to the kept variables (ancestor, below a pivot, or in a
//! separate tree).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::base::{FreshBase, Label, Labeling, VertexId};
use crate::graph::RootedForest;
use crate::logic::{basic_normal_form_sparse, Atom, Formula, LcaType, Var};
use crate::qelim::{QelimError, StageAlloc, TYPE_CAP};

/// Elimination case of one lca-type, per the position of the witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ElimCase {
    /// The witness is an ancestor of a kept variable (h_y = h).
    AncestorWitness,
    /// The witness hangs below a pivot node on a kept path (h_y > h).
    PivotCount,
    /// The witness lies in a tree disjoint from all kept variables.
    ActiveRoots,
}

/// The plan for eliminating the last variable of one lca-type: everything
/// needed to compute the enriched labeling and the reduced formula, and to
/// replay the labeling as a distributed program or a certificate check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TypeElimStep {
    pub stage: u32,
    pub tidx: u32,
    pub case: ElimCase,
    /// The (k+1)-variable type; the eliminated variable is last.
    pub psi: LcaType,
    /// Index of the kept variable with the deepest meet with the witness.
    pub s: usize,
    /// Meet depth of variable `s` and the witness (-1 in the disjoint case).
    pub h: i32,
    pub h_s: i32,
    pub h_y: i32,
    /// The reduced formula over the kept variables.
    pub reduced: Formula,
}

impl TypeElimStep {
    pub fn good_label(&self) -> Label {
        Label::Fresh { stage: self.stage, tidx: self.tidx, base: FreshBase::Good }
    }

    pub fn branch_good_label(&self) -> Label {
        Label::Fresh { stage: self.stage, tidx: self.tidx, base: FreshBase::BranchGood }
    }

    pub fn count_label(&self, m: u32) -> Label {
        Label::Fresh { stage: self.stage, tidx: self.tidx, base: FreshBase::Count(m) }
    }

    /// Whether a node's labels match the eliminated variable's constraint.
    pub fn is_candidate(&self, labels: &Labeling, v: VertexId) -> bool {
        let k = self.psi.k - 1;
        self.psi.gamma[k]
            .iter()
            .all(|(l, req)| labels.has(v, l) == *req)
    }
}

/// One full variable elimination: the basic normal form of the current
/// matrix and the per-type steps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElimRound {
    pub var: Var,
    pub steps: Vec<TypeElimStep>,
}

/// Result of eliminating an existential block over a labeled forest.
#[derive(Debug, Clone)]
pub struct ForestReduction {
    pub formula: Formula,
    pub labels: Labeling,
    pub rounds: Vec<ElimRound>,
}

/// Whether the eliminated variable can arise in this forest at all: some
/// assignment of the type's variables to forest members realizes it.
pub fn type_realizable_in(forest: &RootedForest, labels: &Labeling, psi: &LcaType) -> bool {
    let members: Vec<VertexId> = forest.member_set().into_iter().collect();
    fn place(
        i: usize,
        chosen: &mut Vec<VertexId>,
        members: &[VertexId],
        forest: &RootedForest,
        labels: &Labeling,
        psi: &LcaType,
    ) -> bool {
        if i == psi.k {
            return true;
        }
        for &v in members {
            if forest.depth(v) != Some(psi.delta[i][i] as u32) {
                continue;
            }
            if !psi.gamma[i].iter().all(|(l, req)| labels.has(v, l) == *req) {
                continue;
            }
            if !(0..i).all(|j| forest.lca_depth(chosen[j], v) == psi.delta[j][i]) {
                continue;
            }
            chosen.push(v);
            if place(i + 1, chosen, members, forest, labels, psi) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    place(0, &mut Vec::new(), &members, forest, labels, psi)
}

/// Branch classes of the kept variables strictly below a meet depth `h`
/// relative to variable `s`: variables descending from the pivot, grouped by
/// their depth-(h+1) ancestor.
fn branches_below_pivot(psi: &LcaType, k: usize, s: usize, h: i32) -> Vec<Vec<usize>> {
    let members: Vec<usize> = (0..k)
        .filter(|&j| psi.delta[j][s] >= h && psi.delta[j][j] > h)
        .collect();
    group_by(&members, |&a, &b| psi.delta[a][b] > h)
}

/// Tree classes of the kept variables (same-tree equivalence).
fn tree_classes(psi: &LcaType, k: usize) -> Vec<Vec<usize>> {
    let members: Vec<usize> = (0..k).collect();
    group_by(&members, |&a, &b| psi.delta[a][b] >= 0)
}

fn group_by(items: &[usize], related: impl Fn(&usize, &usize) -> bool) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &x in items {
        let mut joined: Vec<usize> = Vec::new();
        for (gi, g) in groups.iter().enumerate() {
            if g.iter().any(|y| related(&x, y)) {
                joined.push(gi);
            }
        }
        match joined.len() {
            0 => groups.push(vec![x]),
            _ => {
                // merge all joined groups into the first
                let mut merged = vec![x];
                for gi in joined.iter().rev() {
                    merged.extend(groups.remove(*gi));
                }
                merged.sort_unstable();
                groups.push(merged);
            }
        }
    }
    groups.sort();
    groups
}

/// The clamped-counter comparison formula: "the stored count exceeds the
/// number of marked branches". `marker` maps a variable index to the label
/// whose presence means the variable's branch holds a witness candidate.
fn count_exceeds_marked(
    step_counts: &dyn Fn(u32) -> Label,
    marker: &Label,
    count_carrier: &Var,
    branches: &[Vec<usize>],
    kept: &[Var],
    k_plus_one: u32,
) -> Formula {
    // branches listed here all contain kept variables; the witness's own
    // (variable-free) branch only shifts the count bound by one, which the
    // range of q below accounts for
    let p = branches.len() as u32 + 1;
    let mut disj = Vec::new();
    for q in 1..=p {
        let count_ok = Formula::or(
            (q..=k_plus_one)
                .map(|m| Formula::atom(Atom::Lab(step_counts(m), count_carrier.clone())))
                .collect(),
        );
        let mut subset_disj = Vec::new();
        for mask in 0u32..(1 << branches.len()) {
            if mask.count_ones() > q - 1 {
                continue;
            }
            let mut conj = Vec::new();
            for (bi, branch) in branches.iter().enumerate() {
                if mask & (1 << bi) != 0 {
                    conj.push(Formula::or(
                        branch
                            .iter()
                            .map(|&j| Formula::atom(Atom::Lab(marker.clone(), kept[j].clone())))
                            .collect(),
                    ));
                } else {
                    for &j in branch {
                        conj.push(Formula::not(Formula::atom(Atom::Lab(
                            marker.clone(),
                            kept[j].clone(),
                        ))));
                    }
                }
            }
            subset_disj.push(Formula::and(conj));
        }
        disj.push(Formula::and(vec![count_ok, Formula::or(subset_disj)]));
    }
    Formula::or(disj)
}

/// Plans the elimination of the last variable of a non-trivial type over
/// `kept.len() + 1` variables. Local mode rejects the disjoint-tree case.
pub fn eliminate_type_forest(
    psi: &LcaType,
    kept: &[Var],
    local_mode: bool,
    stage: u32,
    tidx: u32,
) -> Result<TypeElimStep, QelimError> {
    let k = kept.len();
    if psi.k != k + 1 || k == 0 {
        return Err(QelimError::Shape(format!(
            "type arity {} does not extend {} kept variables",
            psi.k, k
        )));
    }
    let h_y = psi.delta[k][k];
    let s = (0..k)
        .max_by_key(|&j| (psi.delta[j][k], std::cmp::Reverse(j)))
        .unwrap();
    let h = psi.delta[s][k];
    let h_s = psi.delta[s][s];
    let xi = psi.restrict(k);
    let mut step = TypeElimStep {
        stage,
        tidx,
        case: ElimCase::AncestorWitness,
        psi: psi.clone(),
        s,
        h,
        h_s,
        h_y,
        reduced: Formula::ff(),
    };
    if h >= 0 && h_y == h {
        step.case = ElimCase::AncestorWitness;
        step.reduced = Formula::and(vec![
            xi.formula(kept),
            Formula::atom(Atom::Lab(step.good_label(), kept[s].clone())),
        ]);
    } else if h >= 0 {
        step.case = ElimCase::PivotCount;
        let branches = branches_below_pivot(psi, k, s, h);
        let counts = |m: u32| step.count_label(m);
        let alpha = count_exceeds_marked(
            &counts,
            &step.branch_good_label(),
            &kept[s],
            &branches,
            kept,
            k as u32 + 1,
        );
        step.reduced = Formula::and(vec![xi.formula(kept), alpha]);
    } else {
        if local_mode {
            return Err(QelimError::LocalModeDisconnected);
        }
        step.case = ElimCase::ActiveRoots;
        let trees = tree_classes(psi, k);
        let counts = |m: u32| step.count_label(m);
        let alpha = count_exceeds_marked(
            &counts,
            &step.good_label(),
            &kept[0],
            &trees,
            kept,
            k as u32 + 1,
        );
        step.reduced = Formula::and(vec![xi.formula(kept), alpha]);
    }
    Ok(step)
}

/// Executes a step's labeling over the forest: the labels added on top of
/// the input labeling. Mirrors the message-passing construction: pings from
/// candidate nodes travel along tree edges, then counters are broadcast.
pub fn step_labels(step: &TypeElimStep, forest: &RootedForest, labels: &Labeling) -> Labeling {
    let mut add = Labeling::new();
    let members: Vec<VertexId> = forest.member_set().into_iter().collect();
    let k_plus_one = step.psi.k as u32;
    match step.case {
        ElimCase::AncestorWitness => {
            for &w in &members {
                if forest.depth(w) != Some(step.h_s as u32) {
                    continue;
                }
                if let Some(anc) = forest.ancestor_at_depth(w, step.h as u32) {
                    if step.is_candidate(labels, anc) {
                        add.add(w, step.good_label());
                    }
                }
            }
        }
        ElimCase::PivotCount => {
            let candidates: BTreeSet<VertexId> = members
                .iter()
                .copied()
                .filter(|&v| {
                    forest.depth(v) == Some(step.h_y as u32) && step.is_candidate(labels, v)
                })
                .collect();
            // good: strictly below the pivot depth with a candidate descendant
            let mut good: BTreeSet<VertexId> = BTreeSet::new();
            for &c in &candidates {
                for a in forest.root_path(c) {
                    if forest.depth(a).unwrap() as i32 > step.h {
                        good.insert(a);
                    }
                }
            }
            for &v in &good {
                add.add(v, step.good_label());
            }
            // branch-good: the depth-(h+1) ancestor is good; propagated
            // downward so every tuple variable can read its branch's status
            for &w in &members {
                let dw = forest.depth(w).unwrap() as i32;
                if dw > step.h {
                    if let Some(anc) = forest.ancestor_at_depth(w, (step.h + 1) as u32) {
                        if good.contains(&anc) {
                            add.add(w, step.branch_good_label());
                        }
                    }
                }
            }
            // counts on depth h_s nodes: number of good children of the
            // pivot ancestor, clamped at k+1
            for &w in &members {
                if forest.depth(w) != Some(step.h_s as u32) {
                    continue;
                }
                if let Some(z) = forest.ancestor_at_depth(w, step.h as u32) {
                    let kappa = forest
                        .children(z)
                        .into_iter()
                        .filter(|c| good.contains(c))
                        .count() as u32;
                    add.add(w, step.count_label(kappa.min(k_plus_one)));
                }
            }
        }
        ElimCase::ActiveRoots => {
            let candidates: BTreeSet<VertexId> = members
                .iter()
                .copied()
                .filter(|&v| {
                    forest.depth(v) == Some(step.h_y as u32) && step.is_candidate(labels, v)
                })
                .collect();
            let active: BTreeSet<VertexId> = forest
                .roots()
                .into_iter()
                .filter(|&r| candidates.iter().any(|&c| forest.root_of(c) == r))
                .collect();
            let rho = active.len() as u32;
            for &v in &members {
                add.add(v, step.count_label(rho.min(k_plus_one)));
                if active.contains(&forest.root_of(v)) {
                    add.add(v, step.good_label());
                }
            }
        }
    }
    add
}

/// Eliminates an existential block over a labeled forest, innermost variable
/// first. `zeta` must be lca-reduced (only lca and label atoms) over
/// `kept ++ elim`. Returns the reduced formula, the enriched labeling, and
/// the per-variable rounds for replay.
#[allow(clippy::too_many_arguments)]
pub fn reduce_existential_forest(
    kept: &[Var],
    elim: &[Var],
    zeta: &Formula,
    forest: &RootedForest,
    labels: &Labeling,
    d: u32,
    local_mode: bool,
    alloc: &mut StageAlloc,
) -> Result<ForestReduction, QelimError> {
    for a in zeta.atoms() {
        if !matches!(a, Atom::Lca { .. } | Atom::Lab(..)) {
            return Err(QelimError::Shape(format!(
                "forest elimination expects an lca-reduced formula, found {a:?}"
            )));
        }
    }
    let mut current = zeta.simplify();
    let mut labels_cur = labels.clone();
    let mut rounds = Vec::new();
    let mut remaining: Vec<Var> = elim.to_vec();
    while let Some(var) = remaining.pop() {
        let mut vars_now: Vec<Var> = kept.to_vec();
        vars_now.extend(remaining.iter().cloned());
        vars_now.push(var.clone());
        let types = basic_normal_form_sparse(&current, &vars_now, d, TYPE_CAP)?;
        let stage = alloc.fresh();
        let mut steps = Vec::new();
        let mut disj = Vec::new();
        let kept_now = &vars_now[..vars_now.len() - 1];
        for (tidx, psi) in types.into_iter().enumerate() {
            // skip type shapes this forest cannot realize; sound because the
            // reduction contract is stated on the given structure
            if !type_realizable_in(forest, &labels_cur, &psi) {
                continue;
            }
            let step = eliminate_type_forest(&psi, kept_now, local_mode, stage, tidx as u32)?;
            let add = step_labels(&step, forest, &labels_cur);
            labels_cur.union_with(&add);
            disj.push(step.reduced.clone());
            steps.push(step);
        }
        current = Formula::or(disj).simplify();
        rounds.push(ElimRound { var, steps });
    }
    Ok(ForestReduction { formula: current, labels: labels_cur, rounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::lca_express;
    use crate::logic::parse_formula;
    use crate::oracle::{truth_set, Structure};

    fn vars(names: &[&str]) -> Vec<Var> {
        names.iter().map(|n| Var::new(n)).collect()
    }

    /// Checks the reduction contract on a given forest: the truth set of
    /// `exists elim. zeta` on (F, l) equals the truth set of the reduced
    /// formula on (F, l-hat).
    fn check_contract(
        kept: &[Var],
        elim: &[Var],
        zeta: &Formula,
        forest: &RootedForest,
        labels: &Labeling,
        d: u32,
    ) {
        let mut alloc = StageAlloc::new();
        let red =
            reduce_existential_forest(kept, elim, zeta, forest, labels, d, false, &mut alloc)
                .unwrap();
        assert!(red.formula.is_quantifier_free());
        let wrapped = Formula::exists_many(elim, zeta.clone());
        let want = truth_set(&wrapped, Structure::forest(forest, labels), kept).unwrap();
        let got = truth_set(&red.formula, Structure::forest(forest, &red.labels), kept).unwrap();
        assert_eq!(want.tuples, got.tuples, "reduction truth set mismatch");
    }

    #[test]
    fn case1_rooted_edge() {
        // F: 1 -> 2, node 1 labeled {a}; exists y: y ancestor (depth 0,
        // labeled a) of x (depth 1)
        let mut f = RootedForest::new();
        f.add_root(VertexId(1));
        f.add_child(VertexId(1), VertexId(2));
        let mut labels = Labeling::new();
        labels.add(VertexId(1), Label::sym("a"));
        let zeta = parse_formula("lca[1](x,x) & lca[0](x,y) & lca[0](y,y) & lab[a](y)").unwrap();
        check_contract(&vars(&["x"]), &vars(&["y"]), &zeta, &f, &labels, 2);
    }

    #[test]
    fn case2_star_second_good_child() {
        // F: root 1, children 2 and 3, both labeled b; x at depth 1, y at
        // depth 1, meeting at depth 0: a sibling with label b must exist
        let mut f = RootedForest::new();
        f.add_root(VertexId(1));
        f.add_child(VertexId(1), VertexId(2));
        f.add_child(VertexId(1), VertexId(3));
        let mut labels = Labeling::new();
        labels.add(VertexId(2), Label::sym("b"));
        labels.add(VertexId(3), Label::sym("b"));
        let zeta =
            parse_formula("lca[1](x,x) & lca[1](y,y) & lca[0](x,y) & lab[b](y)").unwrap();
        check_contract(&vars(&["x"]), &vars(&["y"]), &zeta, &f, &labels, f.fd_bound());
    }

    #[test]
    fn case3_two_singleton_roots() {
        // F: two singleton roots, node 2 labeled c: exists y in a different
        // tree labeled c
        let mut f = RootedForest::new();
        f.add_root(VertexId(1));
        f.add_root(VertexId(2));
        let mut labels = Labeling::new();
        labels.add(VertexId(2), Label::sym("c"));
        let zeta = parse_formula("lca[0](x,x) & lca[0](y,y) & lca[-1](x,y) & lab[c](y)").unwrap();
        check_contract(&vars(&["x"]), &vars(&["y"]), &zeta, &f, &labels, 1);
    }

    #[test]
    fn local_mode_rejects_disconnected() {
        let psi = LcaType {
            k: 2,
            d: 1,
            gamma: vec![BTreeMap::new(), BTreeMap::new()],
            delta: vec![vec![0, -1], vec![-1, 0]],
        };
        let err = eliminate_type_forest(&psi, &vars(&["x"]), true, 1, 0);
        assert!(matches!(err, Err(QelimError::LocalModeDisconnected)));
    }

    #[test]
    fn zero_eliminations_is_identity() {
        let mut f = RootedForest::new();
        f.add_root(VertexId(1));
        let labels = Labeling::new();
        let zeta = parse_formula("lca[0](x,x)").unwrap();
        let mut alloc = StageAlloc::new();
        let red = reduce_existential_forest(
            &vars(&["x"]),
            &[],
            &zeta,
            &f,
            &labels,
            1,
            false,
            &mut alloc,
        )
        .unwrap();
        assert_eq!(red.formula, zeta.simplify());
        assert_eq!(&red.labels, &labels);
    }

    #[test]
    fn adjacency_on_path_forest() {
        // rooted path 1 -> 2 -> 3; exists y adjacent (in the forest) to x
        let mut f = RootedForest::new();
        f.add_root(VertexId(1));
        f.add_child(VertexId(1), VertexId(2));
        f.add_child(VertexId(2), VertexId(3));
        let labels = Labeling::new();
        let adj = parse_formula("adj(x,y)").unwrap();
        let zeta = lca_express(&adj, 3);
        check_contract(&vars(&["x"]), &vars(&["y"]), &zeta, &f, &labels, f.fd_bound());
    }

    #[test]
    fn random_forests_against_oracle() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for round in 0..60 {
            // random forest on up to 6 nodes, depth < 4
            let n = rng.gen_range(1..=6u32);
            let mut f = RootedForest::new();
            for v in 1..=n {
                if v == 1 || rng.gen_bool(0.3) {
                    f.add_root(VertexId(v));
                } else {
                    let parent = VertexId(rng.gen_range(1..v));
                    if f.depth(parent).unwrap() < 3 {
                        f.add_child(parent, VertexId(v));
                    } else {
                        f.add_root(VertexId(v));
                    }
                }
            }
            let mut labels = Labeling::new();
            for v in 1..=n {
                if rng.gen_bool(0.5) {
                    labels.add(VertexId(v), Label::sym("a"));
                }
            }
            let d = f.fd_bound();
            // random lca-reduced formula over (x, y): a small conjunction /
            // disjunction of lca and lab atoms
            let pool = [
                "lca[0](x,y)",
                "lca[-1](x,y)",
                "lca[0](y,y)",
                "lca[1](y,y)",
                "lab[a](y)",
                "!lab[a](y)",
                "lab[a](x)",
                "lca[1](x,x)",
                "lca[0](x,x)",
            ];
            let pick = |rng: &mut rand_chacha::ChaCha8Rng| {
                parse_formula(pool[rng.gen_range(0..pool.len())]).unwrap()
            };
            let zeta = if round % 2 == 0 {
                Formula::and(vec![pick(&mut rng), pick(&mut rng), pick(&mut rng)])
            } else {
                Formula::or(vec![
                    Formula::and(vec![pick(&mut rng), pick(&mut rng)]),
                    pick(&mut rng),
                ])
            };
            check_contract(&vars(&["x"]), &vars(&["y"]), &zeta, &f, &labels, d);
        }
    }

    #[test]
    fn two_variable_elimination() {
        // rooted path 1 -> 2 -> 3 with label a on node 3:
        // exists y1 y2: x parent-related chain via lca atoms
        let mut f = RootedForest::new();
        f.add_root(VertexId(1));
        f.add_child(VertexId(1), VertexId(2));
        f.add_child(VertexId(2), VertexId(3));
        let mut labels = Labeling::new();
        labels.add(VertexId(3), Label::sym("a"));
        let adj1 = lca_express(&parse_formula("adj(x,y1)").unwrap(), 3);
        let adj2 = lca_express(&parse_formula("adj(y1,y2)").unwrap(), 3);
        let laby2 = parse_formula("lab[a](y2)").unwrap();
        let zeta = Formula::and(vec![adj1, adj2, laby2]);
        check_contract(&vars(&["x"]), &vars(&["y1", "y2"]), &zeta, &f, &labels, 3);
    }
}
