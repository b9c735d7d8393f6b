//! Basic normal form: any lca-reduced formula as a disjunction of lca-types.

use std::collections::{BTreeMap, BTreeSet};

use crate::base::Label;
use crate::logic::types::enumerate_deltas;
use crate::logic::{enumerate_types, Atom, Formula, LcaType, LogicError, Var};

/// Evaluates a quantifier-free lca-reduced formula given a fixed delta
/// matrix and a lab-atom assignment; atoms not in the assignment stay
/// symbolic.
fn substitute(f: &Formula, vars: &[Var], delta: &[Vec<i32>], labs: &BTreeMap<(usize, Label), bool>) -> Formula {
    let idx = |v: &Var| vars.iter().position(|w| w == v).expect("unknown variable");
    f.map_atoms(&mut |a| match a {
        Atom::Lca { i, x, y } => {
            if delta[idx(x)][idx(y)] == *i {
                Formula::tt()
            } else {
                Formula::ff()
            }
        }
        Atom::Lab(l, x) => {
            // canonicalize to the node representative so co-located
            // variables share their label atoms
            let xi = idx(x);
            let rep = (0..vars.len())
                .find(|&j| delta[xi][j] == delta[xi][xi] && delta[j][j] == delta[xi][xi])
                .unwrap_or(xi);
            match labs.get(&(rep, l.clone())) {
                Some(true) => Formula::tt(),
                Some(false) => Formula::ff(),
                None => Formula::atom(Atom::Lab(l.clone(), vars[rep].clone())),
            }
        }
        other => panic!("basic normal form expects lca-reduced input, found {other:?}"),
    })
}

fn first_lab_atom(f: &Formula, vars: &[Var]) -> Option<(usize, Label)> {
    f.atoms().into_iter().find_map(|a| match a {
        Atom::Lab(l, x) => Some((vars.iter().position(|w| w == &x).unwrap(), l)),
        _ => None,
    })
}

/// The basic normal form over an explicit alphabet: the set of full
/// non-trivial lca-types whose canonical realization satisfies the formula.
/// The disjunction over the result has the same truth set as the input on
/// every labeled forest in `F_d` over that alphabet.
pub fn basic_normal_form(
    zeta: &Formula,
    vars: &[Var],
    d: u32,
    alphabet: &BTreeSet<Label>,
    cap: u64,
) -> Result<Vec<LcaType>, LogicError> {
    let candidates = enumerate_types(vars.len(), d, alphabet, cap)?;
    Ok(candidates
        .into_iter()
        .filter(|t| {
            let labs: BTreeMap<(usize, Label), bool> = t
                .gamma
                .iter()
                .enumerate()
                .flat_map(|(i, g)| g.iter().map(move |(l, b)| ((i, l.clone()), *b)))
                .collect();
            let ev = substitute(zeta, vars, &t.delta, &labs).simplify();
            debug_assert!(ev.is_true() || ev.is_false());
            ev.is_true()
        })
        .collect())
}

/// The basic normal form with sparse label constraints: types constrain only
/// the labels the formula actually depends on (given each delta), so the
/// output stays proportional to the formula rather than to the ambient
/// alphabet. The disjunction over the result has the same truth set as the
/// input on every labeled forest in `F_d`.
pub fn basic_normal_form_sparse(
    zeta: &Formula,
    vars: &[Var],
    d: u32,
    cap: u64,
) -> Result<Vec<LcaType>, LogicError> {
    let k = vars.len();
    let deltas = enumerate_deltas(k, d);
    if deltas.len() as u64 > cap {
        return Err(LogicError::SizeLimit(format!(
            "{} realizable deltas over {k} variables exceed cap {cap}",
            deltas.len()
        )));
    }
    let mut out = Vec::new();
    for delta in deltas {
        let start = substitute(zeta, vars, &delta, &BTreeMap::new()).simplify();
        let mut stack: Vec<(Formula, BTreeMap<(usize, Label), bool>)> =
            vec![(start, BTreeMap::new())];
        while let Some((f, assign)) = stack.pop() {
            if f.is_false() {
                continue;
            }
            if f.is_true() {
                let mut gamma: Vec<BTreeMap<Label, bool>> = vec![BTreeMap::new(); k];
                for ((i, l), b) in &assign {
                    // copy the representative's constraint to all co-located
                    // variables so candidate checks can read any position
                    for j in 0..k {
                        if delta[*i][j] == delta[*i][*i] && delta[j][j] == delta[*i][*i] {
                            gamma[j].insert(l.clone(), *b);
                        }
                    }
                }
                let t = LcaType { k, d, gamma, delta: delta.clone() };
                debug_assert!(!t.is_trivial());
                out.push(t);
                if out.len() as u64 > cap {
                    return Err(LogicError::SizeLimit(format!(
                        "basic normal form exceeds {cap} types"
                    )));
                }
                continue;
            }
            let (i, l) = first_lab_atom(&f, vars).expect("non-constant formula has a lab atom");
            for b in [true, false] {
                let mut a2 = assign.clone();
                a2.insert((i, l.clone()), b);
                let single: BTreeMap<(usize, Label), bool> =
                    [((i, l.clone()), b)].into_iter().collect();
                let f2 = substitute(&f, vars, &delta, &single).simplify();
                stack.push((f2, a2));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::types::type_isomorphism_check;
    use crate::logic::{lca_express, parse_formula};

    fn vars(names: &[&str]) -> Vec<Var> {
        names.iter().map(|n| Var::new(n)).collect()
    }

    /// Brute-force truth check of an lca-reduced formula on a realization.
    fn holds(f: &Formula, vars: &[Var], r: &crate::logic::TypeRealization) -> bool {
        fn eval(
            f: &Formula,
            vars: &[Var],
            r: &crate::logic::TypeRealization,
        ) -> bool {
            match f {
                Formula::Atom(Atom::Lca { i, x, y }) => {
                    let ix = vars.iter().position(|v| v == x).unwrap();
                    let iy = vars.iter().position(|v| v == y).unwrap();
                    r.forest.lca_depth(r.tuple[ix], r.tuple[iy]) == *i
                }
                Formula::Atom(Atom::Lab(l, x)) => {
                    let ix = vars.iter().position(|v| v == x).unwrap();
                    r.labels.has(r.tuple[ix], l)
                }
                Formula::Atom(a) => panic!("unexpected atom {a:?}"),
                Formula::Not(g) => !eval(g, vars, r),
                Formula::And(fs) => fs.iter().all(|g| eval(g, vars, r)),
                Formula::Or(fs) => fs.iter().any(|g| eval(g, vars, r)),
                _ => panic!("quantifier in lca-reduced formula"),
            }
        }
        eval(f, vars, r)
    }

    #[test]
    fn idempotent_on_a_single_type() {
        let alphabet: BTreeSet<Label> = [Label::sym("a")].into();
        let ts = enumerate_types(2, 2, &alphabet, 1_000_000).unwrap();
        let t = &ts[3];
        let vs = vars(&["x", "y"]);
        let f = t.formula(&vs);
        let i = basic_normal_form(&f, &vs, 2, &alphabet, 1_000_000).unwrap();
        assert_eq!(i.len(), 1);
        assert_eq!(&i[0], t);
    }

    #[test]
    fn contradiction_gives_empty_set() {
        let f = parse_formula("lca[0](x,x) & !lca[0](x,x)").unwrap();
        let vs = vars(&["x"]);
        let i = basic_normal_form(&f, &vs, 2, &BTreeSet::new(), 1_000_000).unwrap();
        assert!(i.is_empty());
        let s = basic_normal_form_sparse(&f, &vs, 2, 1_000_000).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn triangle_example_types() {
        // adj(x1,x2) & adj(x1,x3) & lab_1(x1) & lab_0(x2) & lab_0(x3),
        // lca-expressed for forests of depth < 4: the types come in the
        // three shapes of the worked example (x1 parent of both, or x1
        // between, in two orders).
        let src = "adj(x1,x2) & adj(x1,x3) & lab[1](x1) & lab[0](x2) & lab[0](x3)";
        let f = lca_express(&parse_formula(src).unwrap(), 4);
        let vs = vars(&["x1", "x2", "x3"]);
        let i = basic_normal_form_sparse(&f, &vs, 4, 1_000_000).unwrap();
        assert!(!i.is_empty());
        for t in &i {
            let r = t.realize().unwrap();
            assert!(holds(&f, &vs, &r), "realization of a member type satisfies the formula");
            // x1 adjacent to both in the forest sense: parent/child depth gap 1
            let d12 = (t.delta[0][0] - t.delta[1][1]).abs();
            let d13 = (t.delta[0][0] - t.delta[2][2]).abs();
            assert_eq!(d12, 1);
            assert_eq!(d13, 1);
        }
        // all three shapes appear at some depth
        let shapes: BTreeSet<(bool, bool)> = i
            .iter()
            .map(|t| (t.delta[1][1] > t.delta[0][0], t.delta[2][2] > t.delta[0][0]))
            .collect();
        assert!(shapes.contains(&(true, true)), "x1 above both");
        assert!(shapes.contains(&(true, false)), "x3 above x1 above x2");
        assert!(shapes.contains(&(false, true)), "x2 above x1 above x3");
    }

    #[test]
    fn sparse_and_full_agree_on_realizations() {
        // the sparse form is coarser, but both must agree pointwise with
        // the original formula on every full type's realization
        let alphabet: BTreeSet<Label> = [Label::sym("a"), Label::sym("b")].into();
        let src = "lca[0](x,y) & (lab[a](x) | !lab[b](y))";
        let f = parse_formula(src).unwrap();
        let vs = vars(&["x", "y"]);
        let full = basic_normal_form(&f, &vs, 2, &alphabet, 1_000_000).unwrap();
        let sparse = basic_normal_form_sparse(&f, &vs, 2, 1_000_000).unwrap();
        for t in enumerate_types(2, 2, &alphabet, 1_000_000).unwrap() {
            let r = t.realize().unwrap();
            let truth = holds(&f, &vs, &r);
            let in_full = full
                .iter()
                .any(|u| type_isomorphism_check(&r.forest, &r.labels, &r.tuple, u));
            let in_sparse = sparse
                .iter()
                .any(|u| type_isomorphism_check(&r.forest, &r.labels, &r.tuple, u));
            assert_eq!(truth, in_full);
            assert_eq!(truth, in_sparse);
        }
    }

    #[test]
    fn sparse_members_are_mutually_exclusive() {
        let src = "lab[a](x) | lab[b](x) | lca[1](x,x)";
        let f = parse_formula(src).unwrap();
        let vs = vars(&["x"]);
        let sparse = basic_normal_form_sparse(&f, &vs, 3, 1_000_000).unwrap();
        for (i, t1) in sparse.iter().enumerate() {
            for t2 in &sparse[i + 1..] {
                if t1.delta != t2.delta {
                    continue;
                }
                // same delta: must conflict on some cared label
                let conflict = t1.gamma.iter().zip(&t2.gamma).any(|(g1, g2)| {
                    g1.iter().any(|(l, b)| g2.get(l).map_or(false, |b2| b2 != b))
                });
                assert!(conflict, "overlapping types in sparse normal form");
            }
        }
    }
}
