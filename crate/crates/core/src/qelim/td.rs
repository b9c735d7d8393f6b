//! Reduction from treedepth-bounded induced subgraphs to their
//! decomposition forests.

use crate::base::{FreshBase, Label, Labeling};
use crate::graph::{LabeledGraph, RootedForest};
use crate::logic::{Atom, Formula, Var, VarGen};
use crate::qelim::forest::{reduce_existential_forest, ElimRound};
use crate::qelim::{QelimError, StageAlloc};

/// Result of a treedepth-level reduction: an lca-reduced formula on the
/// decomposition forest, the enriched labeling, and replay data.
#[derive(Debug, Clone)]
pub struct TdReduction {
    pub formula: Formula,
    pub labels: Labeling,
    pub level_stage: u32,
    pub rounds: Vec<ElimRound>,
    /// Path witnesses introduced for small-radius ball atoms.
    pub ball_witnesses: Vec<Var>,
}

/// The level labels and the adjacency/equality rewriting of one
/// quantifier-free formula onto a decomposition forest of `host`.
///
/// Every vertex of the forest is labeled with the depths of its forest
/// ancestors adjacent to it in the host; adjacency then reads off the level
/// label on the deeper endpoint, and equality becomes an lca profile.
pub fn treedepth_to_forest(
    zeta: &Formula,
    host: &LabeledGraph,
    forest: &RootedForest,
    labels: &Labeling,
    level_stage: u32,
) -> (Formula, Labeling) {
    let level = |i: u32| Label::Fresh { stage: level_stage, tidx: 0, base: FreshBase::Level(i) };
    let mut new_labels = labels.clone();
    for v in forest.members() {
        let path = forest.root_path(v);
        for anc in &path[..path.len().saturating_sub(1)] {
            if host.has_edge(*anc, v) {
                new_labels.add(v, level(forest.depth(*anc).unwrap()));
            }
        }
    }
    let dmax = forest.max_depth() as i32;
    let rewritten = zeta.map_atoms(&mut |a| match a {
        Atom::Eq(x, y) => {
            let mut disj = Vec::new();
            for i in 0..=dmax {
                disj.push(Formula::and(vec![
                    Formula::atom(Atom::Lca { i, x: x.clone(), y: x.clone() }),
                    Formula::atom(Atom::Lca { i, x: x.clone(), y: y.clone() }),
                    Formula::atom(Atom::Lca { i, x: y.clone(), y: y.clone() }),
                ]));
            }
            Formula::or(disj)
        }
        Atom::Adj(x, y) => {
            let mut disj = Vec::new();
            for i in 0..dmax {
                for j in (i + 1)..=dmax {
                    for (deep, shallow) in [(x, y), (y, x)] {
                        disj.push(Formula::and(vec![
                            Formula::atom(Atom::Lca { i: j, x: deep.clone(), y: deep.clone() }),
                            Formula::atom(Atom::Lca { i, x: shallow.clone(), y: shallow.clone() }),
                            Formula::atom(Atom::Lca { i, x: deep.clone(), y: shallow.clone() }),
                            Formula::atom(Atom::Lab(level(i as u32), deep.clone())),
                        ]));
                    }
                }
            }
            Formula::or(disj)
        }
        other => Formula::Atom(other.clone()),
    });
    (rewritten.simplify(), new_labels)
}

/// Eliminates an existential block over a treedepth-bounded induced
/// subgraph by composing the forest rewriting with forest-level quantifier
/// elimination. Ball atoms are interpreted in the host subgraph: radii
/// covering its components become same-tree constraints, smaller radii are
/// first expanded into relativized path witnesses.
#[allow(clippy::too_many_arguments)]
pub fn reduce_existential_td(
    kept: &[Var],
    elim: &[Var],
    zeta: &Formula,
    host: &LabeledGraph,
    forest: &RootedForest,
    labels: &Labeling,
    local_mode: bool,
    alloc: &mut StageAlloc,
    gen: &mut VarGen,
) -> Result<TdReduction, QelimError> {
    let diam = host
        .components()
        .into_iter()
        .map(|c| host.induced(&c).diameter())
        .max()
        .unwrap_or(0);
    // replace ball atoms: the formula is quantifier-free, so after negation
    // normal form, polarity of each ball atom is syntactically visible
    let nnf = zeta.nnf();
    let mut witnesses: Vec<Var> = Vec::new();
    let replaced = replace_balls(&nnf, diam, gen, &mut witnesses)?;
    let level_stage = alloc.fresh();
    let (rewritten, new_labels) =
        treedepth_to_forest(&replaced, host, forest, labels, level_stage);
    let mut all_elim: Vec<Var> = elim.to_vec();
    all_elim.extend(witnesses.iter().cloned());
    let red = reduce_existential_forest(
        kept,
        &all_elim,
        &rewritten,
        forest,
        &new_labels,
        forest.fd_bound(),
        local_mode,
        alloc,
    )?;
    Ok(TdReduction {
        formula: red.formula,
        labels: red.labels,
        level_stage,
        rounds: red.rounds,
        ball_witnesses: witnesses,
    })
}

fn replace_balls(
    f: &Formula,
    diam: u32,
    gen: &mut VarGen,
    witnesses: &mut Vec<Var>,
) -> Result<Formula, QelimError> {
    match f {
        Formula::Atom(Atom::Ball { y, x, r }) => {
            if *r >= diam {
                // a component-covering ball is exactly same-tree membership
                Ok(Formula::not(Formula::atom(Atom::Lca {
                    i: -1,
                    x: x.clone(),
                    y: y.clone(),
                })))
            } else {
                // path witnesses, themselves confined to the component
                let ws: Vec<Var> = (0..=*r).map(|_| gen.fresh("w")).collect();
                let mut body = vec![crate::logic::beta_body(x, y, &ws)];
                for w in &ws {
                    body.push(Formula::not(Formula::atom(Atom::Lca {
                        i: -1,
                        x: x.clone(),
                        y: w.clone(),
                    })));
                }
                witnesses.extend(ws);
                Ok(Formula::and(body))
            }
        }
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Atom(Atom::Ball { y, x, r }) => {
                if *r >= diam {
                    Ok(Formula::atom(Atom::Lca { i: -1, x: x.clone(), y: y.clone() }))
                } else {
                    Err(QelimError::Shape(
                        "negated small-radius ball atoms cannot be eliminated here".into(),
                    ))
                }
            }
            _ => Ok(Formula::not(replace_balls(inner, diam, gen, witnesses)?)),
        },
        Formula::And(fs) => Ok(Formula::And(
            fs.iter()
                .map(|g| replace_balls(g, diam, gen, witnesses))
                .collect::<Result<_, _>>()?,
        )),
        Formula::Or(fs) => Ok(Formula::Or(
            fs.iter()
                .map(|g| replace_balls(g, diam, gen, witnesses))
                .collect::<Result<_, _>>()?,
        )),
        Formula::Atom(_) => Ok(f.clone()),
        Formula::Exists(..) | Formula::Forall(..) => Err(QelimError::Shape(
            "ball replacement expects a quantifier-free formula".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::decomposition_forest;
    use crate::logic::{parse_formula, parse_formula_file};
    use crate::oracle::{truth_set, Structure};

    fn check_td(kept: &[Var], elim: &[Var], zeta: &Formula, host: &LabeledGraph) {
        let forest = decomposition_forest(host);
        let mut alloc = StageAlloc::new();
        let mut gen = VarGen::new();
        let red = reduce_existential_td(
            kept,
            elim,
            zeta,
            host,
            &forest,
            host.labels(),
            false,
            &mut alloc,
            &mut gen,
        )
        .unwrap();
        let wrapped = Formula::exists_many(elim, zeta.clone());
        let want = truth_set(&wrapped, Structure::graph(host), kept).unwrap();
        let got =
            truth_set(&red.formula, Structure::forest(&forest, &red.labels), kept).unwrap();
        assert_eq!(want.tuples, got.tuples);
    }

    #[test]
    fn single_edge_adjacency() {
        let host = LabeledGraph::from_edges(2, &[(1, 2)]);
        let ff = parse_formula_file("adj(x,y)").unwrap();
        check_td(&ff.free, &[], &ff.formula, &host);
    }

    #[test]
    fn edgeless_adjacency_unsatisfiable() {
        let host = LabeledGraph::from_edges(3, &[]);
        let ff = parse_formula_file("adj(x,y)").unwrap();
        let forest = decomposition_forest(&host);
        let mut alloc = StageAlloc::new();
        let mut gen = VarGen::new();
        let red = reduce_existential_td(
            &ff.free,
            &[],
            &ff.formula,
            &host,
            &forest,
            host.labels(),
            false,
            &mut alloc,
            &mut gen,
        )
        .unwrap();
        assert!(red.formula.is_false());
    }

    #[test]
    fn triangle_truth_set() {
        let host = LabeledGraph::from_edges(3, &[(1, 2), (1, 3), (2, 3)]);
        let ff = parse_formula_file("adj(x,y) & adj(y,z) & adj(x,z)").unwrap();
        // all 6 ordered tuples of the triangle survive the rewriting
        check_td(&ff.free, &[], &ff.formula, &host);
    }

    #[test]
    fn one_elimination_on_triangle() {
        let host = LabeledGraph::from_edges(3, &[(1, 2), (1, 3), (2, 3)]);
        let ff = parse_formula_file("adj(x,y) & adj(y,z) & adj(x,z)").unwrap();
        let (kept, elim) = (&ff.free[..2], &ff.free[2..]);
        check_td(kept, elim, &ff.formula, &host);
    }

    #[test]
    fn path7_ball_and_adjacency() {
        let edges: Vec<(u32, u32)> = (1..7).map(|i| (i, i + 1)).collect();
        let host = LabeledGraph::from_edges(7, &edges);
        let ff = parse_formula_file("free x; exists y. ball(y,x,7) & adj(x,y)").unwrap();
        let (prefix, matrix) = ff.formula.strip_prefix();
        let elim: Vec<Var> = prefix.into_iter().map(|(_, v)| v).collect();
        check_td(&ff.free, &elim, &matrix, &host);
    }

    #[test]
    fn small_radius_ball_expansion() {
        // ball of radius 1 on a path: closed neighborhoods only
        let edges: Vec<(u32, u32)> = (1..5).map(|i| (i, i + 1)).collect();
        let host = LabeledGraph::from_edges(5, &edges);
        let f = parse_formula("ball(y,x,1)").unwrap();
        let vars = vec![Var::new("x"), Var::new("y")];
        check_td(&vars, &[], &f, &host);
    }

    #[test]
    fn equality_via_lca() {
        let host = LabeledGraph::from_edges(4, &[(1, 2), (2, 3)]);
        let f = parse_formula("x = y").unwrap();
        let vars = vec![Var::new("x"), Var::new("y")];
        check_td(&vars, &[], &f, &host);
    }

    #[test]
    fn labels_with_negation() {
        let mut host = LabeledGraph::from_edges(4, &[(1, 2), (2, 3), (3, 4)]);
        host.add_label(crate::base::VertexId(2), Label::sym("a"));
        let ff = parse_formula_file("free x; exists y. adj(x,y) & !lab[a](y)").unwrap();
        let (prefix, matrix) = ff.formula.strip_prefix();
        let elim: Vec<Var> = prefix.into_iter().map(|(_, v)| v).collect();
        check_td(&ff.free, &elim, &matrix, &host);
    }
}
