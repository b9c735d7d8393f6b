//! Rewriting adjacency and equality into lca predicates for evaluation on
//! rooted forests, and compiling exact-set label atoms.

use std::collections::BTreeSet;

use crate::base::Label;
use crate::logic::{Atom, Formula};

/// Replaces every equality and adjacency atom by lca predicates, valid on
/// labeled forests whose trees have depth below `d`:
///
/// - `x = y`  becomes a disjunction over `i` of "both at depth i with lca
///   depth i";
/// - `adj(x,y)` becomes "one is the parent of the other": lca depth equals
///   the smaller depth and depths differ by one.
pub fn lca_express(f: &Formula, d: u32) -> Formula {
    f.map_atoms(&mut |a| match a {
        Atom::Eq(x, y) => {
            let mut disj = Vec::new();
            for i in 0..d as i32 {
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
            for i in 0..(d as i32 - 1) {
                disj.push(Formula::and(vec![
                    Formula::atom(Atom::Lca { i, x: x.clone(), y: y.clone() }),
                    Formula::or(vec![
                        Formula::and(vec![
                            Formula::atom(Atom::Lca { i, x: x.clone(), y: x.clone() }),
                            Formula::atom(Atom::Lca { i: i + 1, x: y.clone(), y: y.clone() }),
                        ]),
                        Formula::and(vec![
                            Formula::atom(Atom::Lca { i: i + 1, x: x.clone(), y: x.clone() }),
                            Formula::atom(Atom::Lca { i, x: y.clone(), y: y.clone() }),
                        ]),
                    ]),
                ]));
            }
            Formula::or(disj)
        }
        other => Formula::Atom(other.clone()),
    })
}

/// Compiles exact-set label atoms into conjunctions of per-label literals
/// over the given alphabet.
pub fn compile_labsets(f: &Formula, alphabet: &BTreeSet<Label>) -> Formula {
    f.map_atoms(&mut |a| match a {
        Atom::LabSet(s, x) => Formula::and(
            alphabet
                .iter()
                .map(|l| {
                    let lit = Formula::atom(Atom::Lab(l.clone(), x.clone()));
                    if s.contains(l) {
                        lit
                    } else {
                        Formula::not(lit)
                    }
                })
                .collect(),
        ),
        other => Formula::Atom(other.clone()),
    })
}
