//! Prenex normal form for plain FO[Λ] formulas.

use crate::logic::{Formula, Quant, Var, VarGen};

/// Pulls all quantifiers to the front. The input must not contain ball, lca,
/// color, or depth atoms (those are introduced only after prenexing).
/// Quantified variables are renamed apart while being pulled out, so no
/// capture can occur.
pub fn to_prenex(f: &Formula, gen: &mut VarGen) -> Formula {
    let (prefix, matrix) = prenex(f, false, gen);
    prefix
        .into_iter()
        .rev()
        .fold(matrix, |acc, (q, v)| Formula::quant(q, v, acc))
}

fn prenex(f: &Formula, neg: bool, gen: &mut VarGen) -> (Vec<(Quant, Var)>, Formula) {
    match f {
        Formula::Atom(_) => (
            vec![],
            if neg { Formula::not(f.clone()) } else { f.clone() },
        ),
        Formula::Not(g) => prenex(g, !neg, gen),
        Formula::And(fs) | Formula::Or(fs) => {
            let is_and = matches!(f, Formula::And(_)) ^ neg;
            let mut prefix = Vec::new();
            let mut matrices = Vec::new();
            for g in fs {
                let (mut p, m) = prenex(g, neg, gen);
                // rename this child's prefix apart from everything else
                let mut map = std::collections::BTreeMap::new();
                for (_, v) in &mut p {
                    let fresh = gen.fresh(&v.0);
                    map.insert(v.clone(), fresh.clone());
                    *v = fresh;
                }
                prefix.extend(p);
                matrices.push(m.rename_free(&map));
            }
            let matrix = if is_and {
                Formula::And(matrices)
            } else {
                Formula::Or(matrices)
            };
            (prefix, matrix)
        }
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let q = match (f, neg) {
                (Formula::Exists(..), false) | (Formula::Forall(..), true) => Quant::Exists,
                _ => Quant::Forall,
            };
            let (mut p, m) = prenex(g, neg, gen);
            p.insert(0, (q, v.clone()));
            (p, m)
        }
    }
}
