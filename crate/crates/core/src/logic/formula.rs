//! The formula AST for FO[Λ] extended with ball, lca, lca^U, color, and
//! depth^U predicates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::base::{ColorSet, Label};

/// A variable name. Bound variables are alpha-renamed on construction, so
/// every occurrence is bound by exactly one quantifier or listed free.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Var(pub String);

impl Var {
    pub fn new(name: &str) -> Var {
        Var(name.to_string())
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Fresh-variable source; suffixes never collide with user names because
/// user identifiers cannot contain `#`.
#[derive(Debug, Default, Clone)]
pub struct VarGen {
    counter: u64,
}

impl VarGen {
    pub fn new() -> VarGen {
        VarGen { counter: 0 }
    }

    pub fn fresh(&mut self, base: &str) -> Var {
        self.counter += 1;
        let stem = base.split('#').next().unwrap_or("v");
        Var(format!("{stem}#{}", self.counter))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quant {
    Exists,
    Forall,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Atom {
    /// Adjacency in the host graph.
    Adj(Var, Var),
    /// Equality of vertices.
    Eq(Var, Var),
    /// `x` carries the label.
    Lab(Label, Var),
    /// The label set of `x` equals exactly the given set (over the ambient
    /// alphabet); compiled away before the pipeline runs.
    LabSet(BTreeSet<Label>, Var),
    /// `y` lies within distance `r` of `x` in the host graph.
    Ball { y: Var, x: Var, r: u32 },
    /// Root paths of `x` and `y` share exactly `i + 1` nodes; `-1` means
    /// different trees.
    Lca { i: i32, x: Var, y: Var },
    /// `Lca` relativized to the decomposition forest of color set `u`.
    LcaU { u: ColorSet, i: i32, x: Var, y: Var },
    /// `x` has skeleton color `k`.
    Color { k: u32, x: Var },
    /// `x` has depth `k` in the forest of color set `u`.
    DepthU { u: ColorSet, k: u32, x: Var },
}

impl Atom {
    pub fn vars(&self) -> Vec<&Var> {
        match self {
            Atom::Adj(x, y) | Atom::Eq(x, y) => vec![x, y],
            Atom::Lab(_, x) | Atom::LabSet(_, x) => vec![x],
            Atom::Ball { y, x, .. } => vec![y, x],
            Atom::Lca { x, y, .. } | Atom::LcaU { x, y, .. } => vec![x, y],
            Atom::Color { x, .. } | Atom::DepthU { x, .. } => vec![x],
        }
    }

    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> Atom {
        let r = |v: &Var| map.get(v).cloned().unwrap_or_else(|| v.clone());
        match self {
            Atom::Adj(x, y) => Atom::Adj(r(x), r(y)),
            Atom::Eq(x, y) => Atom::Eq(r(x), r(y)),
            Atom::Lab(l, x) => Atom::Lab(l.clone(), r(x)),
            Atom::LabSet(s, x) => Atom::LabSet(s.clone(), r(x)),
            Atom::Ball { y, x, r: rad } => Atom::Ball { y: r(y), x: r(x), r: *rad },
            Atom::Lca { i, x, y } => Atom::Lca { i: *i, x: r(x), y: r(y) },
            Atom::LcaU { u, i, x, y } => Atom::LcaU { u: *u, i: *i, x: r(x), y: r(y) },
            Atom::Color { k, x } => Atom::Color { k: *k, x: r(x) },
            Atom::DepthU { u, k, x } => Atom::DepthU { u: *u, k: *k, x: r(x) },
        }
    }
}

/// A formula. `And(vec![])` is true, `Or(vec![])` is false.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
}

impl Formula {
    pub fn tt() -> Formula {
        Formula::And(vec![])
    }

    pub fn ff() -> Formula {
        Formula::Or(vec![])
    }

    pub fn atom(a: Atom) -> Formula {
        Formula::Atom(a)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(fs: Vec<Formula>) -> Formula {
        match fs.len() {
            1 => fs.into_iter().next().unwrap(),
            _ => Formula::And(fs),
        }
    }

    pub fn or(fs: Vec<Formula>) -> Formula {
        match fs.len() {
            1 => fs.into_iter().next().unwrap(),
            _ => Formula::Or(fs),
        }
    }

    pub fn exists(v: Var, f: Formula) -> Formula {
        Formula::Exists(v, Box::new(f))
    }

    pub fn forall(v: Var, f: Formula) -> Formula {
        Formula::Forall(v, Box::new(f))
    }

    pub fn exists_many(vars: &[Var], f: Formula) -> Formula {
        vars.iter()
            .rev()
            .fold(f, |acc, v| Formula::exists(v.clone(), acc))
    }

    pub fn quant(q: Quant, v: Var, f: Formula) -> Formula {
        match q {
            Quant::Exists => Formula::exists(v, f),
            Quant::Forall => Formula::forall(v, f),
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Formula::And(fs) if fs.is_empty())
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Formula::Or(fs) if fs.is_empty())
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Not(f) => 1 + f.size(),
            Formula::And(fs) | Formula::Or(fs) => 1 + fs.iter().map(Formula::size).sum::<usize>(),
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        fn walk(f: &Formula, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
            match f {
                Formula::Atom(a) => {
                    for v in a.vars() {
                        if !bound.contains(v) {
                            out.insert(v.clone());
                        }
                    }
                }
                Formula::Not(g) => walk(g, bound, out),
                Formula::And(fs) | Formula::Or(fs) => {
                    for g in fs {
                        walk(g, bound, out);
                    }
                }
                Formula::Exists(v, g) | Formula::Forall(v, g) => {
                    bound.push(v.clone());
                    walk(g, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_quantifier_free),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    /// Quantifier depth: the length of the longest quantifier chain.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(f) => f.quantifier_depth(),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().map(Formula::quantifier_depth).max().unwrap_or(0)
            }
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.quantifier_depth(),
        }
    }

    /// Renames free occurrences per the map (capture is the caller's
    /// responsibility; pipeline code only renames into fresh names).
    pub fn rename_free(&self, map: &BTreeMap<Var, Var>) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(a.rename(map)),
            Formula::Not(f) => Formula::not(f.rename_free(map)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.rename_free(map)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.rename_free(map)).collect()),
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                let mut inner = map.clone();
                inner.remove(v);
                let body = f.rename_free(&inner);
                match self {
                    Formula::Exists(..) => Formula::exists(v.clone(), body),
                    _ => Formula::forall(v.clone(), body),
                }
            }
        }
    }

    /// Gives every bound variable a fresh numeric suffix; free variables
    /// keep their user names.
    pub fn alpha_rename(&self, gen: &mut VarGen) -> Formula {
        fn walk(f: &Formula, env: &BTreeMap<Var, Var>, gen: &mut VarGen) -> Formula {
            match f {
                Formula::Atom(a) => Formula::Atom(a.rename(env)),
                Formula::Not(g) => Formula::not(walk(g, env, gen)),
                Formula::And(fs) => Formula::And(fs.iter().map(|g| walk(g, env, gen)).collect()),
                Formula::Or(fs) => Formula::Or(fs.iter().map(|g| walk(g, env, gen)).collect()),
                Formula::Exists(v, g) | Formula::Forall(v, g) => {
                    let fresh = gen.fresh(&v.0);
                    let mut env2 = env.clone();
                    env2.insert(v.clone(), fresh.clone());
                    let body = walk(g, &env2, gen);
                    match f {
                        Formula::Exists(..) => Formula::exists(fresh, body),
                        _ => Formula::forall(fresh, body),
                    }
                }
            }
        }
        walk(self, &BTreeMap::new(), gen)
    }

    /// Constant folding plus flattening of nested conjunctions and
    /// disjunctions and removal of duplicate children.
    pub fn simplify(&self) -> Formula {
        match self {
            Formula::Atom(a) => match a {
                Atom::Eq(x, y) if x == y => Formula::tt(),
                Atom::Ball { y, x, .. } if x == y => Formula::tt(),
                _ => self.clone(),
            },
            Formula::Not(f) => {
                let s = f.simplify();
                if s.is_true() {
                    Formula::ff()
                } else if s.is_false() {
                    Formula::tt()
                } else if let Formula::Not(inner) = s {
                    *inner
                } else {
                    Formula::not(s)
                }
            }
            Formula::And(fs) => {
                let mut out: Vec<Formula> = Vec::new();
                for f in fs {
                    let s = f.simplify();
                    if s.is_false() {
                        return Formula::ff();
                    }
                    if s.is_true() {
                        continue;
                    }
                    if let Formula::And(inner) = s {
                        for g in inner {
                            if !out.contains(&g) {
                                out.push(g);
                            }
                        }
                    } else if !out.contains(&s) {
                        out.push(s);
                    }
                }
                Formula::and(out)
            }
            Formula::Or(fs) => {
                let mut out: Vec<Formula> = Vec::new();
                for f in fs {
                    let s = f.simplify();
                    if s.is_true() {
                        return Formula::tt();
                    }
                    if s.is_false() {
                        continue;
                    }
                    if let Formula::Or(inner) = s {
                        for g in inner {
                            if !out.contains(&g) {
                                out.push(g);
                            }
                        }
                    } else if !out.contains(&s) {
                        out.push(s);
                    }
                }
                Formula::or(out)
            }
            Formula::Exists(v, f) => {
                let s = f.simplify();
                if s.is_true() || s.is_false() {
                    // domains are nonempty, so the quantifier is vacuous
                    s
                } else {
                    Formula::exists(v.clone(), s)
                }
            }
            Formula::Forall(v, f) => {
                let s = f.simplify();
                if s.is_true() || s.is_false() {
                    s
                } else {
                    Formula::forall(v.clone(), s)
                }
            }
        }
    }

    /// Negation normal form for quantifier-free formulas: negations pushed
    /// onto atoms.
    pub fn nnf(&self) -> Formula {
        fn walk(f: &Formula, neg: bool) -> Formula {
            match f {
                Formula::Atom(_) => {
                    if neg {
                        Formula::not(f.clone())
                    } else {
                        f.clone()
                    }
                }
                Formula::Not(g) => walk(g, !neg),
                Formula::And(fs) => {
                    let kids: Vec<Formula> = fs.iter().map(|g| walk(g, neg)).collect();
                    if neg {
                        Formula::Or(kids)
                    } else {
                        Formula::And(kids)
                    }
                }
                Formula::Or(fs) => {
                    let kids: Vec<Formula> = fs.iter().map(|g| walk(g, neg)).collect();
                    if neg {
                        Formula::And(kids)
                    } else {
                        Formula::Or(kids)
                    }
                }
                Formula::Exists(..) | Formula::Forall(..) => {
                    panic!("nnf is defined for quantifier-free formulas")
                }
            }
        }
        walk(self, false)
    }

    /// Disjunctive normal form of a quantifier-free formula: a list of
    /// conjunctions of literals. Guarded by a size cap.
    pub fn dnf(&self, cap: usize) -> Result<Vec<Vec<Formula>>, super::LogicError> {
        fn go(f: &Formula, cap: usize) -> Result<Vec<Vec<Formula>>, super::LogicError> {
            match f {
                Formula::Atom(_) | Formula::Not(_) => Ok(vec![vec![f.clone()]]),
                Formula::Or(fs) => {
                    let mut out = Vec::new();
                    for g in fs {
                        out.extend(go(g, cap)?);
                        if out.len() > cap {
                            return Err(super::LogicError::SizeLimit(format!(
                                "DNF exceeds {cap} disjuncts"
                            )));
                        }
                    }
                    Ok(out)
                }
                Formula::And(fs) => {
                    let mut acc: Vec<Vec<Formula>> = vec![vec![]];
                    for g in fs {
                        let gs = go(g, cap)?;
                        let mut next = Vec::new();
                        for conj in &acc {
                            for dis in &gs {
                                let mut c = conj.clone();
                                for lit in dis {
                                    if !c.contains(lit) {
                                        c.push(lit.clone());
                                    }
                                }
                                next.push(c);
                            }
                            if next.len() > cap {
                                return Err(super::LogicError::SizeLimit(format!(
                                    "DNF exceeds {cap} disjuncts"
                                )));
                            }
                        }
                        acc = next;
                    }
                    Ok(acc)
                }
                Formula::Exists(..) | Formula::Forall(..) => Err(super::LogicError::Shape(
                    "DNF is defined for quantifier-free formulas".into(),
                )),
            }
        }
        go(&self.nnf(), cap)
    }

    /// All atoms, in syntactic order, deduplicated.
    pub fn atoms(&self) -> Vec<Atom> {
        fn walk(f: &Formula, out: &mut Vec<Atom>) {
            match f {
                Formula::Atom(a) => {
                    if !out.contains(a) {
                        out.push(a.clone());
                    }
                }
                Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => walk(g, out),
                Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| walk(g, out)),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Replaces atoms per the map, leaving others in place.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Formula) -> Formula {
        match self {
            Formula::Atom(a) => f(a),
            Formula::Not(g) => Formula::not(g.map_atoms(f)),
            Formula::And(fs) => Formula::And(fs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Exists(v, g) => Formula::exists(v.clone(), g.map_atoms(f)),
            Formula::Forall(v, g) => Formula::forall(v.clone(), g.map_atoms(f)),
        }
    }

    /// Labels appearing in the formula (on Lab atoms).
    pub fn label_support(&self) -> BTreeSet<Label> {
        self.atoms()
            .into_iter()
            .filter_map(|a| match a {
                Atom::Lab(l, _) => Some(l),
                _ => None,
            })
            .collect()
    }

    /// Strips a prenex quantifier prefix, returning the quantifiers
    /// outermost-first and the matrix.
    pub fn strip_prefix(&self) -> (Vec<(Quant, Var)>, Formula) {
        let mut prefix = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Formula::Exists(v, f) => {
                    prefix.push((Quant::Exists, v.clone()));
                    cur = f;
                }
                Formula::Forall(v, f) => {
                    prefix.push((Quant::Forall, v.clone()));
                    cur = f;
                }
                _ => return (prefix, cur.clone()),
            }
        }
    }
}

/// A parsed formula file: the declared free variables (first one is the
/// locality center) and the formula body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaFile {
    pub free: Vec<Var>,
    pub formula: Formula,
}
