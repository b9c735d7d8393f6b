//! Brute-force centralized semantics on labeled graphs, labeled forests,
//! and labeled skeletons. Intentionally exponential; the ground truth that
//! every other module is tested against.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::base::{Labeling, VertexId};
use crate::graph::{LabeledGraph, RootedForest, Skeleton};
use crate::logic::{Atom, Formula, Var};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("atom/structure mismatch: {0}")]
    Mismatch(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("unbound variable {0}")]
    Unbound(String),
}

/// Enumeration cap for truth sets: |V|^k must stay below this.
pub const ENUMERATION_CAP: u64 = 50_000_000;

#[derive(Debug, Clone, Copy)]
enum StructKind<'a> {
    Graph(&'a LabeledGraph),
    Forest(&'a RootedForest),
    Skeleton(&'a Skeleton),
}

/// A structure to evaluate formulas on: a labeled graph, a labeled rooted
/// forest, or a labeled skeleton. The labeling may differ from the one the
/// underlying graph carries.
#[derive(Debug, Clone, Copy)]
pub struct Structure<'a> {
    kind: StructKind<'a>,
    labels: &'a Labeling,
}

impl<'a> Structure<'a> {
    pub fn graph(g: &'a LabeledGraph) -> Self {
        Structure { kind: StructKind::Graph(g), labels: g.labels() }
    }

    pub fn graph_with(g: &'a LabeledGraph, labels: &'a Labeling) -> Self {
        Structure { kind: StructKind::Graph(g), labels }
    }

    pub fn forest(f: &'a RootedForest, labels: &'a Labeling) -> Self {
        Structure { kind: StructKind::Forest(f), labels }
    }

    pub fn skeleton(s: &'a Skeleton, labels: &'a Labeling) -> Self {
        Structure { kind: StructKind::Skeleton(s), labels }
    }

    pub fn vertices(&self) -> Vec<VertexId> {
        match self.kind {
            StructKind::Graph(g) => g.vertex_vec(),
            StructKind::Forest(f) => f.member_set().into_iter().collect(),
            StructKind::Skeleton(s) => s.graph.vertex_vec(),
        }
    }

    pub fn labeling(&self) -> &'a Labeling {
        self.labels
    }

    fn eval_atom(&self, a: &Atom, env: &BTreeMap<Var, VertexId>) -> Result<bool, OracleError> {
        let get = |v: &Var| -> Result<VertexId, OracleError> {
            env.get(v).copied().ok_or_else(|| OracleError::Unbound(v.0.clone()))
        };
        match a {
            Atom::Eq(x, y) => Ok(get(x)? == get(y)?),
            Atom::Lab(l, x) => Ok(self.labels.has(get(x)?, l)),
            Atom::LabSet(s, x) => Ok(&self.labels.get(get(x)?) == s),
            Atom::Adj(x, y) => {
                let (u, v) = (get(x)?, get(y)?);
                match self.kind {
                    StructKind::Graph(g) => Ok(g.has_edge(u, v)),
                    StructKind::Skeleton(s) => Ok(s.graph.has_edge(u, v)),
                    StructKind::Forest(f) => {
                        Ok(f.parent(u) == Some(v) || f.parent(v) == Some(u))
                    }
                }
            }
            Atom::Ball { y, x, r } => {
                let (vy, vx) = (get(y)?, get(x)?);
                match self.kind {
                    StructKind::Graph(g) => Ok(g.dist(vx, vy).map_or(false, |d| d <= *r)),
                    // distances on a skeleton are those of the underlying graph
                    StructKind::Skeleton(s) => {
                        Ok(s.graph.dist(vx, vy).map_or(false, |d| d <= *r))
                    }
                    StructKind::Forest(f) => {
                        Ok(f.tree_distance(vx, vy).map_or(false, |d| d <= *r))
                    }
                }
            }
            Atom::Lca { i, x, y } => match self.kind {
                StructKind::Forest(f) => Ok(f.lca_depth(get(x)?, get(y)?) == *i),
                _ => Err(OracleError::Mismatch(
                    "plain lca atoms only evaluate on rooted forests".into(),
                )),
            },
            Atom::LcaU { u, i, x, y } => match self.kind {
                StructKind::Skeleton(s) => {
                    let (vx, vy) = (get(x)?, get(y)?);
                    let cu = s.coloring.color_of(vx);
                    let cv = s.coloring.color_of(vy);
                    if !u.contains(cu) || !u.contains(cv) {
                        return Ok(*i == -1 && false);
                    }
                    let f = s.forest(*u).ok_or_else(|| {
                        OracleError::Mismatch(format!("skeleton has no forest for {u}"))
                    })?;
                    Ok(f.lca_depth(vx, vy) == *i)
                }
                _ => Err(OracleError::Mismatch(
                    "lcaU atoms only evaluate on skeletons".into(),
                )),
            },
            Atom::Color { k, x } => match self.kind {
                StructKind::Skeleton(s) => Ok(s.coloring.color_of(get(x)?) == *k),
                _ => Err(OracleError::Mismatch(
                    "color atoms only evaluate on skeletons".into(),
                )),
            },
            Atom::DepthU { u, k, x } => match self.kind {
                StructKind::Skeleton(s) => {
                    let v = get(x)?;
                    let f = s.forest(*u).ok_or_else(|| {
                        OracleError::Mismatch(format!("skeleton has no forest for {u}"))
                    })?;
                    Ok(f.depth(v) == Some(*k))
                }
                _ => Err(OracleError::Mismatch(
                    "depthU atoms only evaluate on skeletons".into(),
                )),
            },
        }
    }
}

/// The truth set of a formula: all tuples of vertices (in the order of
/// `free`) satisfying it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthSet {
    pub arity: usize,
    pub tuples: BTreeSet<Vec<VertexId>>,
}

struct Evaluator<'a> {
    st: Structure<'a>,
    domain: Vec<VertexId>,
    memo: HashMap<(usize, Vec<(Var, VertexId)>), bool>,
}

impl<'a> Evaluator<'a> {
    fn new(st: Structure<'a>) -> Self {
        let domain = st.vertices();
        Evaluator { st, domain, memo: HashMap::new() }
    }

    fn eval(&mut self, f: &Formula, env: &BTreeMap<Var, VertexId>) -> Result<bool, OracleError> {
        match f {
            Formula::Atom(a) => self.st.eval_atom(a, env),
            Formula::Not(g) => Ok(!self.eval(g, env)?),
            Formula::And(fs) => {
                for g in fs {
                    if !self.eval(g, env)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Or(fs) => {
                for g in fs {
                    if self.eval(g, env)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let key_env: Vec<(Var, VertexId)> = {
                    let fv = f.free_vars();
                    env.iter()
                        .filter(|(w, _)| fv.contains(*w))
                        .map(|(w, u)| (w.clone(), *u))
                        .collect()
                };
                let key = (f as *const Formula as usize, key_env);
                if let Some(&b) = self.memo.get(&key) {
                    return Ok(b);
                }
                let is_exists = matches!(f, Formula::Exists(..));
                let mut result = !is_exists;
                let domain = self.domain.clone();
                for u in domain {
                    let mut env2 = env.clone();
                    env2.insert(v.clone(), u);
                    let b = self.eval(g, &env2)?;
                    if b == is_exists {
                        result = is_exists;
                        break;
                    }
                }
                self.memo.insert(key, result);
                Ok(result)
            }
        }
    }
}

/// Tarskian satisfaction with the given assignment of the free variables.
pub fn satisfies(
    f: &Formula,
    st: Structure<'_>,
    env: &BTreeMap<Var, VertexId>,
) -> Result<bool, OracleError> {
    Evaluator::new(st).eval(f, env)
}

/// Enumerates the full truth set over tuples drawn from the structure's
/// vertex set, in the order of `free`.
pub fn truth_set(
    f: &Formula,
    st: Structure<'_>,
    free: &[Var],
) -> Result<TruthSet, OracleError> {
    let domain = st.vertices();
    let n = domain.len() as u64;
    let total = n.checked_pow(free.len() as u32).unwrap_or(u64::MAX);
    if total > ENUMERATION_CAP {
        return Err(OracleError::SizeLimit(format!(
            "{n}^{} assignments exceed the enumeration cap",
            free.len()
        )));
    }
    let mut ev = Evaluator::new(st);
    let mut tuples = BTreeSet::new();
    let k = free.len();
    if k == 0 {
        if ev.eval(f, &BTreeMap::new())? {
            tuples.insert(vec![]);
        }
        return Ok(TruthSet { arity: 0, tuples });
    }
    if domain.is_empty() {
        return Ok(TruthSet { arity: k, tuples });
    }
    let mut idx = vec![0usize; k];
    loop {
        let env: BTreeMap<Var, VertexId> = free
            .iter()
            .cloned()
            .zip(idx.iter().map(|&i| domain[i]))
            .collect();
        if ev.eval(f, &env)? {
            tuples.insert(idx.iter().map(|&i| domain[i]).collect());
        }
        // advance odometer
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(TruthSet { arity: k, tuples });
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < domain.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Number of satisfying tuples.
pub fn count(f: &Formula, st: Structure<'_>, free: &[Var]) -> Result<u64, OracleError> {
    Ok(truth_set(f, st, free)?.tuples.len() as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

impl Sense {
    pub fn parse(s: &str) -> Option<Sense> {
        match s {
            "max" => Some(Sense::Maximize),
            "min" => Some(Sense::Minimize),
            _ => None,
        }
    }
}

/// Optimum of the weight sum over the truth set, with the lexicographically
/// smallest optimal tuple; `None` when the truth set is empty.
pub fn optimize(
    f: &Formula,
    st: Structure<'_>,
    free: &[Var],
    weights: &BTreeMap<VertexId, u64>,
    sense: Sense,
) -> Result<Option<(Vec<VertexId>, u64)>, OracleError> {
    let ts = truth_set(f, st, free)?;
    let mut best: Option<(Vec<VertexId>, u64)> = None;
    for tuple in &ts.tuples {
        let value: u64 = tuple.iter().map(|v| weights.get(v).copied().unwrap_or(0)).sum();
        let better = match &best {
            None => true,
            Some((_, bv)) => match sense {
                Sense::Maximize => value > *bv,
                Sense::Minimize => value < *bv,
            },
        };
        if better {
            best = Some((tuple.clone(), value));
        }
    }
    Ok(best)
}
