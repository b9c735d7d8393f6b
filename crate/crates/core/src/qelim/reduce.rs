//! The full reduction: prenex quantifier blocks are eliminated innermost
//! first; consecutive same-quantifier variables descend to the skeleton
//! level together, and every polarity flip routes the intermediate result
//! back over the graph through lca removal.

use std::collections::BTreeSet;

use crate::base::{Label, Labeling, VertexId};
use crate::graph::{build_skeleton, coloring_provider, ColoringStrategy, LabeledGraph, Skeleton};
use crate::logic::{
    compile_labsets, to_prenex, Atom, Formula, FormulaFile, Quant, Var, VarGen,
};
use crate::qelim::expansion::{reduce_existential_expansion, ExpansionResult};
use crate::qelim::removelca::{remove_lca, Localized, RemovalOutput};
use crate::qelim::{QelimError, StageAlloc};

/// Pipeline mode: the general route, or the locality-preserving route for
/// formulas that are r-local around their first free variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    General,
    Local { radius: u32 },
}

/// One closed quantifier block: an existential group eliminated over a
/// fresh skeleton, with the optional ball-guard reduction and the lca
/// removal that re-expresses the result over the graph.
#[derive(Debug, Clone)]
pub struct BlockRecord {
    pub p: u32,
    pub skeleton: Skeleton,
    pub input_labels: Labeling,
    pub kept: Vec<Var>,
    pub elim: Vec<Var>,
    pub main: ExpansionResult,
    pub guard: Option<ExpansionResult>,
    pub negate_main: bool,
    pub formula_after: Formula,
    pub labels_after: Labeling,
    pub removal: Option<RemovalOutput>,
}

#[derive(Debug, Clone, Default)]
pub struct Transcript {
    pub blocks: Vec<BlockRecord>,
}

/// The reduction result: a quantifier-free formula over the final skeleton
/// with its enriched labeling, truth-set equal to the input formula over
/// the graph.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub p: u32,
    pub formula: Formula,
    pub labels: Labeling,
    pub locality_radius: Option<u32>,
    pub new_alphabet: BTreeSet<Label>,
    pub transcript: Transcript,
}

struct Pipeline<'a> {
    graph: &'a LabeledGraph,
    provider: &'a ColoringStrategy,
    mode: Mode,
    center: Var,
    alloc: StageAlloc,
    gen: VarGen,
    transcript: Transcript,
}

impl<'a> Pipeline<'a> {
    /// Closes the pending existential block over a fresh skeleton. In local
    /// mode the pending variables are confined to the current radius and,
    /// when the result is negated, the reduced ball guard over the kept
    /// variables is conjoined to restore locality.
    #[allow(clippy::too_many_arguments)]
    fn close(
        &mut self,
        kept: &[Var],
        pending: &[Var],
        rho: &Formula,
        labels: &Labeling,
        r_cur: u32,
        negate: bool,
    ) -> Result<(Skeleton, u32, Formula, Labeling), QelimError> {
        let nvars = (kept.len() + pending.len()) as u32;
        let local = matches!(self.mode, Mode::Local { .. });
        let p = if local {
            r_cur.max(1).saturating_mul(nvars).min(1 << 20)
        } else {
            nvars
        };
        let coloring = coloring_provider(self.graph, p, self.provider)?;
        let skeleton = build_skeleton(self.graph, &coloring)?;
        let mut body = rho.clone();
        if local {
            let mut guards = Vec::new();
            for v in kept.iter().chain(pending.iter()) {
                if *v != self.center {
                    guards.push(Formula::atom(Atom::Ball {
                        y: v.clone(),
                        x: self.center.clone(),
                        r: r_cur,
                    }));
                }
            }
            body = Formula::and(vec![body, Formula::and(guards)]);
        }
        let main = reduce_existential_expansion(
            kept,
            pending,
            &body,
            &skeleton,
            labels,
            local,
            &mut self.alloc,
            &mut self.gen,
        )?;
        let mut labels_after = main.labels.clone();
        let (formula_after, guard) = if negate {
            let neg = Formula::not(main.formula.clone()).simplify();
            if local {
                // the kept variables' ball guard, reduced over the same
                // skeleton, restores locality around the negation
                let mut guard_body = Vec::new();
                for v in kept {
                    if *v != self.center {
                        guard_body.push(Formula::atom(Atom::Ball {
                            y: v.clone(),
                            x: self.center.clone(),
                            r: r_cur,
                        }));
                    }
                }
                let guard_res = reduce_existential_expansion(
                    kept,
                    &[],
                    &Formula::and(guard_body),
                    &skeleton,
                    labels,
                    true,
                    &mut self.alloc,
                    &mut self.gen,
                )?;
                labels_after.union_with(&guard_res.labels);
                let combined = Formula::and(vec![guard_res.formula.clone(), neg]).simplify();
                (combined, Some(guard_res))
            } else {
                (neg, None)
            }
        } else {
            (main.formula.clone(), None)
        };
        self.transcript.blocks.push(BlockRecord {
            p,
            skeleton: skeleton.clone(),
            input_labels: labels.clone(),
            kept: kept.to_vec(),
            elim: pending.to_vec(),
            main,
            guard,
            negate_main: negate,
            formula_after: formula_after.clone(),
            labels_after: labels_after.clone(),
            removal: None,
        });
        Ok((skeleton, p, formula_after, labels_after))
    }

    /// Re-expresses a skeleton-level formula over the graph for the next
    /// quantifier block.
    fn reopen(
        &mut self,
        skeleton: &Skeleton,
        formula: &Formula,
        labels: &Labeling,
        kept: &[Var],
        clamp: u32,
    ) -> Result<RemovalOutput, QelimError> {
        let localized = match self.mode {
            Mode::General => None,
            Mode::Local { .. } => Some(Localized {
                r: clamp,
                center: self.center.clone(),
                guard_vars: kept.iter().filter(|v| **v != self.center).cloned().collect(),
            }),
        };
        let out = remove_lca(
            formula,
            skeleton,
            labels,
            localized.as_ref(),
            false,
            &mut self.alloc,
            &mut self.gen,
        )?;
        if let Some(last) = self.transcript.blocks.last_mut() {
            last.removal = Some(out.clone());
        }
        Ok(out)
    }
}

fn group_blocks(prefix: &[(Quant, Var)]) -> Vec<(Quant, Vec<Var>)> {
    let mut blocks: Vec<(Quant, Vec<Var>)> = Vec::new();
    for (q, v) in prefix {
        match blocks.last_mut() {
            Some((bq, vars)) if bq == q => vars.push(v.clone()),
            _ => blocks.push((*q, vec![v.clone()])),
        }
    }
    blocks
}

/// Reduces a formula over a labeled graph to a quantifier-free formula over
/// a skeleton, with equal truth sets. Returns the reduction and the final
/// skeleton it is evaluated on.
///
/// In local mode the input is relativized to the given radius around its
/// first free variable (the caller asserts the formula is genuinely local);
/// the result additionally satisfies the ball-clamp contract.
pub fn reduce(
    ff: &FormulaFile,
    graph: &LabeledGraph,
    labels0: &Labeling,
    provider: &ColoringStrategy,
    mode: Mode,
) -> Result<(Reduction, Skeleton), QelimError> {
    let mut gen = VarGen::new();
    let compiled = compile_labsets(&ff.formula, graph.alphabet());
    let mut prenexed = to_prenex(&compiled, &mut gen);
    let mut free = ff.free.clone();
    if free.is_empty() {
        // closed formulas get a dummy free variable so every vertex carries
        // the verdict
        let x = Var::new("x0");
        prenexed = to_prenex(
            &Formula::and(vec![prenexed, Formula::atom(Atom::Eq(x.clone(), x.clone()))]),
            &mut gen,
        );
        free = vec![x];
    }
    let (prefix, matrix) = prenexed.strip_prefix();
    let blocks = group_blocks(&prefix);
    let center = free[0].clone();
    let r0 = match mode {
        Mode::General => 0,
        Mode::Local { radius } => radius,
    };
    let mut pipe = Pipeline {
        graph,
        provider,
        mode,
        center,
        alloc: StageAlloc::new(),
        gen,
        transcript: Transcript::default(),
    };

    // innermost-first over quantifier blocks; `negated` tracks whether the
    // processed suffix currently denotes the negation of (exists pending. rho)
    let mut rho = matrix;
    let mut pending: Vec<Var> = Vec::new();
    let mut negated = false;
    let mut labels = labels0.clone();
    let mut r_cur = r0;

    // variables of the not-yet-processed outer blocks are free at each close
    for i in (0..blocks.len()).rev() {
        let (q, vars) = &blocks[i];
        let needs_close = match q {
            Quant::Exists => negated,
            Quant::Forall => !negated,
        };
        if needs_close {
            let mut kept: Vec<Var> = free.clone();
            for (_, bvars) in &blocks[..=i] {
                kept.extend(bvars.iter().cloned());
            }
            let (skeleton, p, closed, labels_s) =
                pipe.close(&kept, &pending, &rho, &labels, r_cur, true)?;
            let clamp = 2u32.saturating_pow(p.min(30));
            let removal = pipe.reopen(&skeleton, &closed, &labels_s, &kept, clamp)?;
            rho = removal.body.clone();
            pending = removal.witnesses.clone();
            labels = removal.labels.clone();
            r_cur = clamp.saturating_add(
                skeleton.forests.values().map(|f| f.max_depth()).max().unwrap_or(0),
            );
        }
        let mut new_pending = vars.clone();
        new_pending.extend(pending.iter().cloned());
        pending = new_pending;
        negated = *q == Quant::Forall;
    }
    let (skeleton, p, formula, labels_s) =
        pipe.close(&free, &pending, &rho, &labels, r_cur, negated)?;
    let mut alphabet: BTreeSet<Label> = graph.alphabet().clone();
    for ls in labels_s.0.values() {
        alphabet.extend(ls.iter().cloned());
    }
    let locality_radius = match mode {
        Mode::General => None,
        Mode::Local { .. } => Some(2u32.saturating_pow(p.min(30))),
    };
    let reduction = Reduction {
        p,
        formula,
        labels: labels_s,
        locality_radius,
        new_alphabet: alphabet,
        transcript: pipe.transcript,
    };
    Ok((reduction, skeleton))
}

/// Marks the vertices satisfying a one-free-variable formula by evaluating
/// the reduction on the skeleton; a convenience used by tests and the CLI
/// oracle-checking path.
pub fn reduced_marked_set(
    reduction: &Reduction,
    skeleton: &Skeleton,
    free: &[Var],
) -> Result<std::collections::BTreeSet<Vec<VertexId>>, QelimError> {
    let st = crate::oracle::Structure::skeleton(skeleton, &reduction.labels);
    Ok(crate::oracle::truth_set(&reduction.formula, st, free)?.tuples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::example_g1;
    use crate::logic::parse_formula_file;
    use crate::oracle::{truth_set, Structure};

    fn check_reduce(src: &str, g: &LabeledGraph, mode: Mode) {
        let ff = parse_formula_file(src).unwrap();
        let (red, skel) = reduce(&ff, g, g.labels(), &ColoringStrategy::Greedy, mode).unwrap();
        assert!(red.formula.is_quantifier_free());
        let free = if ff.free.is_empty() {
            vec![Var::new("x0")]
        } else {
            ff.free.clone()
        };
        let want = if ff.free.is_empty() {
            // closed formula: all vertices or none
            let holds =
                crate::oracle::satisfies(&ff.formula, Structure::graph(g), &Default::default())
                    .unwrap();
            if holds {
                g.vertices().map(|v| vec![v]).collect()
            } else {
                Default::default()
            }
        } else {
            truth_set(&ff.formula, Structure::graph(g), &free).unwrap().tuples
        };
        let got = truth_set(&red.formula, Structure::skeleton(&skel, &red.labels), &free)
            .unwrap()
            .tuples;
        assert_eq!(want, got, "reduce mismatch for {src}");
        if let Some(r) = red.locality_radius {
            let center = free[0].clone();
            let mut clamped = vec![red.formula.clone()];
            for v in &free[1..] {
                clamped.push(Formula::atom(Atom::Ball { y: v.clone(), x: center.clone(), r }));
            }
            let got2 = truth_set(
                &Formula::and(clamped),
                Structure::skeleton(&skel, &red.labels),
                &free,
            )
            .unwrap()
            .tuples;
            assert_eq!(got, got2, "locality clamp violated for {src}");
        }
    }

    #[test]
    fn triangle_marking_on_g1() {
        let g = example_g1();
        let src = "free x; exists y1. exists y2. adj(x,y1) & adj(x,y2) & adj(y1,y2) & lab[1](x)";
        check_reduce(src, &g, Mode::General);
        // oracle gives exactly {c} = vertex 3
        let ff = parse_formula_file(src).unwrap();
        let (red, skel) =
            reduce(&ff, &g, g.labels(), &ColoringStrategy::Greedy, Mode::General).unwrap();
        let marks = reduced_marked_set(&red, &skel, &ff.free).unwrap();
        assert_eq!(marks, [vec![VertexId(3)]].into_iter().collect());
    }

    #[test]
    fn quantifier_free_base_case() {
        let g = example_g1();
        check_reduce("free x, y; adj(x,y) & lab[0](x)", &g, Mode::General);
    }

    #[test]
    fn universal_quantifier() {
        let g = example_g1();
        check_reduce("free x; forall y. adj(x,y) | x = y | !lab[0](y)", &g, Mode::General);
    }

    #[test]
    fn closed_formula_dummy_variable() {
        let g = example_g1();
        check_reduce(
            "exists x. exists y. exists z. adj(x,y) & adj(y,z) & adj(x,z)",
            &g,
            Mode::General,
        );
    }

    #[test]
    fn alternation_forall_exists() {
        let g = LabeledGraph::from_edges(3, &[(1, 2), (2, 3)]);
        // every vertex has a neighbor: true on P3
        check_reduce("forall y. exists z. adj(y,z)", &g, Mode::General);
    }

    #[test]
    fn local_mode_base() {
        let g = example_g1();
        check_reduce("free x; lab[1](x)", &g, Mode::Local { radius: 1 });
    }

    #[test]
    fn local_mode_exists() {
        let g = example_g1();
        check_reduce(
            "free x; exists y. adj(x,y) & lab[1](y)",
            &g,
            Mode::Local { radius: 1 },
        );
    }

    #[test]
    fn local_mode_triangle() {
        let g = example_g1();
        check_reduce(
            "free x; exists y1. exists y2. adj(x,y1) & adj(x,y2) & adj(y1,y2) & lab[1](x)",
            &g,
            Mode::Local { radius: 1 },
        );
    }
}
