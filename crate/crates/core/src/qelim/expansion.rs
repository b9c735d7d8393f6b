//! Skeleton-level reduction: existential blocks over the whole graph are
//! dispatched to every color set of the skeleton and recombined as a
//! disjunction over relativized per-set reductions.

use crate::base::{ColorSet, Labeling};
use crate::graph::Skeleton;
use crate::logic::{Atom, Formula, Var, VarGen};
use crate::qelim::forest::ElimRound;
use crate::qelim::{QelimError, StageAlloc};

/// "x is colored by a color in U".
pub fn color_membership(u: ColorSet, x: &Var) -> Formula {
    Formula::or(
        u.iter()
            .map(|c| Formula::atom(Atom::Color { k: c, x: x.clone() }))
            .collect(),
    )
}

/// Replay data for one color set of an expansion.
#[derive(Debug, Clone)]
pub struct URecord {
    pub u: ColorSet,
    pub level_stage: u32,
    pub rounds: Vec<ElimRound>,
    pub ball_witnesses: Vec<Var>,
}

/// Result of a skeleton-level existential reduction.
#[derive(Debug, Clone)]
pub struct ExpansionResult {
    pub formula: Formula,
    pub labels: Labeling,
    pub per_u: Vec<URecord>,
    /// The locality clamp radius in local mode.
    pub radius: Option<u32>,
}

/// Reduces `exists elim. psi` (with `psi` quantifier-free over the graph,
/// ball atoms included in local mode) to a quantifier-free formula over the
/// skeleton. Per color set `U`, the treedepth-level reduction runs on
/// `G[U]` with forest `F^U`; lca predicates are relativized to `U` and the
/// branch is guarded by color membership of the kept variables.
#[allow(clippy::too_many_arguments)]
pub fn reduce_existential_expansion(
    kept: &[Var],
    elim: &[Var],
    psi: &Formula,
    skeleton: &Skeleton,
    labels: &Labeling,
    local_mode: bool,
    alloc: &mut StageAlloc,
    gen: &mut VarGen,
) -> Result<ExpansionResult, QelimError> {
    let nvars = (kept.len() + elim.len()) as u32;
    let max_radius = psi
        .atoms()
        .iter()
        .filter_map(|a| match a {
            Atom::Ball { r, .. } => Some(*r),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let needed = if local_mode {
        max_radius.max(1).saturating_mul(nvars)
    } else {
        nvars
    };
    if skeleton.p() < needed {
        return Err(QelimError::SkeletonParam { needed, got: skeleton.p() });
    }
    let mut disj = Vec::new();
    let mut merged = labels.clone();
    let mut per_u = Vec::new();
    for u in ColorSet::subsets_up_to(skeleton.coloring.palette, skeleton.p()) {
        let class = skeleton.graph.color_class(&skeleton.coloring.color, u);
        let host = skeleton.graph.induced(&class);
        let forest = skeleton
            .forest(u)
            .ok_or_else(|| QelimError::Shape(format!("skeleton is missing forest {u}")))?;
        let td = crate::qelim::td::reduce_existential_td(
            kept, elim, psi, &host, forest, labels, local_mode, alloc, gen,
        )?;
        let relativized = td.formula.map_atoms(&mut |a| match a {
            Atom::Lca { i, x, y } => Formula::atom(Atom::LcaU {
                u,
                i: *i,
                x: x.clone(),
                y: y.clone(),
            }),
            other => Formula::Atom(other.clone()),
        });
        let mut branch = vec![relativized];
        for x in kept {
            branch.push(color_membership(u, x));
        }
        disj.push(Formula::and(branch));
        merged.union_with(&td.labels);
        per_u.push(URecord {
            u,
            level_stage: td.level_stage,
            rounds: td.rounds,
            ball_witnesses: td.ball_witnesses,
        });
    }
    let radius = if local_mode {
        Some(2u32.saturating_pow(skeleton.p().min(30)))
    } else {
        None
    };
    Ok(ExpansionResult {
        formula: Formula::or(disj).simplify(),
        labels: merged,
        per_u,
        radius,
    })
}
