//! Distance predicates as existential formulas, and the r-local form.

use crate::logic::{Atom, Formula, LogicError, Quant, Var, VarGen};

/// The quantifier-free body of `beta_r(x, y)` over fresh witnesses
/// `z_0..z_r`: `x = z_0` and, for some `j <= r`, `y = z_j` with a chain of
/// adjacent witnesses up to `j`.
pub fn beta_body(x: &Var, y: &Var, witnesses: &[Var]) -> Formula {
    let r = witnesses.len() - 1;
    let mut disj = Vec::new();
    for j in 0..=r {
        let mut conj = vec![Formula::atom(Atom::Eq(y.clone(), witnesses[j].clone()))];
        for i in 0..j {
            conj.push(Formula::atom(Atom::Adj(
                witnesses[i].clone(),
                witnesses[i + 1].clone(),
            )));
        }
        disj.push(Formula::and(conj));
    }
    Formula::and(vec![
        Formula::atom(Atom::Eq(x.clone(), witnesses[0].clone())),
        Formula::or(disj),
    ])
}

/// The existential formula equivalent to `ball(vars, vars[0], r)`: each
/// listed variable lies within distance `r` of the first.
pub fn beta(r: u32, vars: &[Var], gen: &mut VarGen) -> Formula {
    assert!(!vars.is_empty());
    let x1 = &vars[0];
    let mut all_witnesses = Vec::new();
    let mut body = Vec::new();
    for y in &vars[1..] {
        let ws: Vec<Var> = (0..=r).map(|_| gen.fresh("z")).collect();
        body.push(beta_body(x1, y, &ws));
        all_witnesses.extend(ws);
    }
    Formula::exists_many(&all_witnesses, Formula::and(body))
}

/// `beta` with the redundant relativization: the witness paths themselves
/// are confined to the radius-`r2` ball around the first variable. For
/// `r2 >= r` this is equivalent to `beta(r, vars)`.
pub fn beta_relativized(r: u32, r2: u32, vars: &[Var], gen: &mut VarGen) -> Formula {
    assert!(r2 >= r);
    let x1 = &vars[0];
    let mut all_witnesses = Vec::new();
    let mut body = Vec::new();
    for y in &vars[1..] {
        let ws: Vec<Var> = (0..=r).map(|_| gen.fresh("z")).collect();
        body.push(beta_body(x1, y, &ws));
        all_witnesses.extend(ws);
    }
    for v in vars[1..].iter().chain(all_witnesses.iter()) {
        body.push(Formula::atom(Atom::Ball {
            y: v.clone(),
            x: x1.clone(),
            r: r2,
        }));
    }
    Formula::exists_many(&all_witnesses, Formula::and(body))
}

fn ball_conj(targets: &[Var], center: &Var, r: u32) -> Formula {
    Formula::and(
        targets
            .iter()
            .filter(|v| *v != center)
            .map(|v| {
                Formula::atom(Atom::Ball {
                    y: v.clone(),
                    x: center.clone(),
                    r,
                })
            })
            .collect(),
    )
}

/// Rewrites a prenex formula (first free variable = locality center) into
/// the syntactic r-local form:
///
/// - quantifier-free core: `psi ∧ ball(vars, x, r)`;
/// - `exists z.` over an r-local form;
/// - `ball(vars, x, r) ∧ forall z. (¬ball((vars, z), x, r) ∨ r-local form)`.
///
/// The caller asserts that the input is semantically r-local; this function
/// only produces the relativized shape.
pub fn to_local_form(f: &Formula, r: u32, free: &[Var]) -> Result<Formula, LogicError> {
    if free.is_empty() {
        return Err(LogicError::Shape(
            "local form needs at least one free variable".into(),
        ));
    }
    let center = free[0].clone();
    let (prefix, matrix) = f.strip_prefix();
    if !matrix.is_quantifier_free() {
        return Err(LogicError::Shape("to_local_form expects a prenex formula".into()));
    }
    let mut ctx: Vec<Var> = free.to_vec();
    Ok(build(&prefix, &matrix, &center, &mut ctx, r))
}

fn build(prefix: &[(Quant, Var)], matrix: &Formula, center: &Var, ctx: &mut Vec<Var>, r: u32) -> Formula {
    match prefix.first() {
        None => {
            let mut all: Vec<Var> = ctx.clone();
            for v in matrix.free_vars() {
                if !all.contains(&v) {
                    all.push(v);
                }
            }
            Formula::and(vec![matrix.clone(), ball_conj(&all, center, r)])
        }
        Some((Quant::Exists, z)) => {
            ctx.push(z.clone());
            let inner = build(&prefix[1..], matrix, center, ctx, r);
            ctx.pop();
            Formula::exists(z.clone(), inner)
        }
        Some((Quant::Forall, z)) => {
            let guard = ball_conj(&ctx.clone(), center, r);
            ctx.push(z.clone());
            let inner_guard = ball_conj(&ctx.clone(), center, r);
            let inner = build(&prefix[1..], matrix, center, ctx, r);
            ctx.pop();
            Formula::and(vec![
                guard,
                Formula::forall(
                    z.clone(),
                    Formula::or(vec![Formula::not(inner_guard), inner]),
                ),
            ])
        }
    }
}
