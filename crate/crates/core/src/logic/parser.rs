//! Formula text format.
//!
//! ```text
//! free x, y;
//! exists z. adj(x,z) & ball(z,y,2) | !(x = y)
//! ```
//!
//! Precedence: `!` binds tightest, then `&`, then `|`; quantifiers extend to
//! the end of the current (sub)formula. Bound variables are alpha-renamed on
//! construction; parsing then printing reproduces the formula up to that
//! renaming and whitespace.

use std::collections::BTreeSet;

use crate::base::{ColorSet, Label};
use crate::logic::{Atom, Formula, FormulaFile, LogicError, Var, VarGen};

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Nat(u32),
    Int(i32),
    Sym(char),
    Eof,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn error(&self, msg: &str) -> LogicError {
        LogicError::Syntax { line: self.line, col: self.col, msg: msg.to_string() }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek_byte(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_byte() {
            if c.is_ascii_whitespace() {
                self.bump();
            } else if c == b'#' {
                while let Some(c2) = self.peek_byte() {
                    if c2 == b'\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn next_tok(&mut self) -> Result<Tok, LogicError> {
        self.skip_ws();
        let Some(c) = self.peek_byte() else {
            return Ok(Tok::Eof);
        };
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut s = String::new();
            while let Some(c2) = self.peek_byte() {
                if c2.is_ascii_alphanumeric() || c2 == b'_' || c2 == b'#' {
                    s.push(self.bump().unwrap() as char);
                } else {
                    break;
                }
            }
            return Ok(Tok::Ident(s));
        }
        if c.is_ascii_digit() {
            let mut n: u32 = 0;
            while let Some(c2) = self.peek_byte() {
                if c2.is_ascii_digit() {
                    n = n
                        .checked_mul(10)
                        .and_then(|m| m.checked_add((c2 - b'0') as u32))
                        .ok_or_else(|| self.error("number too large"))?;
                    self.bump();
                } else {
                    break;
                }
            }
            return Ok(Tok::Nat(n));
        }
        if c == b'-' {
            self.bump();
            match self.next_tok()? {
                Tok::Nat(n) => return Ok(Tok::Int(-(n as i32))),
                _ => return Err(self.error("expected a number after `-`")),
            }
        }
        self.bump();
        Ok(Tok::Sym(c as char))
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    tok: Tok,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, LogicError> {
        let mut lex = Lexer::new(src);
        let tok = lex.next_tok()?;
        Ok(Parser { lex, tok })
    }

    fn error(&self, msg: &str) -> LogicError {
        self.lex.error(msg)
    }

    fn advance(&mut self) -> Result<(), LogicError> {
        self.tok = self.lex.next_tok()?;
        Ok(())
    }

    fn expect_sym(&mut self, c: char) -> Result<(), LogicError> {
        if self.tok == Tok::Sym(c) {
            self.advance()
        } else {
            Err(self.error(&format!("expected `{c}`, got {:?}", self.tok)))
        }
    }

    fn ident(&mut self) -> Result<String, LogicError> {
        match std::mem::replace(&mut self.tok, Tok::Eof) {
            Tok::Ident(s) => {
                self.tok = self.lex.next_tok()?;
                Ok(s)
            }
            t => {
                self.tok = t;
                Err(self.error("expected an identifier"))
            }
        }
    }

    fn nat(&mut self) -> Result<u32, LogicError> {
        match self.tok {
            Tok::Nat(n) => {
                self.advance()?;
                Ok(n)
            }
            _ => Err(self.error("expected a nonnegative integer")),
        }
    }

    fn int(&mut self) -> Result<i32, LogicError> {
        match self.tok {
            Tok::Nat(n) => {
                self.advance()?;
                Ok(n as i32)
            }
            Tok::Int(i) => {
                self.advance()?;
                Ok(i)
            }
            _ => Err(self.error("expected an integer")),
        }
    }

    /// A label token: identifier or bare number.
    fn label(&mut self) -> Result<Label, LogicError> {
        match std::mem::replace(&mut self.tok, Tok::Eof) {
            Tok::Ident(s) => {
                self.tok = self.lex.next_tok()?;
                Ok(Label::Sym(s))
            }
            Tok::Nat(n) => {
                self.tok = self.lex.next_tok()?;
                Ok(Label::Sym(n.to_string()))
            }
            t => {
                self.tok = t;
                Err(self.error("expected a label"))
            }
        }
    }

    fn colorset(&mut self) -> Result<ColorSet, LogicError> {
        let mut u = ColorSet::EMPTY;
        loop {
            let c = self.nat()?;
            if c == 0 || c > 63 {
                return Err(self.error("colors are 1..=63"));
            }
            u = u.with(c);
            if self.tok == Tok::Sym(',') {
                self.advance()?;
            } else {
                break;
            }
        }
        Ok(u)
    }

    fn formula(&mut self) -> Result<Formula, LogicError> {
        if let Tok::Ident(s) = &self.tok {
            if s == "exists" || s == "forall" {
                let is_exists = s == "exists";
                self.advance()?;
                let v = Var(self.ident()?);
                self.expect_sym('.')?;
                let body = self.formula()?;
                return Ok(if is_exists {
                    Formula::exists(v, body)
                } else {
                    Formula::forall(v, body)
                });
            }
        }
        self.disj()
    }

    fn disj(&mut self) -> Result<Formula, LogicError> {
        let mut parts = vec![self.conj()?];
        while self.tok == Tok::Sym('|') {
            self.advance()?;
            parts.push(self.conj()?);
        }
        Ok(Formula::or(parts))
    }

    fn conj(&mut self) -> Result<Formula, LogicError> {
        let mut parts = vec![self.unary()?];
        while self.tok == Tok::Sym('&') {
            self.advance()?;
            parts.push(self.unary()?);
        }
        Ok(Formula::and(parts))
    }

    fn unary(&mut self) -> Result<Formula, LogicError> {
        match &self.tok {
            Tok::Sym('!') => {
                self.advance()?;
                Ok(Formula::not(self.unary()?))
            }
            Tok::Sym('(') => {
                self.advance()?;
                let f = self.formula()?;
                self.expect_sym(')')?;
                Ok(f)
            }
            Tok::Ident(name) => {
                let name = name.clone();
                match name.as_str() {
                    "true" => {
                        self.advance()?;
                        Ok(Formula::tt())
                    }
                    "false" => {
                        self.advance()?;
                        Ok(Formula::ff())
                    }
                    "exists" | "forall" => self.formula(),
                    "adj" | "lab" | "labset" | "ball" | "lca" | "lcaU" | "color" | "depthU" => {
                        self.atom(&name)
                    }
                    _ => {
                        // a variable: must be an equality atom
                        self.advance()?;
                        self.expect_sym('=')?;
                        let w = Var(self.ident()?);
                        Ok(Formula::atom(Atom::Eq(Var(name), w)))
                    }
                }
            }
            t => Err(self.error(&format!("unexpected token {t:?}"))),
        }
    }

    fn var_pair(&mut self) -> Result<(Var, Var), LogicError> {
        self.expect_sym('(')?;
        let x = Var(self.ident()?);
        self.expect_sym(',')?;
        let y = Var(self.ident()?);
        self.expect_sym(')')?;
        Ok((x, y))
    }

    fn atom(&mut self, head: &str) -> Result<Formula, LogicError> {
        self.advance()?;
        let a = match head {
            "adj" => {
                let (x, y) = self.var_pair()?;
                Atom::Adj(x, y)
            }
            "lab" => {
                self.expect_sym('[')?;
                let l = self.label()?;
                self.expect_sym(']')?;
                self.expect_sym('(')?;
                let x = Var(self.ident()?);
                self.expect_sym(')')?;
                Atom::Lab(l, x)
            }
            "labset" => {
                self.expect_sym('[')?;
                let mut set = BTreeSet::new();
                if self.tok != Tok::Sym(']') {
                    loop {
                        set.insert(self.label()?);
                        if self.tok == Tok::Sym(',') {
                            self.advance()?;
                        } else {
                            break;
                        }
                    }
                }
                self.expect_sym(']')?;
                self.expect_sym('(')?;
                let x = Var(self.ident()?);
                self.expect_sym(')')?;
                Atom::LabSet(set, x)
            }
            "ball" => {
                self.expect_sym('(')?;
                let y = Var(self.ident()?);
                self.expect_sym(',')?;
                let x = Var(self.ident()?);
                self.expect_sym(',')?;
                let r = self.nat()?;
                self.expect_sym(')')?;
                Atom::Ball { y, x, r }
            }
            "lca" => {
                self.expect_sym('[')?;
                let i = self.int()?;
                self.expect_sym(']')?;
                let (x, y) = self.var_pair()?;
                Atom::Lca { i, x, y }
            }
            "lcaU" => {
                self.expect_sym('[')?;
                let i = self.int()?;
                self.expect_sym(';')?;
                let u = self.colorset()?;
                self.expect_sym(']')?;
                let (x, y) = self.var_pair()?;
                Atom::LcaU { u, i, x, y }
            }
            "color" => {
                self.expect_sym('[')?;
                let k = self.nat()?;
                self.expect_sym(']')?;
                self.expect_sym('(')?;
                let x = Var(self.ident()?);
                self.expect_sym(')')?;
                Atom::Color { k, x }
            }
            "depthU" => {
                self.expect_sym('[')?;
                let k = self.nat()?;
                self.expect_sym(';')?;
                let u = self.colorset()?;
                self.expect_sym(']')?;
                self.expect_sym('(')?;
                let x = Var(self.ident()?);
                self.expect_sym(')')?;
                Atom::DepthU { u, k, x }
            }
            _ => unreachable!(),
        };
        Ok(Formula::Atom(a))
    }
}

/// Parses a formula file with an optional leading `free x, y;` clause. When
/// the clause is absent, free variables are inferred in first-occurrence
/// order. Bound variables are alpha-renamed.
pub fn parse_formula_file(src: &str) -> Result<FormulaFile, LogicError> {
    let mut p = Parser::new(src)?;
    let mut declared: Option<Vec<Var>> = None;
    if let Tok::Ident(s) = &p.tok {
        if s == "free" {
            p.advance()?;
            let mut vars = Vec::new();
            loop {
                vars.push(Var(p.ident()?));
                if p.tok == Tok::Sym(',') {
                    p.advance()?;
                } else {
                    break;
                }
            }
            p.expect_sym(';')?;
            declared = Some(vars);
        }
    }
    let raw = p.formula()?;
    if p.tok != Tok::Eof {
        return Err(p.error("trailing input after formula"));
    }
    let mut gen = VarGen::new();
    let formula = raw.alpha_rename(&mut gen);
    let free = match declared {
        Some(vars) => {
            let fv = formula.free_vars();
            for v in &fv {
                if !vars.contains(v) {
                    return Err(LogicError::Shape(format!(
                        "variable {v} is free but not declared"
                    )));
                }
            }
            vars
        }
        None => first_occurrence_order(&raw, &formula.free_vars()),
    };
    Ok(FormulaFile { free, formula })
}

/// Parses a bare formula (no free clause).
pub fn parse_formula(src: &str) -> Result<Formula, LogicError> {
    Ok(parse_formula_file(src)?.formula)
}

fn first_occurrence_order(f: &Formula, free: &BTreeSet<Var>) -> Vec<Var> {
    let mut order = Vec::new();
    for a in f.atoms() {
        for v in a.vars() {
            if free.contains(v) && !order.contains(v) {
                order.push(v.clone());
            }
        }
    }
    order
}

fn fmt_atom(a: &Atom) -> String {
    match a {
        Atom::Adj(x, y) => format!("adj({x},{y})"),
        Atom::Eq(x, y) => format!("{x} = {y}"),
        Atom::Lab(l, x) => format!("lab[{l}]({x})"),
        Atom::LabSet(s, x) => {
            let items: Vec<String> = s.iter().map(|l| l.to_string()).collect();
            format!("labset[{}]({x})", items.join(","))
        }
        Atom::Ball { y, x, r } => format!("ball({y},{x},{r})"),
        Atom::Lca { i, x, y } => format!("lca[{i}]({x},{y})"),
        Atom::LcaU { u, i, x, y } => {
            let cols: Vec<String> = u.iter().map(|c| c.to_string()).collect();
            format!("lcaU[{i};{}]({x},{y})", cols.join(","))
        }
        Atom::Color { k, x } => format!("color[{k}]({x})"),
        Atom::DepthU { u, k, x } => {
            let cols: Vec<String> = u.iter().map(|c| c.to_string()).collect();
            format!("depthU[{k};{}]({x})", cols.join(","))
        }
    }
}

fn fmt_prec(f: &Formula, prec: u8) -> String {
    let (s, my_prec) = match f {
        Formula::Atom(a) => (fmt_atom(a), 3),
        Formula::Not(g) => (format!("!{}", fmt_prec(g, 3)), 3),
        Formula::And(fs) if fs.is_empty() => ("true".to_string(), 3),
        Formula::Or(fs) if fs.is_empty() => ("false".to_string(), 3),
        Formula::And(fs) => (
            fs.iter().map(|g| fmt_prec(g, 2)).collect::<Vec<_>>().join(" & "),
            2,
        ),
        Formula::Or(fs) => (
            fs.iter().map(|g| fmt_prec(g, 1)).collect::<Vec<_>>().join(" | "),
            1,
        ),
        Formula::Exists(v, g) => (format!("exists {v}. {}", fmt_prec(g, 0)), 0),
        Formula::Forall(v, g) => (format!("forall {v}. {}", fmt_prec(g, 0)), 0),
    };
    if my_prec < prec {
        format!("({s})")
    } else {
        s
    }
}

pub fn format_formula(f: &Formula) -> String {
    fmt_prec(f, 0)
}

pub fn format_formula_file(ff: &FormulaFile) -> String {
    let mut out = String::new();
    if !ff.free.is_empty() {
        let vars: Vec<String> = ff.free.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("free {};\n", vars.join(", ")));
    }
    out.push_str(&format_formula(&ff.formula));
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_example() {
        let src = "exists y1. exists y2. adj(x,y1) & adj(x,y2) & adj(y1,y2) & lab[1](x)";
        let ff = parse_formula_file(src).unwrap();
        assert_eq!(ff.free, vec![Var::new("x")]);
        assert_eq!(ff.formula.quantifier_depth(), 2);
        assert!(ff.formula.free_vars().contains(&Var::new("x")));
    }

    #[test]
    fn reflexive_eq() {
        let ff = parse_formula_file("x = x").unwrap();
        assert_eq!(ff.free, vec![Var::new("x")]);
        assert_eq!(ff.formula, Formula::atom(Atom::Eq(Var::new("x"), Var::new("x"))));
    }

    #[test]
    fn distinct_asts_for_demorgan() {
        let a = parse_formula("!(lab[a](x) & lab[b](x))").unwrap();
        let b = parse_formula("!lab[a](x) | !lab[b](x)").unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn round_trip_up_to_alpha() {
        let srcs = [
            "free x; exists y. (adj(x,y) | ball(y,x,3)) & !lca[-1](x,y)",
            "lcaU[2;1,3](x,y) & color[2](x) & depthU[0;2](y)",
            "forall z. z = x | labset[a,b](z)",
        ];
        for src in srcs {
            let f1 = parse_formula_file(src).unwrap();
            let printed = format_formula_file(&f1);
            let f2 = parse_formula_file(&printed).unwrap();
            // alpha names differ between passes; compare after re-renaming both
            let mut g1 = VarGen::new();
            let mut g2 = VarGen::new();
            assert_eq!(
                f1.formula.alpha_rename(&mut g1),
                f2.formula.alpha_rename(&mut g2),
                "round trip failed for {src}"
            );
            assert_eq!(f1.free, f2.free);
        }
    }

    #[test]
    fn errors_carry_position() {
        let err = parse_formula("adj(x,").unwrap_err();
        match err {
            LogicError::Syntax { line, col, .. } => {
                assert_eq!(line, 1);
                assert!(col >= 6);
            }
            _ => panic!("expected syntax error"),
        }
    }

    #[test]
    fn undeclared_free_var_rejected() {
        assert!(parse_formula_file("free x; adj(x,y)").is_err());
    }

    #[test]
    fn alpha_renaming_avoids_capture() {
        let f = parse_formula("exists y. adj(x,y) & (exists y. lab[a](y))").unwrap();
        // the two bound y's must now be distinct
        let (_, _matrix) = f.strip_prefix();
        let atoms = f.atoms();
        let mut bound_names: Vec<String> = Vec::new();
        fn collect(f: &Formula, out: &mut Vec<String>) {
            match f {
                Formula::Exists(v, g) | Formula::Forall(v, g) => {
                    out.push(v.0.clone());
                    collect(g, out);
                }
                Formula::Not(g) => collect(g, out),
                Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| collect(g, out)),
                Formula::Atom(_) => {}
            }
        }
        collect(&f, &mut bound_names);
        assert_eq!(bound_names.len(), 2);
        assert_ne!(bound_names[0], bound_names[1]);
        assert!(!atoms.is_empty());
    }
}
