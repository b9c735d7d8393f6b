//! FO[Λ] formulas: representation, parsing/printing, and syntactic rewrites.

mod bnf;
mod formula;
mod lcaexpr;
mod local;
mod parser;
mod prenex;
mod types;

pub use bnf::{basic_normal_form, basic_normal_form_sparse};
pub use formula::{Atom, Formula, FormulaFile, Quant, Var, VarGen};
pub use lcaexpr::{compile_labsets, lca_express};
pub use local::{beta, beta_body, beta_relativized, to_local_form};
pub use parser::{format_formula, format_formula_file, parse_formula, parse_formula_file};
pub use prenex::to_prenex;
pub use types::{enumerate_types, type_isomorphism_check, LcaType, TypeRealization};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LogicError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("formula shape error: {0}")]
    Shape(String),
}
