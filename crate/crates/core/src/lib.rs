//! Distributed first-order model checking on sparse labeled graphs.
//!
//! The crate is organized around a quantifier-elimination pipeline that
//! rewrites first-order formulas over labeled graphs into quantifier-free
//! formulas over enriched vertex labelings, evaluated on low-treedepth
//! skeletons. On top of that sit a synchronous-round message-passing
//! simulator, the distributed marking/deciding/counting/optimization
//! algorithms, and proof-labeling certification schemes.
//!
//! Module map:
//! - [`graph`]: labeled graphs, rooted and decomposition forests, treedepth
//!   machinery, treedepth colorings, skeletons, file format, generators.
//! - [`logic`]: the formula AST, parser/printer, and syntactic rewrites
//!   (prenex form, local form, ball formulas, lca expression, lca types,
//!   basic normal form).
//! - [`oracle`]: brute-force centralized semantics; ground truth for tests.
//! - [`qelim`]: the quantifier-elimination pipeline itself.
//! - [`congest`]: the synchronous-round simulator with bit accounting.
//! - [`distrib`]: the distributed algorithms as node programs.
//! - [`certify`]: proof-labeling schemes (prover + one-round verifier).

pub mod base;
pub mod certify;
pub mod congest;
pub mod distrib;
pub mod graph;
pub mod logic;
pub mod oracle;
pub mod qelim;

pub use base::{ColorSet, Label, Labeling, VertexId};
