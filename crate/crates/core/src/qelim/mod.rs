//! The quantifier-elimination pipeline: forest-level elimination,
//! treedepth-to-forest reduction, skeleton-level expansion, lca-predicate
//! removal, the induction over formula structure, and the counting rewrites.

mod counting;
mod expansion;
mod forest;
mod reduce;
mod removelca;
mod td;

pub use expansion::{color_membership, reduce_existential_expansion, ExpansionResult, URecord};
pub use removelca::{remove_lca, skeleton_structure_labels, Localized, RemovalOutput};
pub use td::{reduce_existential_td, treedepth_to_forest, TdReduction};

pub use forest::{
    eliminate_type_forest, reduce_existential_forest, ElimCase, ElimRound, ForestReduction,
    TypeElimStep,
};




use thiserror::Error;

use crate::graph::GraphError;
use crate::logic::LogicError;
use crate::oracle::OracleError;

#[derive(Debug, Error)]
pub enum QelimError {
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("formula shape error: {0}")]
    Shape(String),
    #[error("skeleton parameter too small: need p >= {needed}, skeleton has {got}")]
    SkeletonParam { needed: u32, got: u32 },
    #[error("disconnected witness in local mode (case 3 elimination)")]
    LocalModeDisconnected,
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Allocator for fresh label-namespace stages; one per pipeline run.
#[derive(Debug, Default, Clone)]
pub struct StageAlloc {
    next: u32,
}

impl StageAlloc {
    pub fn new() -> Self {
        StageAlloc { next: 0 }
    }

    pub fn fresh(&mut self) -> u32 {
        self.next += 1;
        self.next
    }
}

/// Cap on basic-normal-form type sets inside the pipeline.
pub const TYPE_CAP: u64 = 200_000;
