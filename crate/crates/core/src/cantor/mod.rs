//! The generic `(I, R, r)` Cantor framework: splitting, budgeted layered
//! removal, level-by-level construction and the intersection combinator.

mod build;
mod intersect;
mod level;
mod rule;
mod schedule;

pub use build::{
    apply_removals, build, split, BudgetPolicy, BuildOptions, BuildOutput, LedgerEntry,
    RemovalLedger, RemovedChild,
};
pub use intersect::{intersect_builds, intersect_levels, intersect_schedules};
pub use level::LevelCollection;
pub use rule::{Deletion, MiddleChildren, NoRemovals, RemovalContext, RemovalRule, ScriptedRule};
pub use schedule::CantorSchedule;

use crate::rigor::RigorError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CantorError {
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("branching sequence too short: level {needed} requested, {have} available")]
    HorizonExceeded { needed: u32, have: usize },
    #[error("invalid removal rule output: {0}")]
    InvalidRule(String),
    #[error("budget exceeded: {count} deletions charged to level-{stratum} ancestor #{ancestor}")]
    BudgetExceeded {
        stratum: u32,
        ancestor: usize,
        count: u64,
    },
    #[error("mismatched frames: {0}")]
    MismatchedFrame(String),
    #[error("level mismatch: {0}")]
    LevelMismatch(String),
    #[error("node cap exceeded: {nodes} candidate intervals > cap {cap}")]
    NodeCapExceeded { nodes: usize, cap: usize },
    #[error(transparent)]
    Rigor(#[from] RigorError),
}
