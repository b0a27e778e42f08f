//! Removal rules: the decision procedure the paper leaves unspecified.
//!
//! The framework only bounds HOW MANY intervals may be removed per ancestor;
//! which ones go is supplied by a `RemovalRule`. Stock rules cover the
//! classic constructions and scripted test scenarios; the Littlewood sieve
//! provides its own rule.

use std::collections::BTreeMap;

use super::level::LevelCollection;
use super::schedule::CantorSchedule;
use super::CantorError;

/// One deletion: candidate index plus the stratum `m` it is charged to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Deletion {
    pub child: usize,
    pub stratum: u32,
}

/// What a rule sees when deciding deletions for the `J_n -> J_{n+1}` step.
pub struct RemovalContext<'a> {
    /// The level n being refined (candidates live at n+1).
    pub level: u32,
    /// The split output `II_{n+1}`.
    pub candidates: &'a LevelCollection,
    /// All prior survivor collections `J_0 ..= J_n`.
    pub history: &'a [LevelCollection],
    pub schedule: &'a CantorSchedule,
}

pub trait RemovalRule {
    fn deletions(&self, ctx: &RemovalContext<'_>) -> Result<Vec<Deletion>, CantorError>;
}

/// Keeps every candidate.
pub struct NoRemovals;

impl RemovalRule for NoRemovals {
    fn deletions(&self, _ctx: &RemovalContext<'_>) -> Result<Vec<Deletion>, CantorError> {
        Ok(Vec::new())
    }
}

/// Removes the `count` most central children of every parent, charged to the
/// diagonal stratum n. With `R_n = 3, count = 1` this is the middle-third
/// rule.
pub struct MiddleChildren {
    pub count: u64,
}

impl RemovalRule for MiddleChildren {
    fn deletions(&self, ctx: &RemovalContext<'_>) -> Result<Vec<Deletion>, CantorError> {
        let mut by_parent: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &p) in ctx.candidates.parents.iter().enumerate() {
            by_parent.entry(p).or_default().push(i);
        }
        let mut out = Vec::new();
        for (_, children) in by_parent {
            let r = children.len() as i64;
            let mut ranked: Vec<(i64, usize)> = children
                .iter()
                .enumerate()
                .map(|(pos, &idx)| (((2 * pos as i64 + 1) - r).abs(), idx))
                .collect();
            ranked.sort();
            for &(_, idx) in ranked.iter().take(self.count as usize) {
                out.push(Deletion {
                    child: idx,
                    stratum: ctx.level,
                });
            }
        }
        out.sort_by_key(|d| d.child);
        Ok(out)
    }
}

/// Replays a fixed script: per level n, explicit (candidate index, stratum)
/// pairs.
#[derive(Default)]
pub struct ScriptedRule {
    pub per_level: BTreeMap<u32, Vec<(usize, u32)>>,
}

impl RemovalRule for ScriptedRule {
    fn deletions(&self, ctx: &RemovalContext<'_>) -> Result<Vec<Deletion>, CantorError> {
        Ok(self
            .per_level
            .get(&ctx.level)
            .map(|v| {
                v.iter()
                    .map(|&(child, stratum)| Deletion { child, stratum })
                    .collect()
            })
            .unwrap_or_default())
    }
}
