//! Splitting, budgeted removal and level-by-level construction.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::rigor::{ClosedInterval, Precision, Rat};

use super::level::LevelCollection;
use super::rule::{Deletion, RemovalContext, RemovalRule};
use super::schedule::CantorSchedule;
use super::CantorError;

/// Whether budget violations abort the build or are recorded in the ledger.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BudgetPolicy {
    Enforce,
    Audit,
}

#[derive(Clone, Debug)]
pub struct BuildOptions {
    /// Abort when a split would materialize more candidates than this.
    pub node_cap: usize,
    pub policy: BudgetPolicy,
    pub precision: Precision,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            node_cap: 10_000_000,
            policy: BudgetPolicy::Enforce,
            precision: Precision::default_cap(),
        }
    }
}

/// A candidate deleted during the removing procedure, with its parent index
/// (into the previous survivors) and the stratum it was charged to.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RemovedChild {
    pub interval: ClosedInterval,
    pub parent: usize,
    pub stratum: u32,
}

/// Count of deletions charged to one ancestor at one stratum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub stratum: u32,
    pub ancestor: usize,
    pub count: u64,
    /// `None` when no budget applies (nothing checked); under the audit
    /// policy a violated budget is recorded here instead of aborting.
    pub within_budget: Option<bool>,
}

/// Removal ledger for one `J_n -> J_{n+1}` transition.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RemovalLedger {
    pub level: u32,
    pub entries: Vec<LedgerEntry>,
}

impl RemovalLedger {
    pub fn total_removed(&self) -> u64 {
        self.entries.iter().map(|e| e.count).sum()
    }
}

/// The splitting procedure: each parent becomes `branch` closed children of
/// equal length sharing endpoints.
pub fn split(parents: &LevelCollection, branch: u64) -> LevelCollection {
    let mut intervals = Vec::with_capacity(parents.len() * branch as usize);
    let mut parent_links = Vec::with_capacity(parents.len() * branch as usize);
    let divisor = Rat::from_integer(branch.into());
    for (p, iv) in parents.intervals.iter().enumerate() {
        let width = iv.length() / &divisor;
        let mut left = iv.left.clone();
        for i in 0..branch {
            // right endpoint computed as left + width, except the last child
            // reuses the parent's right endpoint so adjacency stays exact
            let right = if i + 1 == branch {
                iv.right.clone()
            } else {
                &left + &width
            };
            intervals.push(ClosedInterval::new(left.clone(), right.clone()));
            parent_links.push(p);
            left = right;
        }
    }
    LevelCollection {
        level: parents.level + 1,
        intervals,
        parents: parent_links,
    }
}

/// Walks parent links from a level-`from` index down to its level-`to`
/// ancestor index.
fn ancestor_at(history: &[LevelCollection], from_level: u32, idx: usize, to_level: u32) -> usize {
    let mut level = from_level;
    let mut i = idx;
    while level > to_level {
        i = history[level as usize].parents[i];
        level -= 1;
    }
    i
}

/// The removing procedure: executes the rule's deletions in descending
/// stratum order, enforcing each per-ancestor budget `r_{m,n}`.
pub fn apply_removals(
    candidates: &LevelCollection,
    deletions: &[Deletion],
    schedule: &CantorSchedule,
    history: &[LevelCollection],
    options: &BuildOptions,
) -> Result<(LevelCollection, RemovalLedger, Vec<RemovedChild>), CantorError> {
    let n = candidates.level - 1; // parents' level
    let mut seen = vec![false; candidates.len()];
    for d in deletions {
        if d.child >= candidates.len() {
            return Err(CantorError::InvalidRule(format!(
                "deletion references candidate #{} of {}",
                d.child,
                candidates.len()
            )));
        }
        if d.stratum > n {
            return Err(CantorError::InvalidRule(format!(
                "deletion charged to stratum {} above current level {n}",
                d.stratum
            )));
        }
        if seen[d.child] {
            return Err(CantorError::InvalidRule(format!(
                "candidate #{} deleted twice",
                d.child
            )));
        }
        seen[d.child] = true;
    }

    // counts per (stratum, ancestor), gathered in descending stratum order
    let mut counts: BTreeMap<(u32, usize), u64> = BTreeMap::new();
    let mut ordered: Vec<&Deletion> = deletions.iter().collect();
    ordered.sort_by(|a, b| b.stratum.cmp(&a.stratum).then(a.child.cmp(&b.child)));
    for d in &ordered {
        let parent = candidates.parents[d.child];
        let anc = ancestor_at(history, n, parent, d.stratum);
        *counts.entry((d.stratum, anc)).or_insert(0) += 1;
    }

    let mut ledger = RemovalLedger {
        level: n,
        entries: Vec::with_capacity(counts.len()),
    };
    for (&(m, anc), &count) in &counts {
        let budget = schedule.budget(m, n);
        let ok = budget.decide_ge(&Rat::from_integer(count.into()), &options.precision)?;
        if !ok && options.policy == BudgetPolicy::Enforce {
            return Err(CantorError::BudgetExceeded {
                stratum: m,
                ancestor: anc,
                count,
            });
        }
        ledger.entries.push(LedgerEntry {
            stratum: m,
            ancestor: anc,
            count,
            within_budget: Some(ok),
        });
    }

    let mut intervals = Vec::with_capacity(candidates.len() - deletions.len());
    let mut parents = Vec::with_capacity(candidates.len() - deletions.len());
    let mut removed = Vec::with_capacity(deletions.len());
    let mut stratum_of = vec![0u32; candidates.len()];
    for d in deletions {
        stratum_of[d.child] = d.stratum;
    }
    for (i, iv) in candidates.intervals.iter().enumerate() {
        if seen[i] {
            removed.push(RemovedChild {
                interval: iv.clone(),
                parent: candidates.parents[i],
                stratum: stratum_of[i],
            });
        } else {
            intervals.push(iv.clone());
            parents.push(candidates.parents[i]);
        }
    }
    let survivors = LevelCollection {
        level: candidates.level,
        intervals,
        parents,
    };
    Ok((survivors, ledger, removed))
}

/// A completed construction: the nested chain `J_0 ⊃ ... ⊃ J_depth` plus the
/// removal records needed downstream.
#[derive(Clone, Debug)]
pub struct BuildOutput {
    pub levels: Vec<LevelCollection>,
    /// `removed[k]` holds the candidates deleted while building level k+1.
    pub removed: Vec<Vec<RemovedChild>>,
    pub ledgers: Vec<RemovalLedger>,
    /// First level that came out empty, if any (the construction stops
    /// there; an empty level is a reported outcome, not an error).
    pub empty_from: Option<u32>,
}

impl BuildOutput {
    pub fn depth(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    pub fn final_level(&self) -> &LevelCollection {
        self.levels.last().expect("build outputs hold J_0")
    }

    pub fn counts(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.len()).collect()
    }
}

/// Runs the full splitting/removing loop to the requested depth.
pub fn build(
    schedule: &CantorSchedule,
    rule: &dyn RemovalRule,
    depth: u32,
    options: &BuildOptions,
) -> Result<BuildOutput, CantorError> {
    let mut levels = vec![LevelCollection::root(schedule.root().clone())];
    let mut removed = Vec::new();
    let mut ledgers = Vec::new();
    let mut empty_from = None;

    for n in 0..depth {
        let branch = schedule.branch(n)?;
        let parents = levels.last().unwrap();
        let nodes = parents.len().saturating_mul(branch as usize);
        if nodes > options.node_cap {
            return Err(CantorError::NodeCapExceeded {
                nodes,
                cap: options.node_cap,
            });
        }
        let candidates = split(parents, branch);
        let deletions = rule.deletions(&RemovalContext {
            level: n,
            candidates: &candidates,
            history: &levels,
            schedule,
        })?;
        let (survivors, ledger, cut) =
            apply_removals(&candidates, &deletions, schedule, &levels, options)?;
        ledgers.push(ledger);
        removed.push(cut);
        let became_empty = survivors.is_empty();
        levels.push(survivors);
        if became_empty {
            empty_from = Some(n + 1);
            break;
        }
    }

    Ok(BuildOutput {
        levels,
        removed,
        ledgers,
        empty_from,
    })
}
