//! Level construction: splitting into `R_n` children of exact length
//! `c1 R^-(n+1) F(n+1)^-1` and striking out children whose closure meets the
//! outer exclusion interval of any candidate of the level stratum.
//!
//! Witness mode tracks a single active interval and picks the leftmost
//! surviving child; children are never materialized, killed index ranges are
//! computed per candidate by exact rational division. Full mode drives the
//! generic Cantor builder with a sieve removal rule (feasible for small R
//! under the node cap).

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cantor::{
    build as cantor_build, BudgetPolicy, BuildOptions, BuildOutput, CantorError, Deletion,
    RemovalContext, RemovalRule,
};
use crate::rigor::{big_serde, rat_ceil, rat_floor, ClosedInterval, Enclosure, Rat};

use super::enumerate::{enumerate_candidates, outer_radius, RationalCandidate};
use super::params::{Instance, InstanceParams};
use super::LittlewoodError;

/// Ledger entry for one witness step `J_n -> J_{n+1}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessLedgerEntry {
    pub level: u32,
    pub split_into: u64,
    /// Candidates whose outer exclusion interval met the active interval.
    pub candidates_hit: u64,
    /// Children struck out (union over candidates).
    pub removed: u64,
    /// The evaluated removal budget for this level (n >= 1).
    pub budget: Option<Enclosure>,
    pub within_budget: Option<bool>,
}

/// A nested interval chain certifying membership in the badly approximable
/// set up to the stated height bound, re-checkable by brute force.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub params: InstanceParams,
    pub chain: Vec<ClosedInterval>,
    pub ledgers: Vec<WitnessLedgerEntry>,
    #[serde(with = "big_serde")]
    pub height_bound: BigInt,
}

/// Sorted, merged set of killed child-index ranges.
struct KillRanges {
    raw: Vec<(u64, u64)>, // inclusive ranges
}

impl KillRanges {
    fn new() -> Self {
        KillRanges { raw: Vec::new() }
    }

    fn add(&mut self, lo: u64, hi: u64) {
        self.raw.push((lo, hi));
    }

    fn merged(mut self) -> Vec<(u64, u64)> {
        self.raw.sort();
        let mut out: Vec<(u64, u64)> = Vec::with_capacity(self.raw.len());
        for (lo, hi) in self.raw {
            match out.last_mut() {
                Some((_, last_hi)) if lo <= *last_hi + 1 => *last_hi = (*last_hi).max(hi),
                _ => out.push((lo, hi)),
            }
        }
        out
    }
}

/// Killed child-index range for one exclusion interval, or None if it misses
/// every child. Children are `[left + i w, left + (i+1) w]` for i < branch.
fn killed_range(
    delta_lo: &Rat,
    delta_hi: &Rat,
    left: &Rat,
    width: &Rat,
    branch: u64,
) -> Option<(u64, u64)> {
    // child i meets [a, b] iff i >= (a - left)/w - 1 and i <= (b - left)/w
    let lo_exact = (delta_lo - left) / width;
    let hi_exact = (delta_hi - left) / width;
    let ilo = rat_ceil(&lo_exact) - BigInt::one();
    let ihi = rat_floor(&hi_exact);
    let ilo = ilo.max(BigInt::zero());
    let last = BigInt::from(branch - 1);
    let ihi = ihi.min(last);
    if ilo > ihi {
        return None;
    }
    Some((ilo.to_u64().unwrap(), ihi.to_u64().unwrap()))
}

struct StepOutcome {
    child_index: u64,
    candidates_hit: u64,
    removed: u64,
}

/// One witness step for a set of co-sieving instances sharing the frame.
fn witness_step(
    insts: &[&Instance],
    n: u32,
    active: &ClosedInterval,
) -> Result<StepOutcome, LittlewoodError> {
    let branch = insts[0].level_r(n)?;
    let width = active.length() / Rat::from_integer(branch.into());
    let mut kills = KillRanges::new();
    let mut total_hits = 0u64;
    let mut sample: Vec<RationalCandidate> = Vec::new();
    for inst in insts {
        let cands = enumerate_candidates(inst, n, active)?;
        total_hits += cands.len() as u64;
        for c in &cands {
            let rho = outer_radius(inst, &c.q, &c.height)?;
            let center = c.center();
            let lo = &center - &rho;
            let hi = center + rho;
            if let Some((a, b)) = killed_range(&lo, &hi, &active.left, &width, branch) {
                kills.add(a, b);
            }
        }
        if sample.len() < 16 {
            sample.extend(cands.into_iter().take(16 - sample.len()));
        }
    }
    let merged = kills.merged();
    let removed: u64 = merged.iter().map(|(a, b)| b - a + 1).sum();
    // leftmost surviving child index
    let mut next = 0u64;
    for &(a, b) in &merged {
        if a > next {
            break;
        }
        next = b + 1;
    }
    if next >= branch {
        return Err(LittlewoodError::NoSurvivor {
            level: n,
            killers: sample
                .iter()
                .map(|c| format!("{}/{} (H = {})", c.r, c.q, c.height))
                .collect(),
            removed,
        });
    }
    Ok(StepOutcome {
        child_index: next,
        candidates_hit: total_hits,
        removed,
    })
}

fn child_interval(active: &ClosedInterval, width: &Rat, i: u64, branch: u64) -> ClosedInterval {
    let left = &active.left + width * Rat::from_integer(i.into());
    let right = if i + 1 == branch {
        active.right.clone()
    } else {
        &active.left + width * Rat::from_integer((i + 1).into())
    };
    ClosedInterval::new(left, right)
}

/// Builds a witness chain to the requested depth; the certificate's height
/// bound is `R^(depth-1) F(depth-1)`.
pub fn witness(inst: &Instance, depth: u32) -> Result<WitnessCertificate, LittlewoodError> {
    let certs = witness_joint(&[inst], depth)?;
    Ok(certs.into_iter().next().expect("one instance in, one out"))
}

/// Joint witness for instances sharing (variant, R, c1, c, root) but
/// different D-sequences: children are removed when they meet ANY instance's
/// outer exclusion intervals, so the chain certifies every instance at once
/// (the combined removals live under the summed budgets).
pub fn witness_joint(
    insts: &[&Instance],
    depth: u32,
) -> Result<Vec<WitnessCertificate>, LittlewoodError> {
    let first = insts
        .first()
        .ok_or_else(|| LittlewoodError::InvalidParams("no instances given".into()))?;
    for other in &insts[1..] {
        let (a, b) = (first.params(), other.params());
        if a.variant != b.variant || a.r != b.r || a.c1 != b.c1 || a.c != b.c || a.root != b.root {
            return Err(LittlewoodError::InvalidParams(
                "joint witnesses need a shared (variant, R, c1, c, root) frame".into(),
            ));
        }
    }
    let precision = first.precision();

    let mut chain = vec![first.params().root.clone()];
    let mut ledgers: Vec<WitnessLedgerEntry> = Vec::with_capacity(depth as usize);
    let mut active = first.params().root.clone();

    for n in 0..depth {
        let branch = first.level_r(n)?;
        let width = active.length() / Rat::from_integer(branch.into());
        let outcome = witness_step(insts, n, &active)?;

        // summed budget across instances, defined for n >= 1
        let (budget, within_budget) = if n >= 1 {
            let mut total = first.budget(n);
            for other in &insts[1..] {
                total = total.add(&other.budget(n));
            }
            let removed = Rat::from_integer(outcome.removed.into());
            let ok = total.decide_ge(&removed, precision)?;
            if !ok && insts.iter().all(|i| i.params().certified) {
                return Err(LittlewoodError::BudgetViolation {
                    level: n,
                    removed: outcome.removed,
                });
            }
            (Some(total.enclose(&crate::rigor::rat_pow2(-32))?), Some(ok))
        } else {
            if outcome.removed > 0 {
                return Err(LittlewoodError::InvalidParams(
                    "no removals can occur at level 0: heights are at least 1".into(),
                ));
            }
            (None, None)
        };

        ledgers.push(WitnessLedgerEntry {
            level: n,
            split_into: branch,
            candidates_hit: outcome.candidates_hit,
            removed: outcome.removed,
            budget,
            within_budget,
        });
        active = child_interval(&active, &width, outcome.child_index, branch);
        chain.push(active.clone());
    }

    let height_bound = first.height_min(depth)?;
    Ok(insts
        .iter()
        .map(|inst| WitnessCertificate {
            params: inst.params().clone(),
            chain: chain.clone(),
            ledgers: ledgers.clone(),
            height_bound: height_bound.clone(),
        })
        .collect())
}

/// The sieve as a removal rule for the generic Cantor builder (full mode,
/// experimental scales).
pub struct SieveRule<'a> {
    inst: &'a Instance,
}

impl<'a> SieveRule<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        SieveRule { inst }
    }
}

impl RemovalRule for SieveRule<'_> {
    fn deletions(&self, ctx: &RemovalContext<'_>) -> Result<Vec<Deletion>, CantorError> {
        let n = ctx.level;
        if n == 0 {
            return Ok(Vec::new());
        }
        let to_cantor = |e: LittlewoodError| match e {
            LittlewoodError::Cantor(c) => c,
            LittlewoodError::Rigor(r) => CantorError::Rigor(r),
            other => CantorError::InvalidRule(other.to_string()),
        };
        let parents = ctx.history.last().expect("history holds J_n");
        let branch = ctx
            .schedule
            .branch(n)
            .expect("branching covers the built depth");
        let mut killed = vec![false; ctx.candidates.len()];
        for (p, parent_iv) in parents.intervals.iter().enumerate() {
            let width = parent_iv.length() / Rat::from_integer(branch.into());
            let cands = enumerate_candidates(self.inst, n, parent_iv).map_err(to_cantor)?;
            for c in &cands {
                let rho = outer_radius(self.inst, &c.q, &c.height).map_err(to_cantor)?;
                let center = c.center();
                let lo = &center - &rho;
                let hi = center + rho;
                if let Some((a, b)) = killed_range(&lo, &hi, &parent_iv.left, &width, branch) {
                    for i in a..=b {
                        killed[p * branch as usize + i as usize] = true;
                    }
                }
            }
        }
        Ok(killed
            .iter()
            .enumerate()
            .filter(|(_, &k)| k)
            .map(|(child, _)| Deletion {
                child,
                stratum: n - 1,
            })
            .collect())
    }
}

/// Full-mode construction via the generic builder. Uncertified instances run
/// under the audit policy: counting bounds are reported in the ledgers, not
/// asserted.
pub fn build_full(
    inst: &Instance,
    depth: u32,
    node_cap: usize,
) -> Result<BuildOutput, LittlewoodError> {
    let schedule = inst.schedule_for(depth)?;
    let rule = SieveRule::new(inst);
    let options = BuildOptions {
        node_cap,
        policy: if inst.params().certified {
            BudgetPolicy::Enforce
        } else {
            BudgetPolicy::Audit
        },
        precision: *inst.precision(),
    };
    Ok(cantor_build(&schedule, &rule, depth, &options)?)
}
