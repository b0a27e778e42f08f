//! Extraction of a local Cantor subset via the auxiliary `L/R` tables.
//!
//! Each step n -> n+1 sweeps three passes: the diagonal pass (good
//! survivors under the current front, and a fresh dumping ground from the
//! removed candidates), a descending dump (members whose dumped-children
//! count reaches `s_u` move to the dumping ground themselves), and an
//! ascending re-nesting under the surviving parents.
//! The extracted family is `L_m := L_{m,N}` at the requested horizon, with an
//! empirical stabilization report.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cantor::{BuildOutput, LevelCollection};
use crate::rigor::Rat;

use super::{LocalError, LocalSchedule};

/// A member of a dumping-ground collection at level m: a build survivor or a
/// removed candidate (indexed into `build.removed[m-1]`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AuxMember {
    Kept(usize),
    Cut(usize),
}

/// Snapshot of one auxiliary cell `(m, n)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AuxCell {
    pub l: Vec<usize>,
    pub r: Vec<AuxMember>,
}

#[derive(Clone, Debug, Default)]
pub struct ExtractOptions {
    /// Record full per-(m,n) sets (for exhaustive condition checks); cheap at
    /// small depths, skipped by default.
    pub record_history: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellReport {
    pub m: u32,
    pub n: u32,
    pub l_count: u64,
    pub r_count: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilizationEntry {
    pub m: u32,
    /// Last n at which `L_{m,n}` changed; the collection was constant from
    /// here to the horizon.
    pub stable_from: u32,
    /// Whether constancy was actually observed (stable_from < horizon).
    pub observed_constant_tail: bool,
}

/// Extraction report: per-(m,n) cardinalities, stabilization, verdict.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub horizon: u32,
    pub cells: Vec<CellReport>,
    pub stabilization: Vec<StabilizationEntry>,
    pub nonempty: bool,
}

/// The extracted local family plus everything needed to audit it.
#[derive(Clone, Debug)]
pub struct LocalExtraction {
    /// `L_m` as level collections with parent links into `L_{m-1}`.
    pub levels: Vec<LevelCollection>,
    /// Final `L_{m,N}` as sorted indices into the build's survivors at m.
    pub l_indices: Vec<Vec<usize>>,
    /// Final dumping grounds `R_{m,N}`.
    pub r_members: Vec<Vec<AuxMember>>,
    pub cardinalities: Vec<CellReport>,
    pub stabilization: Vec<StabilizationEntry>,
    /// Full table history when requested.
    pub history: Option<BTreeMap<(u32, u32), AuxCell>>,
}

impl LocalExtraction {
    pub fn report(&self) -> ExtractionReport {
        ExtractionReport {
            horizon: self.levels.len() as u32 - 1,
            cells: self.cardinalities.clone(),
            stabilization: self.stabilization.clone(),
            nonempty: self.levels.iter().all(|l| !l.is_empty()),
        }
    }
}

struct Sweep<'a> {
    build: &'a BuildOutput,
    schedule: &'a LocalSchedule,
    l_sets: Vec<BTreeSet<usize>>,
    r_sets: Vec<BTreeSet<AuxMember>>,
    /// Per level m: count of R-members by their level-(m-1) parent index.
    r_parent_counts: Vec<BTreeMap<usize, u64>>,
    last_change: Vec<u32>,
}

impl<'a> Sweep<'a> {
    fn parent_of(&self, m: usize, member: AuxMember) -> usize {
        match member {
            AuxMember::Kept(i) => self.build.levels[m].parents[i],
            AuxMember::Cut(i) => self.build.removed[m - 1][i].parent,
        }
    }

    fn insert_r(&mut self, m: usize, member: AuxMember) {
        if self.r_sets[m].insert(member) && m > 0 {
            let p = self.parent_of(m, member);
            *self.r_parent_counts[m].entry(p).or_insert(0) += 1;
        }
    }

    /// Diagonal pass: the fresh front at level n+1.
    fn diagonal_pass(&mut self, next: usize) {
        let survivors: BTreeSet<usize> = self.build.levels[next]
            .parents
            .iter()
            .enumerate()
            .filter(|(_, &p)| self.l_sets[next - 1].contains(&p))
            .map(|(i, _)| i)
            .collect();
        self.l_sets.push(survivors);
        self.r_sets.push(BTreeSet::new());
        self.r_parent_counts.push(BTreeMap::new());
        self.last_change.push(next as u32);
        let cuts: Vec<usize> = self.build.removed[next - 1]
            .iter()
            .enumerate()
            .filter(|(_, rc)| self.l_sets[next - 1].contains(&rc.parent))
            .map(|(i, _)| i)
            .collect();
        for i in cuts {
            self.insert_r(next, AuxMember::Cut(i));
        }
    }

    /// Descending dump: members with at least `s_u` dumped children move out.
    fn dump_pass(&mut self, next: usize) {
        for u in (0..next).rev() {
            let s_u = self.schedule.s(u as u32);
            let dumped: Vec<usize> = self.l_sets[u]
                .iter()
                .copied()
                .filter(|j| {
                    let count = self.r_parent_counts[u + 1].get(j).copied().unwrap_or(0);
                    &Rat::from_integer(count.into()) >= s_u
                })
                .collect();
            if dumped.is_empty() {
                continue;
            }
            self.last_change[u] = next as u32;
            for j in dumped {
                self.l_sets[u].remove(&j);
                self.insert_r(u, AuxMember::Kept(j));
            }
        }
    }

    /// Ascending re-nesting.
    fn renest_pass(&mut self, next: usize) {
        for u in 1..=next {
            let orphans: Vec<usize> = self.l_sets[u]
                .iter()
                .copied()
                .filter(|&j| !self.l_sets[u - 1].contains(&self.build.levels[u].parents[j]))
                .collect();
            if orphans.is_empty() {
                continue;
            }
            self.last_change[u] = next as u32;
            for j in orphans {
                self.l_sets[u].remove(&j);
            }
        }
    }
}

/// Runs the extraction over a completed build.
pub fn extract_local(
    build: &BuildOutput,
    schedule: &LocalSchedule,
    options: &ExtractOptions,
) -> Result<LocalExtraction, LocalError> {
    if build.levels.is_empty() {
        return Err(LocalError::EmptyLevel { level: 0 });
    }
    if let Some(n) = build.empty_from {
        return Err(LocalError::EmptyLevel { level: n });
    }
    let horizon = build.levels.len() - 1;
    let mut sweep = Sweep {
        build,
        schedule,
        l_sets: vec![(0..build.levels[0].len()).collect()],
        r_sets: vec![BTreeSet::new()],
        r_parent_counts: vec![BTreeMap::new()],
        last_change: vec![0],
    };
    let mut cardinalities = Vec::new();
    let mut history: Option<BTreeMap<(u32, u32), AuxCell>> =
        options.record_history.then(BTreeMap::new);

    let mut snapshot = |sweep: &Sweep<'_>, n: usize, cards: &mut Vec<CellReport>| {
        for m in 0..=n {
            cards.push(CellReport {
                m: m as u32,
                n: n as u32,
                l_count: sweep.l_sets[m].len() as u64,
                r_count: sweep.r_sets[m].len() as u64,
            });
        }
        if let Some(h) = history.as_mut() {
            for m in 0..=n {
                h.insert(
                    (m as u32, n as u32),
                    AuxCell {
                        l: sweep.l_sets[m].iter().copied().collect(),
                        r: sweep.r_sets[m].iter().copied().collect(),
                    },
                );
            }
        }
    };

    snapshot(&sweep, 0, &mut cardinalities);
    for next in 1..=horizon {
        sweep.diagonal_pass(next);
        sweep.dump_pass(next);
        sweep.renest_pass(next);
        for m in 0..=next {
            if sweep.l_sets[m].is_empty() {
                return Err(LocalError::EmptyExtraction {
                    m: m as u32,
                    n: next as u32,
                });
            }
        }
        snapshot(&sweep, next, &mut cardinalities);
    }

    // materialize L_m with parent links into L_{m-1}
    let mut levels: Vec<LevelCollection> = Vec::with_capacity(horizon + 1);
    let mut l_indices: Vec<Vec<usize>> = Vec::with_capacity(horizon + 1);
    for m in 0..=horizon {
        let indices: Vec<usize> = sweep.l_sets[m].iter().copied().collect();
        let intervals = indices
            .iter()
            .map(|&i| build.levels[m].intervals[i].clone())
            .collect();
        let parents = if m == 0 {
            Vec::new()
        } else {
            indices
                .iter()
                .map(|&i| {
                    let p = build.levels[m].parents[i];
                    l_indices[m - 1].binary_search(&p).map_err(|_| {
                        LocalError::InvariantViolation(format!(
                            "extracted interval at level {m} lost its parent"
                        ))
                    })
                })
                .collect::<Result<_, _>>()?
        };
        levels.push(LevelCollection {
            level: m as u32,
            intervals,
            parents,
        });
        l_indices.push(indices);
    }

    let stabilization = sweep
        .last_change
        .iter()
        .enumerate()
        .map(|(m, &n)| StabilizationEntry {
            m: m as u32,
            stable_from: n,
            observed_constant_tail: (n as usize) < horizon,
        })
        .collect();

    Ok(LocalExtraction {
        levels,
        l_indices,
        r_members: sweep
            .r_sets
            .iter()
            .map(|s| s.iter().copied().collect())
            .collect(),
        cardinalities,
        stabilization,
        history,
    })
}

/// Extraction with escalation: an empty cell under a passing
/// dimension certificate is an invariant violation, not a permitted
/// outcome.
pub fn extract_local_checked(
    build: &BuildOutput,
    schedule: &LocalSchedule,
    dimension_condition_passed: bool,
    options: &ExtractOptions,
) -> Result<LocalExtraction, LocalError> {
    match extract_local(build, schedule, options) {
        Err(LocalError::EmptyExtraction { m, n }) if dimension_condition_passed => {
            Err(LocalError::InvariantViolation(format!(
                "L({m},{n}) is empty although the dimension condition holds"
            )))
        }
        other => other,
    }
}

/// Exhaustive verification of the table conditions on a recorded history:
/// membership, nesting and child counts.
pub fn verify_conditions(
    build: &BuildOutput,
    schedule: &LocalSchedule,
    extraction: &LocalExtraction,
) -> Result<(), LocalError> {
    let history = extraction.history.as_ref().ok_or_else(|| {
        LocalError::Mismatch("condition check needs an extraction with recorded history".into())
    })?;
    for ((m, n), cell) in history {
        let (m_us, _) = (*m as usize, *n as usize);
        // membership: indices are valid survivors of level m
        for &i in &cell.l {
            if i >= build.levels[m_us].len() {
                return Err(LocalError::InvariantViolation(format!(
                    "membership fails at ({m},{n}): index {i} outside level {m}"
                )));
            }
        }
        if *m < *n {
            let child = history.get(&(m + 1, *n)).expect("triangular history");
            // nesting: every child's parent survives in L(m, n)
            let l_set: BTreeSet<usize> = cell.l.iter().copied().collect();
            for &c in &child.l {
                if !l_set.contains(&build.levels[m_us + 1].parents[c]) {
                    return Err(LocalError::InvariantViolation(format!(
                        "nesting fails at ({m},{n}): child {c} not nested"
                    )));
                }
            }
            // child counts: every member keeps at least R_m - s_m children
            let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
            for &c in &child.l {
                *counts.entry(build.levels[m_us + 1].parents[c]).or_insert(0) += 1;
            }
            let need = schedule.keep_count(*m);
            for &j in &cell.l {
                let have = counts.get(&j).copied().unwrap_or(0);
                if Rat::from_integer(have.into()) < need {
                    return Err(LocalError::InvariantViolation(format!(
                        "child count fails at ({m},{n}): member {j} keeps {have} < {need} children"
                    )));
                }
            }
        }
    }
    Ok(())
}
