//! Intersection of schedules (summed budgets) and of built levels.

use std::collections::BTreeMap;

use crate::rigor::CertifiedReal;

use super::build::BuildOutput;
use super::level::LevelCollection;
use super::schedule::CantorSchedule;
use super::CantorError;

/// Combines schedules sharing a frame: budgets are entrywise sums.
pub fn intersect_schedules(schedules: &[CantorSchedule]) -> Result<CantorSchedule, CantorError> {
    let first = schedules
        .first()
        .ok_or_else(|| CantorError::MismatchedFrame("no schedules given".into()))?;
    for (i, s) in schedules.iter().enumerate().skip(1) {
        if s.root() != first.root() {
            return Err(CantorError::MismatchedFrame(format!(
                "schedule #{i} has root [{}, {}] but #0 has [{}, {}]",
                s.root().left,
                s.root().right,
                first.root().left,
                first.root().right
            )));
        }
        if s.branching() != first.branching() {
            return Err(CantorError::MismatchedFrame(format!(
                "schedule #{i} branching differs from #0"
            )));
        }
    }
    let mut budgets: BTreeMap<(u32, u32), CertifiedReal> = BTreeMap::new();
    for s in schedules {
        for (&key, v) in s.budget_entries() {
            budgets
                .entry(key)
                .and_modify(|acc| *acc = acc.add(v))
                .or_insert_with(|| v.clone());
        }
    }
    CantorSchedule::new(first.root().clone(), first.branching().to_vec(), budgets)
}

/// Intervals present in both collections (exact endpoint equality), sorted.
///
/// Parent links are left empty: indices into two different builds have no
/// common meaning. `intersect_builds` recomputes them.
pub fn intersect_levels(
    a: &LevelCollection,
    b: &LevelCollection,
) -> Result<LevelCollection, CantorError> {
    if a.level != b.level {
        return Err(CantorError::LevelMismatch(format!(
            "levels differ: {} vs {}",
            a.level, b.level
        )));
    }
    if let (Some(x), Some(y)) = (a.intervals.first(), b.intervals.first()) {
        if x.length() != y.length() {
            return Err(CantorError::LevelMismatch(format!(
                "interval lengths differ at level {}: {} vs {}",
                a.level,
                x.length(),
                y.length()
            )));
        }
    }
    let mut intervals = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.intervals.len() && j < b.intervals.len() {
        match a.intervals[i].left.cmp(&b.intervals[j].left) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                intervals.push(a.intervals[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    Ok(LevelCollection {
        level: a.level,
        intervals,
        parents: Vec::new(),
    })
}

/// Level-by-level intersection of two builds, with parent links recomputed
/// by containment.
pub fn intersect_builds(
    a: &BuildOutput,
    b: &BuildOutput,
) -> Result<Vec<LevelCollection>, CantorError> {
    let depth = a.levels.len().min(b.levels.len());
    let mut out: Vec<LevelCollection> = Vec::with_capacity(depth);
    for n in 0..depth {
        let mut joint = intersect_levels(&a.levels[n], &b.levels[n])?;
        if n > 0 {
            let prev = &out[n - 1];
            joint.parents = joint
                .intervals
                .iter()
                .map(|iv| {
                    prev.find_container(iv).ok_or_else(|| {
                        CantorError::LevelMismatch(format!(
                            "intersected interval at level {n} has no surviving parent"
                        ))
                    })
                })
                .collect::<Result<_, _>>()?;
        }
        out.push(joint);
    }
    Ok(out)
}
