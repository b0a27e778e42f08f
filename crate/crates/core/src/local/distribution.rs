//! Distribution checker: `h(n) = #(T_n ∩ J_n)` for an independently built
//! `(I, R, R-s)` local family T, with the geometric growth condition
//! `h(n+1) >= (R_n / 4) h(n)`.

use serde::{Deserialize, Serialize};

use crate::cantor::LevelCollection;
use crate::rigor::Rat;

use super::LocalError;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistributionReport {
    pub h: Vec<u64>,
    pub all_nonempty: bool,
    pub first_empty: Option<u32>,
    pub growth_ok: bool,
    pub growth_failures: Vec<u32>,
}

fn common_count(a: &LevelCollection, b: &LevelCollection) -> u64 {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.intervals.len() && j < b.intervals.len() {
        match a.intervals[i].left.cmp(&b.intervals[j].left) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Computes h(n) by exact interval matching and reports the verdicts; both
/// families must share the root and branching frame.
pub fn check_distribution(
    j_levels: &[LevelCollection],
    t_levels: &[LevelCollection],
    branching: &[u64],
) -> Result<DistributionReport, LocalError> {
    if j_levels.is_empty() || t_levels.is_empty() {
        return Err(LocalError::EmptyLevel { level: 0 });
    }
    if j_levels[0].intervals != t_levels[0].intervals {
        return Err(LocalError::Mismatch(
            "families do not share the root interval".into(),
        ));
    }
    let depth = j_levels.len().min(t_levels.len());
    if branching.len() + 1 < depth {
        return Err(LocalError::Mismatch(format!(
            "branching has {} entries for depth {}",
            branching.len(),
            depth - 1
        )));
    }
    let h: Vec<u64> = (0..depth)
        .map(|n| common_count(&j_levels[n], &t_levels[n]))
        .collect();
    let first_empty = h.iter().position(|&c| c == 0).map(|n| n as u32);
    let mut growth_failures = Vec::new();
    for n in 0..depth - 1 {
        // h(n+1) >= (R_n / 4) h(n), compared as 4 h(n+1) >= R_n h(n)
        let lhs = Rat::from_integer((4 * h[n + 1]).into());
        let rhs = Rat::from_integer(branching[n].into()) * Rat::from_integer(h[n].into());
        if lhs < rhs {
            growth_failures.push(n as u32);
        }
    }
    Ok(DistributionReport {
        all_nonempty: first_empty.is_none(),
        first_empty,
        growth_ok: growth_failures.is_empty(),
        growth_failures,
        h,
    })
}
