//! Cantor schedules: the triple `(I, R, r)`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::de::Error as _;
use serde::ser::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rigor::{rat_serde, CertifiedReal, ClosedInterval, Rat};

use super::CantorError;

/// Root interval, branching sequence `R_n` and the sparse removal-budget
/// matrix `r_{m,n}` (absent entries are zero).
///
/// Budgets are non-negative reals: exact rationals for generic schedules, or
/// refinable enclosed values when a budget is defined through logarithms.
#[derive(Clone, Debug)]
pub struct CantorSchedule {
    root: ClosedInterval,
    branching: Vec<u64>,
    budgets: BTreeMap<(u32, u32), CertifiedReal>,
}

impl CantorSchedule {
    pub fn new(
        root: ClosedInterval,
        branching: Vec<u64>,
        budgets: BTreeMap<(u32, u32), CertifiedReal>,
    ) -> Result<Self, CantorError> {
        if root.length() <= Rat::zero() {
            return Err(CantorError::InvalidSchedule(
                "root interval must have positive length".into(),
            ));
        }
        if let Some(bad) = branching.iter().position(|r| *r < 2) {
            return Err(CantorError::InvalidSchedule(format!(
                "branching R_{bad} = {} < 2",
                branching[bad]
            )));
        }
        for ((m, n), v) in &budgets {
            if m > n {
                return Err(CantorError::InvalidSchedule(format!(
                    "budget index ({m}, {n}) has m > n"
                )));
            }
            if let Some(x) = v.as_exact() {
                if x < &Rat::zero() {
                    return Err(CantorError::InvalidSchedule(format!(
                        "budget r_({m},{n}) = {x} is negative"
                    )));
                }
            }
        }
        Ok(CantorSchedule {
            root,
            branching,
            budgets,
        })
    }

    pub fn root(&self) -> &ClosedInterval {
        &self.root
    }

    pub fn branching(&self) -> &[u64] {
        &self.branching
    }

    /// `R_n`; errors when the materialized branching is too short.
    pub fn branch(&self, n: u32) -> Result<u64, CantorError> {
        self.branching
            .get(n as usize)
            .copied()
            .ok_or(CantorError::HorizonExceeded {
                needed: n,
                have: self.branching.len(),
            })
    }

    /// Deepest level buildable from the materialized branching.
    pub fn max_depth(&self) -> u32 {
        self.branching.len() as u32
    }

    /// `r_{m,n}` with absent entries meaning zero.
    pub fn budget(&self, m: u32, n: u32) -> CertifiedReal {
        self.budgets
            .get(&(m, n))
            .cloned()
            .unwrap_or_else(|| CertifiedReal::exact(Rat::zero()))
    }

    pub fn budget_entries(&self) -> impl Iterator<Item = (&(u32, u32), &CertifiedReal)> {
        self.budgets.iter()
    }

    /// Budgets charged at the transition from level n to n+1, i.e. all
    /// `r_{m,n}` for `m <= n`.
    pub fn budgets_at(&self, n: u32) -> impl Iterator<Item = (u32, &CertifiedReal)> {
        self.budgets
            .range((0, n)..=(n, n))
            .filter(move |((_, nn), _)| *nn == n)
            .map(|((m, _), v)| (*m, v))
    }

    /// Exact interval length at level n: `|I| * prod_{i<n} R_i^{-1}`.
    pub fn level_length(&self, n: u32) -> Result<Rat, CantorError> {
        let mut len = self.root.length();
        for i in 0..n {
            len /= Rat::from_integer(self.branch(i)?.into());
        }
        Ok(len)
    }
}

#[derive(Serialize, Deserialize)]
struct BudgetEntry {
    m: u32,
    n: u32,
    #[serde(with = "rat_serde")]
    value: Rat,
}

#[derive(Serialize, Deserialize)]
struct ScheduleRepr {
    root: ClosedInterval,
    branching: Vec<u64>,
    budgets: Vec<BudgetEntry>,
}

impl Serialize for CantorSchedule {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut budgets = Vec::with_capacity(self.budgets.len());
        for ((m, n), v) in &self.budgets {
            let value = v.as_exact().cloned().ok_or_else(|| {
                S::Error::custom(format!(
                    "budget r_({m},{n}) is enclosure-valued and cannot be written to a schedule file"
                ))
            })?;
            budgets.push(BudgetEntry {
                m: *m,
                n: *n,
                value,
            });
        }
        ScheduleRepr {
            root: self.root.clone(),
            branching: self.branching.clone(),
            budgets,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CantorSchedule {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = ScheduleRepr::deserialize(d)?;
        let mut budgets = BTreeMap::new();
        for e in repr.budgets {
            budgets.insert((e.m, e.n), CertifiedReal::exact(e.value));
        }
        CantorSchedule::new(repr.root, repr.branching, budgets)
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// The classic middle-third schedule on [0, 1] to the given depth.
#[cfg(test)]
pub(crate) fn middle_third_schedule(depth: u32) -> CantorSchedule {
    let root = ClosedInterval::new(Rat::zero(), Rat::from_integer(1.into()));
    let branching = vec![3u64; depth as usize];
    let mut budgets = BTreeMap::new();
    for n in 0..depth {
        budgets.insert((n, n), CertifiedReal::exact(Rat::from_integer(1.into())));
    }
    CantorSchedule::new(root, branching, budgets).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigor::parse_rat;

    #[test]
    fn validation_rejects_bad_inputs() {
        let root = ClosedInterval::new(Rat::zero(), Rat::from_integer(1.into()));
        assert!(CantorSchedule::new(root.clone(), vec![3, 1], BTreeMap::new()).is_err());
        let mut bad = BTreeMap::new();
        bad.insert(
            (2u32, 1u32),
            CertifiedReal::exact(Rat::from_integer(1.into())),
        );
        assert!(CantorSchedule::new(root.clone(), vec![3, 3], bad).is_err());
        let mut neg = BTreeMap::new();
        neg.insert((0u32, 0u32), CertifiedReal::exact(parse_rat("-1").unwrap()));
        assert!(CantorSchedule::new(root.clone(), vec![3], neg).is_err());
        let degenerate = ClosedInterval::new(Rat::zero(), Rat::zero());
        assert!(CantorSchedule::new(degenerate, vec![3], BTreeMap::new()).is_err());
    }

    #[test]
    fn level_lengths_are_exact_products() {
        let s = middle_third_schedule(4);
        assert_eq!(s.level_length(0).unwrap(), parse_rat("1").unwrap());
        assert_eq!(s.level_length(3).unwrap(), parse_rat("1/27").unwrap());
    }

    #[test]
    fn schedule_file_round_trip() {
        let s = middle_third_schedule(3);
        let json = serde_json::to_string(&s).unwrap();
        let back: CantorSchedule = serde_json::from_str(&json).unwrap();
        assert_eq!(back.root(), s.root());
        assert_eq!(back.branching(), s.branching());
        assert_eq!(
            back.budget(1, 1).as_exact().unwrap(),
            s.budget(1, 1).as_exact().unwrap()
        );
        assert!(back.budget(0, 2).as_exact().unwrap().is_zero());
    }

    #[test]
    fn dynamic_budgets_refuse_serialization() {
        let root = ClosedInterval::new(Rat::zero(), Rat::from_integer(1.into()));
        let mut budgets = BTreeMap::new();
        budgets.insert(
            (0u32, 0u32),
            CertifiedReal::dynamic("ln 2", |eps| {
                crate::rigor::log_enclosure(&parse_rat("2").unwrap(), eps)
            }),
        );
        let s = CantorSchedule::new(root, vec![4], budgets).unwrap();
        assert!(serde_json::to_string(&s).is_err());
    }
}
