//! Survivor collections at one construction level.

use serde::{Deserialize, Serialize};

use crate::rigor::{ClosedInterval, Rat};

use super::CantorError;

/// The collection `J_n`: sorted exact intervals with parent links into the
/// previous level's collection. `parents` is empty at level 0 and for
/// standalone collections produced by a bare level intersection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelCollection {
    pub level: u32,
    pub intervals: Vec<ClosedInterval>,
    pub parents: Vec<usize>,
}

impl LevelCollection {
    pub fn root(interval: ClosedInterval) -> Self {
        LevelCollection {
            level: 0,
            intervals: vec![interval],
            parents: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Binary search by exact left endpoint (collections are sorted).
    pub fn find_by_left(&self, left: &Rat) -> Option<usize> {
        self.intervals.binary_search_by(|iv| iv.left.cmp(left)).ok()
    }

    /// Index of the interval containing `iv`, if any. Relies on sortedness
    /// and equal lengths.
    pub fn find_container(&self, iv: &ClosedInterval) -> Option<usize> {
        if self.intervals.is_empty() {
            return None;
        }
        let idx = self
            .intervals
            .partition_point(|c| c.left <= iv.left)
            .checked_sub(1)?;
        self.intervals[idx].meets(iv).then_some(idx)?;
        iv.within(&self.intervals[idx]).then_some(idx)
    }

    /// Checks the structural invariants: sorted, pairwise-disjoint interiors,
    /// exact common length, and nesting inside `parent` when given.
    pub fn validate(
        &self,
        expected_length: &Rat,
        parent: Option<&LevelCollection>,
    ) -> Result<(), CantorError> {
        for (i, iv) in self.intervals.iter().enumerate() {
            if &iv.length() != expected_length {
                return Err(CantorError::LevelMismatch(format!(
                    "interval #{i} at level {} has length {} instead of {expected_length}",
                    self.level,
                    iv.length()
                )));
            }
            if i > 0 && self.intervals[i - 1].right > iv.left {
                return Err(CantorError::LevelMismatch(format!(
                    "intervals #{} and #{i} at level {} overlap or are out of order",
                    i - 1,
                    self.level
                )));
            }
            if let Some(up) = parent {
                let p = *self.parents.get(i).ok_or_else(|| {
                    CantorError::LevelMismatch(format!(
                        "interval #{i} at level {} has no parent link",
                        self.level
                    ))
                })?;
                let parent_iv = up.intervals.get(p).ok_or_else(|| {
                    CantorError::LevelMismatch(format!("parent index {p} out of range"))
                })?;
                if !iv.within(parent_iv) {
                    return Err(CantorError::LevelMismatch(format!(
                        "interval #{i} at level {} escapes its parent",
                        self.level
                    )));
                }
            }
        }
        Ok(())
    }
}
