//! The mass-distribution measure on a nested local family: unit mass at the
//! root, split uniformly among each interval's surviving children.

use serde::{Deserialize, Serialize};

use crate::cantor::LevelCollection;
use crate::rigor::{rat_serde, Rat};

use super::LocalError;

/// Per-level weights aligned with the level collections they were built from.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureTable {
    pub weights: Vec<Vec<WeightEntry>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightEntry {
    #[serde(with = "rat_serde")]
    pub value: Rat,
}

impl MeasureTable {
    pub fn level(&self, n: usize) -> Vec<&Rat> {
        self.weights[n].iter().map(|w| &w.value).collect()
    }
}

/// Builds the recursive uniform weights over a nested chain of collections
/// with parent links (an extracted local family).
pub fn build_measure(levels: &[LevelCollection]) -> Result<MeasureTable, LocalError> {
    let root = levels.first().ok_or(LocalError::EmptyLevel { level: 0 })?;
    if root.is_empty() {
        return Err(LocalError::EmptyLevel { level: 0 });
    }
    let mut weights: Vec<Vec<Rat>> = Vec::with_capacity(levels.len());
    let root_weight = Rat::new(1.into(), (root.len() as i64).into());
    weights.push(vec![root_weight; root.len()]);

    for (n, level) in levels.iter().enumerate().skip(1) {
        if level.is_empty() {
            return Err(LocalError::EmptyLevel { level: n as u32 });
        }
        if level.parents.len() != level.len() {
            return Err(LocalError::Mismatch(format!(
                "level {n} lacks parent links; measures need a nested chain"
            )));
        }
        let mut child_counts = vec![0u64; levels[n - 1].len()];
        for &p in &level.parents {
            child_counts[p] += 1;
        }
        if let Some(orphan) = child_counts.iter().position(|&c| c == 0) {
            return Err(LocalError::Mismatch(format!(
                "interval #{orphan} at level {} has no children; the uniform                  measure needs a family where every member splits (extract a                  local subset first)",
                n - 1
            )));
        }
        let level_weights: Vec<Rat> = level
            .parents
            .iter()
            .map(|&p| &weights[n - 1][p] / Rat::from_integer(child_counts[p].into()))
            .collect();
        weights.push(level_weights);
    }

    Ok(MeasureTable {
        weights: weights
            .into_iter()
            .map(|lv| lv.into_iter().map(|value| WeightEntry { value }).collect())
            .collect(),
    })
}

/// Checks that children weights sum exactly to their parent's weight at
/// every node.
pub fn verify_additivity(
    levels: &[LevelCollection],
    table: &MeasureTable,
) -> Result<(), LocalError> {
    use num_traits::Zero;
    for n in 1..levels.len() {
        let mut sums = vec![Rat::zero(); levels[n - 1].len()];
        for (i, &p) in levels[n].parents.iter().enumerate() {
            sums[p] += &table.weights[n][i].value;
        }
        for (p, sum) in sums.iter().enumerate() {
            if sum != &table.weights[n - 1][p].value {
                return Err(LocalError::InvariantViolation(format!(
                    "measure not additive at level {n}, parent {p}"
                )));
            }
        }
    }
    Ok(())
}
