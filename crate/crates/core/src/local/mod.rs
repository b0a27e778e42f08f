//! Local Cantor subsets: the fixed-point extraction of a local family from a
//! built `(I, R, r)` construction, the mass-distribution measure on it, the
//! `mu(B) <= a |B|^s` checker and the ubiquity (distribution) checker.

mod distribution;
mod extract;
mod mdp;
mod measure;

pub use distribution::{check_distribution, DistributionReport};
pub use extract::{
    extract_local, extract_local_checked, verify_conditions, AuxCell, AuxMember, CellReport,
    ExtractOptions, ExtractionReport, LocalExtraction, StabilizationEntry,
};
pub use mdp::{verify_mdp_bound, MdpFamily, MdpReport};
pub use measure::{build_measure, verify_additivity, MeasureTable};

use crate::cantor::{CantorError, CantorSchedule};
use crate::rigor::{CertifiedReal, Rat, RigorError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LocalError {
    #[error("extraction emptied: L({m},{n}) has no members")]
    EmptyExtraction { m: u32, n: u32 },
    #[error("empty level {level}")]
    EmptyLevel { level: u32 },
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("mismatched inputs: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Cantor(#[from] CantorError),
    #[error(transparent)]
    Rigor(#[from] RigorError),
}

/// A base schedule together with the extraction thresholds `s_n = R_n / 2`.
#[derive(Clone, Debug)]
pub struct LocalSchedule {
    base: CantorSchedule,
    s_values: Vec<Rat>,
}

impl LocalSchedule {
    pub fn from_base(base: &CantorSchedule) -> Self {
        let s_values = base
            .branching()
            .iter()
            .map(|&r| Rat::new(r.into(), 2.into()))
            .collect();
        LocalSchedule {
            base: base.clone(),
            s_values,
        }
    }

    pub fn base(&self) -> &CantorSchedule {
        &self.base
    }

    pub fn s(&self, n: u32) -> &Rat {
        &self.s_values[n as usize]
    }

    /// `R_n - s_n`, the guaranteed child count of the extracted family.
    pub fn keep_count(&self, n: u32) -> Rat {
        Rat::from_integer(self.base.branching()[n as usize].into()) - self.s(n)
    }

    /// The schedule of the extracted local family: diagonal budgets `s_n`.
    pub fn to_diagonal_schedule(&self) -> Result<CantorSchedule, CantorError> {
        let budgets = self
            .s_values
            .iter()
            .enumerate()
            .map(|(n, s)| ((n as u32, n as u32), CertifiedReal::exact(s.clone())))
            .collect();
        CantorSchedule::new(
            self.base.root().clone(),
            self.base.branching().to_vec(),
            budgets,
        )
    }

    /// The `(I, R, R-s)` frame used by the distribution check's T-families.
    pub fn complementary_schedule(&self) -> Result<CantorSchedule, CantorError> {
        let budgets = self
            .s_values
            .iter()
            .enumerate()
            .map(|(n, s)| {
                let r = Rat::from_integer(self.base.branching()[n].into());
                ((n as u32, n as u32), CertifiedReal::exact(r - s))
            })
            .collect();
        CantorSchedule::new(
            self.base.root().clone(),
            self.base.branching().to_vec(),
            budgets,
        )
    }
}
