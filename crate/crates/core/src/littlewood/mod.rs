//! The mixed-Littlewood instantiation: D-adic pseudo-norms, heights,
//! exclusion intervals, candidate enumeration over height strata, witness
//! construction and independent brute-force verification.

mod build;
mod dseq;
mod enumerate;
mod params;
mod variant;
mod verify;

pub use build::{
    build_full, witness, witness_joint, SieveRule, WitnessCertificate, WitnessLedgerEntry,
};
pub use dseq::{DKind, DSequence};
pub use enumerate::{
    delta_interval, enumerate_candidates, enumerate_range, DeltaRounding, RationalCandidate,
};
pub use params::{
    diagnostic_constants, validate_params, DiagnosticConstants, Instance, InstanceParams,
    ParamCertificate, ParamCheck,
};
pub use variant::{FTable, Variant};
pub use verify::{check_sieve_soundness, verify_witness, SieveReport, VerifyReport, Violation};

use crate::cantor::CantorError;
use crate::rigor::RigorError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LittlewoodError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no surviving child at level {level}: {removed} children struck out")]
    NoSurvivor {
        level: u32,
        killers: Vec<String>,
        removed: u64,
    },
    #[error("counting bound violated at level {level}: {removed} removals exceed the budget")]
    BudgetViolation { level: u32, removed: u64 },
    #[error("overflow: {0}")]
    Overflow(String),
    #[error(transparent)]
    Rigor(#[from] RigorError),
    #[error(transparent)]
    Cantor(#[from] CantorError),
}
