//! Exact rational arithmetic and rigorous two-sided enclosures.
//!
//! Every geometric comparison made by the engine goes through this module:
//! it is either exact (rational vs rational) or provably one-sided (rational
//! vs a certified enclosure of an irrational quantity). Internals use adaptive
//! dyadic working precision; the public surface speaks exact rationals only.

mod dyadic;
mod enclosure;
mod interval;
mod logs;
mod precision;
mod rat;
mod value;

pub use enclosure::Enclosure;
pub use interval::ClosedInterval;
pub use logs::{
    e_enclosure, e_squared_enclosure, exp_enclosure, floor_of_enclosure, ln2_enclosure,
    log_enclosure, log_star_enclosure, log_star_of_enclosure, pow_enclosure, sqrt_enclosure,
};
pub use precision::{Precision, PRECISION_CAP_ENV};
pub use rat::{
    big_serde, parse_rat, rat_ceil, rat_floor, rat_from_int, rat_pow2, rat_serde, Rat, RatRepr,
};
pub use value::CertifiedReal;

use thiserror::Error;

/// Errors from the rigorous-arithmetic layer.
#[derive(Debug, Error)]
pub enum RigorError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("floor undecidable at precision cap: enclosure [{}, {}] straddles an integer", .0.lo, .0.hi)]
    UndecidableFloor(Box<Enclosure>),
    #[error("comparison undecidable at precision cap ({context})")]
    UndecidableComparison { context: String },
    #[error("internal precision guard exceeded while computing {0}")]
    PrecisionGuard(String),
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}
