//! Generalised Cantor set engine.
//!
//! Builds `(I, R, r)` Cantor set levels in exact rational interval arithmetic,
//! certifies non-emptiness and Hausdorff-dimension lower bounds, extracts
//! local Cantor subsets carrying a mass-distribution measure, intersects
//! Cantor schedules, and instantiates the mixed-Littlewood sieve to produce
//! and independently verify certified multiplicatively badly approximable
//! numbers.

pub mod cantor;
pub mod certify;
pub mod cli;
pub mod littlewood;
pub mod local;
pub mod rigor;

pub use rigor::{ClosedInterval, Enclosure, Precision, Rat};
