//! Certificates for non-emptiness and the dimension lower bound hypothesis,
//! computed in exact arithmetic over a `CantorSchedule`.
//!
//! Non-emptiness rests on the positivity of the recursion
//! `t_0 = R_0 - r_{0,0}`,
//! `t_n = R_n - r_{n,n} - sum_k r_{n-k,n} / prod_i t_{n-i}`;
//! a passing certificate implies `#J_n >= prod t_i` for every rule that
//! respects the budgets. The dimension certificate checks `R_n >= 4` together
//! with `sum_k ( r_{n-k,n} prod_i 4/R_{n-i} ) <= R_n / 4` per level, which
//! yields `dim >= liminf (1 - log_{R_n} 2)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cantor::{CantorError, CantorSchedule};
use crate::rigor::{rat_pow2, Enclosure, Precision, Rat, RigorError};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("t-recursion sign undecidable at index {index} at the precision cap")]
    DegenerateRecursion { index: usize },
    #[error("dimension-condition comparison undecidable at level {level} at the precision cap")]
    UndecidableCondition { level: u32 },
    #[error(transparent)]
    Cantor(#[from] CantorError),
    #[error(transparent)]
    Rigor(#[from] RigorError),
}

/// The t-recursion outcome: values are enclosures that collapse to exact
/// rationals whenever every budget is rational.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TSequence {
    pub values: Vec<Enclosure>,
    /// Index of the first `t_k <= 0`; computation stops there.
    pub first_nonpositive: Option<usize>,
}

/// Evaluates `t_0 ..= t_depth`, stopping at the first nonpositive term.
pub fn t_sequence(
    schedule: &CantorSchedule,
    depth: u32,
    precision: &Precision,
) -> Result<TSequence, CertifyError> {
    let mut eps = rat_pow2(-32);
    let min_width = precision.min_width();
    'retry: loop {
        let mut values: Vec<Enclosure> = Vec::with_capacity(depth as usize + 1);
        for n in 0..=depth {
            let rn = Rat::from_integer(schedule.branch(n)?.into());
            let mut t = Enclosure::exact(rn);
            // running product of t_{n-1} * ... * t_{n-k}
            let mut prod = Enclosure::exact(Rat::one());
            for k in 0..=n {
                let budget = schedule.budget(n - k, n);
                if k > 0 {
                    prod = prod.mul(&values[(n - k) as usize]);
                }
                if let Some(exact) = budget.as_exact() {
                    if exact.is_zero() {
                        continue;
                    }
                }
                let r_enc = budget.enclose(&eps)?;
                let term = if k == 0 {
                    r_enc
                } else {
                    r_enc.div(&prod).expect("positive t-product")
                };
                t = t.sub(&term);
            }
            if t.lo > Rat::zero() {
                values.push(t);
                continue;
            }
            if t.hi <= Rat::zero() || t.is_exact() {
                values.push(t);
                return Ok(TSequence {
                    values,
                    first_nonpositive: Some(n as usize),
                });
            }
            // sign straddles zero with refinable budgets: tighten and retry
            eps /= Rat::from_integer(64.into());
            if eps < min_width {
                return Err(CertifyError::DegenerateRecursion { index: n as usize });
            }
            continue 'retry;
        }
        return Ok(TSequence {
            values,
            first_nonpositive: None,
        });
    }
}

/// Non-emptiness certificate: pass iff every `t_n > 0` up to the depth.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NonEmptinessCertificate {
    pub t_values: Vec<Enclosure>,
    pub verdict: bool,
    pub first_failure: Option<usize>,
    /// `prod_{i<n} t_i` for n = 0 ..= depth: lower bounds on `#J_n`.
    pub survivor_lower_bounds: Vec<Enclosure>,
}

pub fn certify_nonempty(
    schedule: &CantorSchedule,
    depth: u32,
    precision: &Precision,
) -> Result<NonEmptinessCertificate, CertifyError> {
    let ts = t_sequence(schedule, depth, precision)?;
    let mut bounds = vec![Enclosure::exact(Rat::one())];
    for t in &ts.values {
        if t.lo <= Rat::zero() {
            break;
        }
        let prev = bounds.last().unwrap();
        bounds.push(prev.mul(t));
    }
    Ok(NonEmptinessCertificate {
        verdict: ts.first_nonpositive.is_none(),
        first_failure: ts.first_nonpositive,
        survivor_lower_bounds: bounds,
        t_values: ts.values,
    })
}

/// One row of the dimension-condition table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionRow {
    pub level: u32,
    pub lhs: Enclosure,
    pub rhs: Enclosure,
    pub branch_at_least_four: bool,
    pub pass: bool,
}

/// Dimension certificate: the summed-removal condition plus `R_n >= 4`,
/// with the dimension bound over the checked horizon.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DimensionCertificate {
    pub conditions: Vec<ConditionRow>,
    pub verdict: bool,
    pub first_failure: Option<u32>,
    pub bound: Option<DimensionBound>,
}

/// Finite-horizon report of `1 - log_{R_n} 2`.
///
/// `empirical_min` is the minimum over the checked horizon; it is labeled
/// empirical because the liminf lives beyond any horizon. When the branching
/// is recognized nondecreasing the tail value at the horizon is a true lower
/// bound for the liminf (and the min is, too).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DimensionBound {
    pub empirical_min: Enclosure,
    pub branching_nondecreasing: bool,
    pub tail_bound: Option<Enclosure>,
}

/// `1 - log_{R} 2` as an enclosure; exact when R is a power of two.
fn dimension_value(r: u64, eps: &Rat) -> Result<Enclosure, RigorError> {
    if r.is_power_of_two() {
        let j = r.trailing_zeros() as i64;
        return Ok(Enclosure::exact(
            Rat::one() - Rat::new(BigInt::one(), BigInt::from(j)),
        ));
    }
    let ln2 = crate::rigor::ln2_enclosure(eps)?;
    let lnr = crate::rigor::log_enclosure(&Rat::from_integer(r.into()), eps)?;
    let ratio = ln2.div(&lnr).expect("ln R > 0 for R >= 2");
    Ok(Enclosure::exact(Rat::one()).sub(&ratio))
}

/// The dimension bound over a horizon; precondition: a passing dimension
/// certificate over the same horizon.
pub fn dimension_lower_bound(
    schedule: &CantorSchedule,
    horizon: u32,
    _precision: &Precision,
) -> Result<DimensionBound, CertifyError> {
    let eps = rat_pow2(-64);
    let mut min: Option<Enclosure> = None;
    let mut nondecreasing = true;
    let mut last: Option<u64> = None;
    let mut tail = None;
    for n in 0..=horizon {
        let r = schedule.branch(n)?;
        if let Some(prev) = last {
            if r < prev {
                nondecreasing = false;
            }
        }
        last = Some(r);
        let v = dimension_value(r, &eps)?;
        min = Some(match min {
            None => v.clone(),
            Some(m) => Enclosure::new(m.lo.min(v.lo.clone()), m.hi.min(v.hi.clone())),
        });
        if n == horizon {
            tail = Some(v);
        }
    }
    Ok(DimensionBound {
        empirical_min: min.expect("horizon >= 0"),
        branching_nondecreasing: nondecreasing,
        tail_bound: if nondecreasing { tail } else { None },
    })
}

/// Checks the dimension condition (and `R_n >= 4`) for every level up to
/// the depth.
pub fn check_dimension_condition(
    schedule: &CantorSchedule,
    depth: u32,
    precision: &Precision,
) -> Result<DimensionCertificate, CertifyError> {
    let mut conditions = Vec::with_capacity(depth as usize + 1);
    let mut verdict = true;
    let mut first_failure = None;
    let min_width = precision.min_width();
    for n in 0..=depth {
        let rn = schedule.branch(n)?;
        let rhs = Rat::from_integer(rn.into()) / Rat::from_integer(4.into());
        let branch_ok = rn >= 4;
        let mut eps = rat_pow2(-32);
        let (lhs, le) = loop {
            let mut lhs = Enclosure::exact(Rat::zero());
            let mut weight = Rat::one();
            for k in 0..=n {
                if k > 0 {
                    weight *= Rat::from_integer(4.into())
                        / Rat::from_integer(schedule.branch(n - k)?.into());
                }
                let budget = schedule.budget(n - k, n);
                if let Some(exact) = budget.as_exact() {
                    if exact.is_zero() {
                        continue;
                    }
                }
                lhs = lhs.add(&budget.enclose(&eps)?.scale(&weight));
            }
            match lhs.decide_le(&rhs) {
                Some(ans) => break (lhs, ans),
                None if lhs.is_exact() => break (lhs.clone(), lhs.lo <= rhs),
                None => {
                    eps /= Rat::from_integer(64.into());
                    if eps < min_width {
                        return Err(CertifyError::UndecidableCondition { level: n });
                    }
                }
            }
        };
        let pass = branch_ok && le;
        if !pass && first_failure.is_none() {
            first_failure = Some(n);
            verdict = false;
        }
        conditions.push(ConditionRow {
            level: n,
            lhs,
            rhs: Enclosure::exact(rhs),
            branch_at_least_four: branch_ok,
            pass,
        });
    }
    let bound = if verdict {
        Some(dimension_lower_bound(schedule, depth, precision)?)
    } else {
        None
    };
    Ok(DimensionCertificate {
        conditions,
        verdict,
        first_failure,
        bound,
    })
}
