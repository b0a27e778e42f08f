//! Independent brute-force verification of witness certificates.
//!
//! For every q up to the cap whose height lies below the certified bound,
//! the verifier computes the exact minimum of `||q alpha||` over the final
//! chain interval (distance of the scaled interval to the nearest integer)
//! and decides `f(q) * q * |q|_D * ||q alpha|| > c` through enclosures. It
//! shares only the arithmetic primitives with the builder, none of the
//! sieve machinery.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rigor::{big_serde, rat_floor, rat_pow2, rat_serde, Rat};

use super::build::WitnessCertificate;
use super::enumerate::{delta_interval, enumerate_range, DeltaRounding};
use super::params::Instance;
use super::LittlewoodError;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Violation {
    #[serde(with = "big_serde")]
    pub q: BigInt,
    #[serde(with = "big_serde")]
    pub r: BigInt,
    /// Exact minimum of ||q alpha|| over the chain interval.
    #[serde(with = "rat_serde")]
    pub distance: Rat,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub q_max: u64,
    #[serde(with = "big_serde")]
    pub height_bound: BigInt,
    pub checked: u64,
    pub skipped_above_bound: u64,
    pub violations: Vec<Violation>,
    /// Certified lower bound on min over checked q of lhs/c (> 1 means the
    /// certificate holds with that margin).
    #[serde(with = "rat_serde")]
    pub min_margin_lower: Rat,
}

/// Verifies a certificate against all q <= q_max with H(q) below the bound.
pub fn verify_witness(
    cert: &WitnessCertificate,
    q_max: u64,
) -> Result<VerifyReport, LittlewoodError> {
    let inst = Instance::new(cert.params.clone())?;
    let interval = cert
        .chain
        .last()
        .ok_or_else(|| LittlewoodError::InvalidParams("certificate chain is empty".into()))?;
    let c = &cert.params.c;

    let chunk = 1u64 << 14;
    let chunks: Vec<(u64, u64)> = (1..=q_max)
        .step_by(chunk as usize)
        .map(|start| (start, (start + chunk - 1).min(q_max)))
        .collect();

    struct ChunkOut {
        checked: u64,
        skipped: u64,
        violations: Vec<Violation>,
        margin: Option<Rat>,
    }

    let outs: Result<Vec<ChunkOut>, LittlewoodError> = chunks
        .par_iter()
        .map(|&(start, end)| {
            let mut out = ChunkOut {
                checked: 0,
                skipped: 0,
                violations: Vec::new(),
                margin: None,
            };
            for q in start..=end {
                let qb = BigInt::from(q);
                let (_, dk, qbar) = inst.params().d.valuation(&qb);
                let height = &dk * &qbar * &qbar;
                if height >= cert.height_bound {
                    out.skipped += 1;
                    continue;
                }
                out.checked += 1;
                // q * J and its distance to the nearest integer
                let a = Rat::from_integer(qb.clone()) * &interval.left;
                let b = Rat::from_integer(qb.clone()) * &interval.right;
                let floor_a = rat_floor(&a);
                let floor_b = rat_floor(&b);
                let (distance, nearest) = if floor_a < floor_b || b.is_integer() || a.is_integer() {
                    // an integer lies inside [a, b]
                    let m = if a.is_integer() {
                        a.numer().clone()
                    } else {
                        floor_b
                    };
                    (Rat::zero(), m)
                } else {
                    let down = &a - Rat::from_integer(floor_a.clone());
                    let up = Rat::from_integer(&floor_a + BigInt::one()) - &b;
                    if down <= up {
                        (down, floor_a)
                    } else {
                        (up, floor_a + BigInt::one())
                    }
                };
                if distance.is_zero() {
                    out.violations.push(Violation {
                        q: qb,
                        r: nearest,
                        distance,
                    });
                    continue;
                }
                // lhs = f(q) * qbar * distance vs c  (q |q|_D = qbar)
                let base = Rat::from_integer(qbar.clone()) * &distance;
                let f_lo_step = inst.fstep().lower(&qb)?;
                let quick = &f_lo_step * &base;
                let (pass, lhs_lower) = if &quick > c {
                    (true, quick)
                } else {
                    // refine f(q) until the strict comparison is decided
                    let mut eps = rat_pow2(-8);
                    loop {
                        let f = inst.params().variant.f_value(&qb, &eps)?;
                        let lo = &f.lo * &base;
                        if &lo > c {
                            break (true, lo);
                        }
                        if &(&f.hi * &base) <= c {
                            break (false, lo);
                        }
                        if f.is_exact() {
                            break (&lo > c, lo);
                        }
                        eps /= Rat::from_integer(64.into());
                        if eps < inst.precision().min_width() {
                            return Err(LittlewoodError::Rigor(
                                crate::rigor::RigorError::UndecidableComparison {
                                    context: format!("f({q}) margin"),
                                },
                            ));
                        }
                    }
                };
                if !pass {
                    out.violations.push(Violation {
                        q: qb,
                        r: nearest,
                        distance,
                    });
                } else {
                    let margin = lhs_lower / c;
                    out.margin = Some(match out.margin.take() {
                        None => margin,
                        Some(m) => m.min(margin),
                    });
                }
            }
            Ok(out)
        })
        .collect();

    let outs = outs?;
    let mut report = VerifyReport {
        q_max,
        height_bound: cert.height_bound.clone(),
        checked: 0,
        skipped_above_bound: 0,
        violations: Vec::new(),
        min_margin_lower: Rat::zero(),
    };
    let mut margin: Option<Rat> = None;
    for o in outs {
        report.checked += o.checked;
        report.skipped_above_bound += o.skipped;
        report.violations.extend(o.violations);
        if let Some(m) = o.margin {
            margin = Some(match margin.take() {
                None => m,
                Some(cur) => cur.min(m),
            });
        }
    }
    report.violations.sort_by(|x, y| x.q.cmp(&y.q));
    report.min_margin_lower = margin.unwrap_or_else(Rat::zero);
    Ok(report)
}

/// The independent sieve-soundness pass: re-enumerates EVERY candidate with
/// height below the certified bound whose outer exclusion interval meets the
/// final chain interval, and checks the final interval against the inner
/// exclusion intervals. Zero intersections re-establishes the defining
/// avoidance condition at the final level.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SieveReport {
    pub candidates_checked: u64,
    pub inner_intersections: u64,
    pub first_violation: Option<Violation>,
}

pub fn check_sieve_soundness(cert: &WitnessCertificate) -> Result<SieveReport, LittlewoodError> {
    let inst = Instance::new(cert.params.clone())?;
    let interval = cert
        .chain
        .last()
        .ok_or_else(|| LittlewoodError::InvalidParams("certificate chain is empty".into()))?;
    let cands = enumerate_range(&inst, &BigInt::one(), &cert.height_bound, interval)?;
    let mut report = SieveReport {
        candidates_checked: cands.len() as u64,
        inner_intersections: 0,
        first_violation: None,
    };
    for c in &cands {
        let inner = delta_interval(c, &inst, DeltaRounding::Inner)?;
        if inner.meets(interval) {
            report.inner_intersections += 1;
            if report.first_violation.is_none() {
                report.first_violation = Some(Violation {
                    q: c.q.clone(),
                    r: c.r.clone(),
                    distance: Rat::zero(),
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::littlewood::build::witness;
    use crate::littlewood::dseq::DSequence;
    use crate::littlewood::params::InstanceParams;
    use crate::littlewood::variant::Variant;
    use crate::rigor::{parse_rat, ClosedInterval};

    fn small_instance() -> Instance {
        Instance::new(InstanceParams::new(
            Variant::Prop1,
            DSequence::constant(2).unwrap(),
            16,
            parse_rat("1/16").unwrap(),
            parse_rat("1/1024").unwrap(),
        ))
        .unwrap()
    }

    #[test]
    fn fresh_witness_verifies_clean() {
        let inst = small_instance();
        let cert = witness(&inst, 3).unwrap();
        let report = verify_witness(&cert, 2000).unwrap();
        assert!(report.violations.is_empty(), "{:?}", report.violations);
        assert!(report.checked > 0);
        assert!(report.skipped_above_bound > 0);
        assert!(report.min_margin_lower > Rat::one());
        let sieve = check_sieve_soundness(&cert).unwrap();
        assert_eq!(sieve.inner_intersections, 0);
    }

    #[test]
    fn corrupted_chain_is_caught() {
        let inst = small_instance();
        let mut cert = witness(&inst, 2).unwrap();
        // shift the final interval onto 1/32: q = 32 has H = 32 ... too big?
        // height bound at depth 2 is R F(1) = 16, so pick q = 4 (H = 4):
        // plant the chain across 1/4
        let w = cert.chain.last().unwrap().length();
        let left = parse_rat("1/4").unwrap() - &w / Rat::from_integer(2.into());
        *cert.chain.last_mut().unwrap() = ClosedInterval::new(left.clone(), left + w);
        let report = verify_witness(&cert, 100).unwrap();
        assert!(!report.violations.is_empty());
        assert!(report.violations.iter().any(|v| v.q == BigInt::from(4)));
        let sieve = check_sieve_soundness(&cert).unwrap();
        assert!(sieve.inner_intersections > 0);
    }

    #[test]
    fn heights_beyond_bound_are_excluded() {
        let inst = small_instance();
        let mut cert = witness(&inst, 2).unwrap();
        // artificially shrink the certified range: nothing remains to check
        cert.height_bound = BigInt::one();
        let report = verify_witness(&cert, 500).unwrap();
        assert_eq!(report.checked, 0);
        assert_eq!(report.skipped_above_bound, 500);
        assert!(report.violations.is_empty());
    }
}
