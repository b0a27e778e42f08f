//! Candidate enumeration over the height strata, and the exclusion intervals
//! around each candidate.
//!
//! Level n sieves the rationals r/q with `R^(n-1) F(n-1) <= H(q) < R^n F(n)`.
//! Writing `q = D_k qbar` (with `d_{k+1}` not dividing `qbar`) the height is
//! `D_k qbar^2`, so the enumeration walks the finitely many k with
//! `D_k < R^n F(n)`, the qbar range per k, and the integers r whose outer
//! exclusion interval meets the window. Outer rounding makes the enumeration
//! complete: a candidate not yielded cannot touch the window.
//!
//! The exclusion radius is `c / (f(q) H(q))`. Outer radii divide by a
//! certified LOWER bound on f taken from a monotone step table (f is
//! nondecreasing, so `f(q) >= f(2^j)` for `q >= 2^j`), inner radii divide by
//! a per-candidate upper bound. For q with f(q) = 1 exactly the two agree.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rigor::{
    big_serde, e_enclosure, rat_ceil, rat_floor, rat_pow2, ClosedInterval, Enclosure, Rat,
};

use super::params::Instance;
use super::variant::Variant;
use super::LittlewoodError;

/// A rational r/q with its divisibility index k, exact height and height
/// stratum l (`e^l H_min <= H < e^(l+1) H_min`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalCandidate {
    #[serde(with = "big_serde")]
    pub r: BigInt,
    #[serde(with = "big_serde")]
    pub q: BigInt,
    pub k: u32,
    #[serde(with = "big_serde")]
    pub height: BigInt,
    pub stratum: u32,
}

impl RationalCandidate {
    pub fn center(&self) -> Rat {
        Rat::new(self.r.clone(), self.q.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaRounding {
    Outer,
    Inner,
}

/// Monotone step table of certified lower bounds `f(2^j)`.
pub(crate) struct FStep {
    variant: Variant,
    lows: Mutex<Vec<Rat>>,
}

impl FStep {
    pub fn new(variant: Variant) -> Self {
        FStep {
            variant,
            lows: Mutex::new(Vec::new()),
        }
    }

    /// A certified lower bound on f(q) (q >= 1).
    pub fn lower(&self, q: &BigInt) -> Result<Rat, LittlewoodError> {
        let j = (q.magnitude().bits() - 1) as usize;
        let mut lows = self.lows.lock().unwrap();
        while lows.len() <= j {
            let point = BigInt::one() << lows.len();
            let enc = self.variant.f_value(&point, &rat_pow2(-5))?;
            lows.push(enc.lo);
        }
        Ok(lows[j].clone())
    }
}

/// Lazily refined enclosures of the stratum boundaries `e^l * hmin`.
struct StrataBounds {
    hmin: BigInt,
    bounds: Mutex<(u32, Vec<Enclosure>)>, // (e-precision bits, boundaries)
}

impl StrataBounds {
    fn new(hmin: BigInt) -> Self {
        StrataBounds {
            hmin,
            bounds: Mutex::new((64, Vec::new())),
        }
    }

    fn rebuild(prec: u32, hmin: &BigInt, up_to: usize) -> Result<Vec<Enclosure>, LittlewoodError> {
        let e1 = e_enclosure(&rat_pow2(-(prec as i64)))?;
        let base = Enclosure::exact(Rat::from_integer(hmin.clone()));
        let mut out = vec![base.clone()];
        let mut power = Enclosure::exact(Rat::one());
        for _ in 0..up_to {
            power = power.mul(&e1);
            out.push(power.scale(&Rat::from_integer(hmin.clone())));
        }
        Ok(out)
    }

    /// The stratum l with `e^l hmin <= h < e^(l+1) hmin`, for integer
    /// `h >= hmin`. Boundaries with l >= 1 are irrational, so comparisons
    /// against an integer always decide after refinement.
    fn stratum_of(&self, h: &BigInt) -> Result<u32, LittlewoodError> {
        debug_assert!(h >= &self.hmin);
        let mut l = 0u32;
        loop {
            let decided = {
                let mut guard = self.bounds.lock().unwrap();
                let (prec, bounds) = &mut *guard;
                while bounds.len() <= l as usize + 1 {
                    let next = Self::rebuild(*prec, &self.hmin, bounds.len())?;
                    *bounds = next;
                }
                let upper = &bounds[l as usize + 1];
                let hr = Rat::from_integer(h.clone());
                if hr < upper.lo {
                    Some(true) // h below the next boundary: stratum found
                } else if hr > upper.hi {
                    Some(false) // move up a stratum
                } else {
                    *prec *= 2;
                    if *prec > 1 << 20 {
                        return Err(LittlewoodError::Rigor(
                            crate::rigor::RigorError::UndecidableComparison {
                                context: format!("height {h} vs stratum boundary"),
                            },
                        ));
                    }
                    let len = bounds.len();
                    *bounds = Self::rebuild(*prec, &self.hmin, len - 1)?;
                    None
                }
            };
            match decided {
                Some(true) => return Ok(l),
                Some(false) => l += 1,
                None => {}
            }
        }
    }
}

fn ceil_sqrt(x: &BigInt) -> BigInt {
    if x.is_zero() || x.is_negative() {
        return BigInt::zero();
    }
    let r = x.sqrt();
    if &(&r * &r) == x {
        r
    } else {
        r + 1
    }
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    a.div_ceil(b)
}

/// Outer exclusion radius: `c / (f_lo(q) * H)` with the step-table bound.
pub(crate) fn outer_radius(
    inst: &Instance,
    q: &BigInt,
    height: &BigInt,
) -> Result<Rat, LittlewoodError> {
    let flo = inst.fstep().lower(q)?;
    Ok(&inst.params().c / (flo * Rat::from_integer(height.clone())))
}

/// Inner exclusion radius: `c / (f_hi(q) * H)` with a per-candidate
/// enclosure.
pub(crate) fn inner_radius(
    inst: &Instance,
    q: &BigInt,
    height: &BigInt,
) -> Result<Rat, LittlewoodError> {
    let f = inst.params().variant.f_value(q, &rat_pow2(-16))?;
    Ok(&inst.params().c / (f.hi * Rat::from_integer(height.clone())))
}

/// The exclusion interval around a candidate, with the requested rounding.
pub fn delta_interval(
    cand: &RationalCandidate,
    inst: &Instance,
    rounding: DeltaRounding,
) -> Result<ClosedInterval, LittlewoodError> {
    let rho = match rounding {
        DeltaRounding::Outer => outer_radius(inst, &cand.q, &cand.height)?,
        DeltaRounding::Inner => inner_radius(inst, &cand.q, &cand.height)?,
    };
    let center = cand.center();
    Ok(ClosedInterval::new(&center - &rho, center + rho))
}

/// Enumerates every candidate with height in `[hmin, hmax)` whose OUTER
/// exclusion interval meets the window, sorted by (q, r).
pub fn enumerate_range(
    inst: &Instance,
    hmin: &BigInt,
    hmax: &BigInt,
    window: &ClosedInterval,
) -> Result<Vec<RationalCandidate>, LittlewoodError> {
    if hmax <= hmin || hmax <= &BigInt::one() {
        return Ok(Vec::new());
    }
    let d = &inst.params().d;
    let products = d.products_below(hmax);
    let bounds = StrataBounds::new(hmin.clone().max(BigInt::one()));

    // block descriptors (k, qbar_start, len) for deterministic parallelism
    const BLOCK: u64 = 8192;
    let mut blocks: Vec<(u32, BigInt, u64)> = Vec::new();
    for (k, dk) in products.iter().enumerate() {
        let lo = ceil_sqrt(&ceil_div(hmin, dk)).max(BigInt::one());
        let hi = ((hmax - BigInt::one()) / dk).sqrt();
        if hi < lo {
            continue;
        }
        let mut start = lo.clone();
        while start <= hi {
            use num_traits::ToPrimitive;
            let remaining = (&hi - &start + BigInt::one())
                .min(BigInt::from(BLOCK))
                .to_u64()
                .expect("block length fits u64");
            blocks.push((k as u32, start.clone(), remaining));
            start += BigInt::from(remaining);
        }
    }

    let results: Result<Vec<Vec<RationalCandidate>>, LittlewoodError> = blocks
        .par_iter()
        .map(|(k, start, len)| {
            let dk = &products[*k as usize];
            // d_{k+1} never divides qbar when it exceeds the range
            let d_next = {
                let max_qbar = start + BigInt::from(*len);
                let bits = max_qbar.magnitude().bits();
                let term = d.term_bits(*k + 1);
                (term <= bits + 2).then(|| d.term(*k + 1))
            };
            let mut out = Vec::new();
            let mut qbar = start.clone();
            for _ in 0..*len {
                if let Some(dn) = &d_next {
                    if (&qbar % dn).is_zero() {
                        qbar += 1;
                        continue;
                    }
                }
                let q = dk * &qbar;
                let height = dk * &qbar * &qbar;
                let rho = outer_radius(inst, &q, &height)?;
                let qr = Rat::from_integer(q.clone());
                let r_lo = rat_ceil(&(&qr * &window.left - &qr * &rho));
                let r_hi = rat_floor(&(&qr * &window.right + &qr * &rho));
                if r_lo <= r_hi {
                    let stratum = bounds.stratum_of(&height)?;
                    let mut r = r_lo;
                    while r <= r_hi {
                        out.push(RationalCandidate {
                            r: r.clone(),
                            q: q.clone(),
                            k: *k,
                            height: height.clone(),
                            stratum,
                        });
                        r += 1;
                    }
                }
                qbar += 1;
            }
            Ok(out)
        })
        .collect();

    let mut all: Vec<RationalCandidate> = results?.into_iter().flatten().collect();
    all.sort_by(|a, b| a.q.cmp(&b.q).then(a.r.cmp(&b.r)));
    Ok(all)
}

/// Candidates of the level-n stratum `C(n)` meeting the window.
pub fn enumerate_candidates(
    inst: &Instance,
    n: u32,
    window: &ClosedInterval,
) -> Result<Vec<RationalCandidate>, LittlewoodError> {
    if n == 0 {
        // heights are at least 1 and the level-0 stratum lies below 1
        return Ok(Vec::new());
    }
    let hmin = inst.height_min(n)?;
    let hmax = inst.height_max(n)?;
    enumerate_range(inst, &hmin, &hmax, window)
}
