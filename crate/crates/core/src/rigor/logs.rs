//! Certified enclosures of logarithmic and exponential quantities.
//!
//! `ln` uses argument reduction to `[1, 2)` followed by the atanh series
//! `ln m = 2 * sum z^(2j+1)/(2j+1)` with `z = (m-1)/(m+1) in [0, 1/3)` and an
//! explicit geometric tail bound; `exp`/`e`/`e^2` use the factorial series
//! with its tail bound. All series run in dyadic interval arithmetic at an
//! adaptive working precision that doubles until the requested width is met.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use super::dyadic::{Dir, DyInterval, Dyadic};
use super::enclosure::Enclosure;
use super::precision::Precision;
use super::rat::{rat_floor, rat_pow2, Rat};
use super::RigorError;

/// Hard guard on the internal working precision; hitting it means something
/// is badly wrong upstream (it corresponds to ~20M decimal digits).
const MAX_PREC_BITS: u32 = 1 << 26;

fn check_eps(eps: &Rat) -> Result<(), RigorError> {
    if eps <= &Rat::zero() {
        Err(RigorError::Domain("eps must be positive".into()))
    } else {
        Ok(())
    }
}

/// Bits needed so a dyadic error of 2^-prec is below eps.
fn bits_for(eps: &Rat) -> u32 {
    let nbits = eps.numer().magnitude().bits() as i64;
    let dbits = eps.denom().magnitude().bits() as i64;
    (dbits - nbits + 2).max(4) as u32
}

/// atanh series core: encloses `2 * atanh(z)` for exact rational `0 <= z < 1/2`.
fn atanh_twice(z: &Rat, prec: u32) -> DyInterval {
    let zin = DyInterval::of_rat(z, prec);
    let z2 = zin.mul_nonneg(&zin, prec);
    let mut sum = DyInterval::point(Dyadic::zero());
    let mut pow = zin.clone();
    let threshold = Dyadic {
        m: BigInt::one(),
        e: -(prec as i64 + 4),
    };
    let mut j: u64 = 0;
    loop {
        let term = pow.div_uint(2 * j + 1, prec);
        sum = sum.add(&term, prec);
        pow = pow.mul_nonneg(&z2, prec);
        j += 1;
        if pow.hi.cmp(&threshold) == std::cmp::Ordering::Less {
            break;
        }
    }
    // tail <= z^(2j+1) / ((2j+1)(1 - z^2)); z2.hi < 1/4 so 1 - z2.hi > 1/2
    let one_minus = Dyadic::one().add(&z2.hi.neg());
    let tail = pow.hi.div(&one_minus, prec, Dir::Up).div(
        &Dyadic::from_bigint(&BigInt::from(2 * j + 1)),
        prec,
        Dir::Up,
    );
    let hi_with_tail = sum.hi.add(&tail).round(prec, Dir::Up);
    DyInterval {
        lo: sum.lo.shl(1),
        hi: hi_with_tail.shl(1),
    }
}

fn ln2_dyadic(prec: u32) -> DyInterval {
    static CACHE: OnceLock<Mutex<BTreeMap<u32, DyInterval>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    {
        let guard = cache.lock().unwrap();
        if let Some(v) = guard.get(&prec) {
            return v.clone();
        }
    }
    let v = atanh_twice(&Rat::new(BigInt::one(), BigInt::from(3)), prec);
    cache.lock().unwrap().insert(prec, v.clone());
    v
}

/// floor(log2(x)) for exact rational x > 0.
fn floor_log2(x: &Rat) -> i64 {
    let k0 = x.numer().magnitude().bits() as i64 - x.denom().magnitude().bits() as i64;
    // x * 2^-k0 lies in [1/2, 2); decide which half exactly
    let ge = if k0 >= 0 {
        *x.numer() >= (x.denom() << k0 as usize)
    } else {
        (x.numer() << (-k0) as usize) >= *x.denom()
    };
    if ge {
        k0
    } else {
        k0 - 1
    }
}

fn ln_dyadic(x: &Rat, prec: u32) -> DyInterval {
    let k = floor_log2(x);
    // m = x / 2^k in [1, 2)
    let m = x * rat_pow2(-k);
    let z = (&m - Rat::one()) / (&m + Rat::one());
    let series = atanh_twice(&z, prec);
    if k == 0 {
        series
    } else {
        series.add(&ln2_dyadic(prec).mul_int(k), prec)
    }
}

/// Enclosure of ln(x) with width at most eps; exact [0,0] for x = 1.
pub fn log_enclosure(x: &Rat, eps: &Rat) -> Result<Enclosure, RigorError> {
    if x <= &Rat::zero() {
        return Err(RigorError::Domain(format!("log of non-positive value {x}")));
    }
    check_eps(eps)?;
    if x == &Rat::one() {
        return Ok(Enclosure::exact(Rat::zero()));
    }
    let mut prec = bits_for(eps) + 16 + floor_log2(x).unsigned_abs().max(1).ilog2();
    loop {
        let (lo, hi) = ln_dyadic(x, prec).to_rats();
        if &hi - &lo <= *eps {
            return Ok(Enclosure::new(lo, hi));
        }
        prec *= 2;
        if prec > MAX_PREC_BITS {
            return Err(RigorError::PrecisionGuard(format!("ln({x})")));
        }
    }
}

/// exp factorial series at an exact non-negative dyadic point `t <= 4`.
fn exp_pos_point(t: &Dyadic, prec: u32) -> DyInterval {
    let tin = DyInterval::point(t.clone());
    let mut sum = DyInterval::point(Dyadic::one());
    let mut term = DyInterval::point(Dyadic::one());
    let threshold = Dyadic {
        m: BigInt::one(),
        e: -(prec as i64 + 4),
    };
    let mut j: u64 = 0;
    loop {
        term = term.mul_nonneg(&tin, prec).div_uint(j + 1, prec);
        sum = sum.add(&term, prec);
        j += 1;
        // once j+1 >= 2t the ratio t/(j+1) is <= 1/2, so tail <= 2*next_term
        if j >= 8 && term.hi.cmp(&threshold) == std::cmp::Ordering::Less {
            break;
        }
    }
    let next = term.mul_nonneg(&tin, prec).div_uint(j + 1, prec);
    let tail = next.hi.shl(1);
    DyInterval {
        lo: sum.lo,
        hi: sum.hi.add(&tail).round(prec, Dir::Up),
    }
}

/// exp at an exact dyadic point of any sign with |t| <= 4.
fn exp_point(t: &Dyadic, prec: u32) -> DyInterval {
    if t.is_negative() {
        let pos = exp_pos_point(&t.neg(), prec);
        // 1/[lo, hi], all positive
        let one = Dyadic::one();
        DyInterval {
            lo: one.div(&pos.hi, prec, Dir::Down),
            hi: one.div(&pos.lo, prec, Dir::Up),
        }
    } else {
        exp_pos_point(t, prec)
    }
}

fn exp_rat_dyadic(x: &Rat, prec: u32) -> Result<DyInterval, RigorError> {
    // reduce: exp(x) = exp(x - k ln2) * 2^k with a roughly-nearest k
    let inv_ln2_approx = Rat::new(BigInt::from(14427), BigInt::from(10000));
    let k_big = rat_floor(&(x * inv_ln2_approx + Rat::new(BigInt::one(), BigInt::from(2))));
    let k = k_big
        .to_i64()
        .filter(|k| k.unsigned_abs() < u32::MAX as u64)
        .ok_or_else(|| RigorError::PrecisionGuard(format!("exp argument {x} out of range")))?;
    let ln2 = ln2_dyadic(prec);
    let xin = DyInterval::of_rat(x, prec);
    let reduced = xin.add(&ln2.mul_int(-k), prec);
    // |reduced| <= ~1.5 by construction of k
    let lo = exp_point(&reduced.lo, prec).lo;
    let hi = exp_point(&reduced.hi, prec).hi;
    Ok(DyInterval { lo, hi }.shl(k))
}

/// Enclosure of exp over an enclosure argument, width at most eps.
pub fn exp_enclosure(x: &Enclosure, eps: &Rat) -> Result<Enclosure, RigorError> {
    check_eps(eps)?;
    let mut prec = bits_for(eps) + 16;
    loop {
        let lo = exp_rat_dyadic(&x.lo, prec)?.to_rats().0;
        let hi = exp_rat_dyadic(&x.hi, prec)?.to_rats().1;
        if &hi - &lo <= *eps {
            return Ok(Enclosure::new(lo, hi));
        }
        prec *= 2;
        if prec > MAX_PREC_BITS {
            return Err(RigorError::PrecisionGuard("exp".into()));
        }
    }
}

fn const_enclosure(t: u64, eps: &Rat) -> Result<Enclosure, RigorError> {
    check_eps(eps)?;
    let mut prec = bits_for(eps) + 8;
    loop {
        let (lo, hi) = exp_pos_point(&Dyadic::from_bigint(&BigInt::from(t)), prec).to_rats();
        if &hi - &lo <= *eps {
            return Ok(Enclosure::new(lo, hi));
        }
        prec *= 2;
        if prec > MAX_PREC_BITS {
            return Err(RigorError::PrecisionGuard("exp series constant".into()));
        }
    }
}

/// Enclosure of e.
pub fn e_enclosure(eps: &Rat) -> Result<Enclosure, RigorError> {
    const_enclosure(1, eps)
}

/// Enclosure of e^2, produced by the same series machinery.
pub fn e_squared_enclosure(eps: &Rat) -> Result<Enclosure, RigorError> {
    const_enclosure(2, eps)
}

/// Enclosure of ln 2.
pub fn ln2_enclosure(eps: &Rat) -> Result<Enclosure, RigorError> {
    check_eps(eps)?;
    let mut prec = bits_for(eps) + 8;
    loop {
        let (lo, hi) = ln2_dyadic(prec).to_rats();
        if &hi - &lo <= *eps {
            return Ok(Enclosure::new(lo, hi));
        }
        prec *= 2;
        if prec > MAX_PREC_BITS {
            return Err(RigorError::PrecisionGuard("ln 2".into()));
        }
    }
}

/// Decides `x < e` / `x > e` for rational x (never equal: e is irrational).
/// Falls back to `None` only at the precision cap.
fn side_of_e(x: &Rat, precision: &Precision) -> Option<bool> {
    let mut prec: u32 = 32;
    loop {
        let (lo, hi) = exp_pos_point(&Dyadic::one(), prec).to_rats();
        if x < &lo {
            return Some(true);
        }
        if x > &hi {
            return Some(false);
        }
        if prec >= precision.cap_bits.max(64) {
            return None;
        }
        prec = (prec * 2).min(precision.cap_bits.max(64));
    }
}

/// The modified logarithm: 1 below e, ln x from e on.
///
/// A comparison against e that cannot be decided at the cap returns the hull
/// of both branch values, which is sound because log* is continuous at e with
/// value 1.
pub fn log_star_enclosure(x: &Rat, eps: &Rat) -> Result<Enclosure, RigorError> {
    if x < &Rat::zero() {
        return Err(RigorError::Domain(format!("log* of negative value {x}")));
    }
    check_eps(eps)?;
    if x.is_zero() {
        return Ok(Enclosure::exact(Rat::one()));
    }
    match side_of_e(x, &Precision::default_cap()) {
        Some(true) => Ok(Enclosure::exact(Rat::one())),
        Some(false) => log_enclosure(x, eps),
        None => {
            let ln = log_enclosure(x, eps)?;
            Ok(ln.hull(&Enclosure::exact(Rat::one())))
        }
    }
}

/// log* applied to an enclosed real argument (e.g. log*(ln q)).
///
/// When the argument straddles e the result hull is `[1, max(1, ln hi)]`,
/// sound since log* is nondecreasing with values >= 1.
pub fn log_star_of_enclosure(v: &Enclosure, eps: &Rat) -> Result<Enclosure, RigorError> {
    check_eps(eps)?;
    let precision = Precision::default_cap();
    let hi_below = side_of_e(&v.hi, &precision);
    if hi_below == Some(true) {
        return Ok(Enclosure::exact(Rat::one()));
    }
    let lo_below = if v.lo <= Rat::zero() {
        Some(true)
    } else {
        side_of_e(&v.lo, &precision)
    };
    let half = eps / Rat::from_integer(2.into());
    let upper = log_enclosure(&v.hi, &half)?.hi.max(Rat::one());
    let lower = match lo_below {
        Some(false) => log_enclosure(&v.lo, &half)?.lo,
        _ => Rat::one(),
    };
    Ok(Enclosure::new(lower, upper))
}

/// Floor of an enclosed value, refining until the enclosure no longer
/// straddles an integer. `refine` receives a target width.
pub fn floor_of_enclosure<F>(
    initial: Enclosure,
    mut refine: F,
    precision: &Precision,
) -> Result<BigInt, RigorError>
where
    F: FnMut(&Rat) -> Result<Enclosure, RigorError>,
{
    let mut enc = initial;
    let mut target = {
        let w = enc.width();
        if w.is_zero() {
            rat_pow2(-4)
        } else {
            w / Rat::from_integer(4.into())
        }
    };
    let min_width = precision.min_width();
    loop {
        let flo = rat_floor(&enc.lo);
        let fhi = rat_floor(&enc.hi);
        if flo == fhi {
            return Ok(flo);
        }
        if target < min_width {
            return Err(RigorError::UndecidableFloor(Box::new(enc)));
        }
        enc = refine(&target)?;
        target /= Rat::from_integer(4.into());
    }
}

/// Enclosure of base^expo for rational base > 0 and rational expo.
///
/// Exact when expo is an integer or when base has an exact expo.denom()-th
/// root; otherwise via exp(expo * ln base).
pub fn pow_enclosure(base: &Rat, expo: &Rat, eps: &Rat) -> Result<Enclosure, RigorError> {
    if base <= &Rat::zero() {
        return Err(RigorError::Domain(format!(
            "power of non-positive base {base}"
        )));
    }
    check_eps(eps)?;
    if let Some(exact) = exact_pow(base, expo) {
        return Ok(Enclosure::exact(exact));
    }
    let mut inner = eps.clone() / Rat::from_integer(4.into());
    loop {
        let ln = log_enclosure(base, &inner)?;
        let arg = ln.scale(expo);
        let result = exp_enclosure(&arg, &inner)?;
        if result.width() <= *eps {
            return Ok(result);
        }
        inner /= Rat::from_integer(4.into());
        if inner < rat_pow2(-(MAX_PREC_BITS as i64)) {
            return Err(RigorError::PrecisionGuard("pow".into()));
        }
    }
}

fn exact_pow(base: &Rat, expo: &Rat) -> Option<Rat> {
    let p = expo.numer();
    let r = expo.denom().to_u32()?;
    let rooted = if r == 1 {
        base.clone()
    } else {
        let rn = base.numer().nth_root(r);
        let rd = base.denom().nth_root(r);
        if &rn.pow(r) == base.numer() && &rd.pow(r) == base.denom() {
            Rat::new(rn, rd)
        } else {
            return None;
        }
    };
    let pa = p.magnitude().to_u32()?;
    let powed = Rat::new(rooted.numer().pow(pa), rooted.denom().pow(pa));
    if p.is_negative() {
        if powed.is_zero() {
            return None;
        }
        Some(powed.recip())
    } else {
        Some(powed)
    }
}

/// Enclosure of sqrt(x); exact for perfect squares.
pub fn sqrt_enclosure(x: &Rat, eps: &Rat) -> Result<Enclosure, RigorError> {
    pow_enclosure(x, &Rat::new(BigInt::one(), BigInt::from(2)), eps)
}
