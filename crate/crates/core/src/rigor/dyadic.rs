//! Internal dyadic interval arithmetic with directed rounding.
//!
//! Values are `m * 2^e` with unbounded mantissa; `round` trims the mantissa to
//! the working precision rounding toward the requested direction. All series
//! in `logs` run on `DyInterval`s so that mantissa growth stays linear in the
//! working precision instead of exploding the way exact rational partial sums
//! would.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rat::Rat;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum Dir {
    Down,
    Up,
}

#[derive(Clone, Debug)]
pub(crate) struct Dyadic {
    pub m: BigInt,
    pub e: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            m: BigInt::zero(),
            e: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            m: BigInt::one(),
            e: 0,
        }
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        Dyadic { m: n.clone(), e: 0 }
    }

    pub fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    /// Trim the mantissa to at most `prec` bits, rounding toward the direction.
    pub fn round(mut self, prec: u32, dir: Dir) -> Self {
        let bits = self.m.magnitude().bits();
        if bits <= prec as u64 {
            return self;
        }
        let shift = (bits - prec as u64) as usize;
        let d = BigInt::one() << shift;
        self.m = match dir {
            Dir::Down => self.m.div_floor(&d),
            Dir::Up => self.m.div_ceil(&d),
        };
        self.e += shift as i64;
        self
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        // exact; align exponents
        let e = self.e.min(other.e);
        let a = &self.m << (self.e - e) as usize;
        let b = &other.m << (other.e - e) as usize;
        Dyadic { m: a + b, e }
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            m: -self.m.clone(),
            e: self.e,
        }
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic {
            m: &self.m * &other.m,
            e: self.e + other.e,
        }
    }

    pub fn shl(&self, k: i64) -> Dyadic {
        Dyadic {
            m: self.m.clone(),
            e: self.e + k,
        }
    }

    /// Directed division producing roughly `prec` significant bits.
    pub fn div(&self, other: &Dyadic, prec: u32, dir: Dir) -> Dyadic {
        assert!(!other.m.is_zero(), "dyadic division by zero");
        let nbits = self.m.magnitude().bits() as i64;
        let dbits = other.m.magnitude().bits() as i64;
        // shift numerator so the quotient carries prec significant bits
        let s = (prec as i64 + dbits - nbits + 2).max(0) as usize;
        let num = &self.m << s;
        let q = match (dir, other.m.is_negative()) {
            (Dir::Down, false) | (Dir::Up, true) => num.div_floor(&other.m),
            (Dir::Up, false) | (Dir::Down, true) => num.div_ceil(&other.m),
        };
        Dyadic {
            m: q,
            e: self.e - other.e - s as i64,
        }
    }

    /// Directed conversion from an exact rational.
    pub fn from_rat(x: &Rat, prec: u32, dir: Dir) -> Dyadic {
        if x.is_zero() {
            return Dyadic::zero();
        }
        let nbits = x.numer().magnitude().bits() as i64;
        let dbits = x.denom().magnitude().bits() as i64;
        let s = (prec as i64 + dbits - nbits + 2).max(0) as usize;
        let num = x.numer() << s;
        let q = match dir {
            Dir::Down => num.div_floor(x.denom()),
            Dir::Up => num.div_ceil(x.denom()),
        };
        Dyadic {
            m: q,
            e: -(s as i64),
        }
    }

    pub fn to_rat(&self) -> Rat {
        if self.e >= 0 {
            Rat::from_integer(&self.m << self.e as usize)
        } else {
            Rat::new(self.m.clone(), BigInt::one() << (-self.e) as usize)
        }
    }

    pub fn cmp(&self, other: &Dyadic) -> std::cmp::Ordering {
        let e = self.e.min(other.e);
        let a = &self.m << (self.e - e) as usize;
        let b = &other.m << (other.e - e) as usize;
        a.cmp(&b)
    }
}

/// A closed dyadic interval `[lo, hi]` with outward-rounded operations.
#[derive(Clone, Debug)]
pub(crate) struct DyInterval {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl DyInterval {
    pub fn point(d: Dyadic) -> Self {
        DyInterval {
            lo: d.clone(),
            hi: d,
        }
    }

    pub fn of_rat(x: &Rat, prec: u32) -> Self {
        DyInterval {
            lo: Dyadic::from_rat(x, prec, Dir::Down),
            hi: Dyadic::from_rat(x, prec, Dir::Up),
        }
    }

    pub fn add(&self, other: &DyInterval, prec: u32) -> DyInterval {
        DyInterval {
            lo: self.lo.add(&other.lo).round(prec, Dir::Down),
            hi: self.hi.add(&other.hi).round(prec, Dir::Up),
        }
    }

    /// Multiplication for intervals with non-negative lower endpoints.
    pub fn mul_nonneg(&self, other: &DyInterval, prec: u32) -> DyInterval {
        debug_assert!(!self.lo.is_negative() && !other.lo.is_negative());
        DyInterval {
            lo: self.lo.mul(&other.lo).round(prec, Dir::Down),
            hi: self.hi.mul(&other.hi).round(prec, Dir::Up),
        }
    }

    /// Division by a positive integer.
    pub fn div_uint(&self, k: u64, prec: u32) -> DyInterval {
        let d = Dyadic::from_bigint(&BigInt::from(k));
        DyInterval {
            lo: self.lo.div(&d, prec, Dir::Down),
            hi: self.hi.div(&d, prec, Dir::Up),
        }
    }

    /// Scale by an integer (possibly negative).
    pub fn mul_int(&self, k: i64) -> DyInterval {
        let d = Dyadic::from_bigint(&BigInt::from(k));
        if k >= 0 {
            DyInterval {
                lo: self.lo.mul(&d),
                hi: self.hi.mul(&d),
            }
        } else {
            DyInterval {
                lo: self.hi.mul(&d),
                hi: self.lo.mul(&d),
            }
        }
    }

    pub fn shl(&self, k: i64) -> DyInterval {
        DyInterval {
            lo: self.lo.shl(k),
            hi: self.hi.shl(k),
        }
    }

    pub fn to_rats(&self) -> (Rat, Rat) {
        (self.lo.to_rat(), self.hi.to_rat())
    }
}
