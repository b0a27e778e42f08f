//! Arbitrary-precision rationals: parsing, formatting and serde helpers.
//!
//! The canonical invariants (denominator > 0, lowest terms, zero as 0/1) are
//! maintained by `num_rational::BigRational` itself; everything here is the
//! glue that keeps file formats exact: rationals serialize as
//! `{"num": "...", "den": "..."}` with decimal strings.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::RigorError;

/// The exact rational type used across the engine.
pub type Rat = num_rational::BigRational;

pub fn rat_from_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// 2^k for any sign of k, exact.
pub fn rat_pow2(k: i64) -> Rat {
    if k >= 0 {
        Rat::from_integer(BigInt::one() << k as usize)
    } else {
        Rat::new(BigInt::one(), BigInt::one() << (-k) as usize)
    }
}

pub fn rat_floor(x: &Rat) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn rat_ceil(x: &Rat) -> BigInt {
    x.numer().div_ceil(x.denom())
}

/// Parses `"p/q"`, plain integers and decimal strings (`"0.25"`, `"-3.5"`).
pub fn parse_rat(s: &str) -> Result<Rat, RigorError> {
    let s = s.trim();
    let bad = || RigorError::Parse(s.to_string());
    if let Some((n, d)) = s.split_once('/') {
        let num: BigInt = n.trim().parse().map_err(|_| bad())?;
        let den: BigInt = d.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int_part.trim_start().starts_with('-');
        let int: BigInt = if int_part.is_empty() || int_part == "-" {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        let frac: BigInt = frac_part.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let num = int.magnitude().clone() * scale.magnitude().clone() + frac.magnitude().clone();
        let mut r = Rat::new(BigInt::from_biguint(num_bigint::Sign::Plus, num), scale);
        if negative {
            r = -r;
        }
        return Ok(r);
    }
    let num: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rat::from_integer(num))
}

/// Wire representation of a rational: decimal strings for both parts.
#[derive(Serialize, Deserialize)]
pub struct RatRepr {
    pub num: String,
    pub den: String,
}

impl RatRepr {
    pub fn of(x: &Rat) -> Self {
        RatRepr {
            num: x.numer().to_string(),
            den: x.denom().to_string(),
        }
    }

    pub fn to_rat(&self) -> Result<Rat, RigorError> {
        let num: BigInt = self
            .num
            .parse()
            .map_err(|_| RigorError::Parse(self.num.clone()))?;
        let den: BigInt = self
            .den
            .parse()
            .map_err(|_| RigorError::Parse(self.den.clone()))?;
        if den.is_positive() {
            Ok(Rat::new(num, den))
        } else {
            Err(RigorError::Parse(format!("{}/{}", self.num, self.den)))
        }
    }
}

/// Serde adapter for `Rat` fields: `#[serde(with = "rat_serde")]`.
pub mod rat_serde {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rat, s: S) -> Result<S::Ok, S::Error> {
        RatRepr::of(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let repr = RatRepr::deserialize(d)?;
        repr.to_rat().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `BigInt` fields (decimal strings).
pub mod big_serde {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        x.to_string().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}
