//! Two-sided rational enclosures of real values.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use super::rat::{rat_serde, Rat};

/// `[lo, hi]` with the represented real value guaranteed inside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    #[serde(with = "rat_serde")]
    pub lo: Rat,
    #[serde(with = "rat_serde")]
    pub hi: Rat,
}

impl Enclosure {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        debug_assert!(lo <= hi, "enclosure endpoints out of order");
        Enclosure { lo, hi }
    }

    pub fn exact(x: Rat) -> Self {
        Enclosure {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn overlaps(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Smallest enclosure containing both.
    pub fn hull(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn neg(&self) -> Enclosure {
        Enclosure {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    /// General interval product.
    pub fn mul(&self, other: &Enclosure) -> Enclosure {
        let candidates = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = candidates.iter().min().unwrap().clone();
        let hi = candidates.iter().max().unwrap().clone();
        Enclosure { lo, hi }
    }

    pub fn scale(&self, k: &Rat) -> Enclosure {
        if k >= &Rat::zero() {
            Enclosure {
                lo: &self.lo * k,
                hi: &self.hi * k,
            }
        } else {
            Enclosure {
                lo: &self.hi * k,
                hi: &self.lo * k,
            }
        }
    }

    pub fn shift(&self, k: &Rat) -> Enclosure {
        Enclosure {
            lo: &self.lo + k,
            hi: &self.hi + k,
        }
    }

    /// Reciprocal; requires the enclosure to exclude zero.
    pub fn recip(&self) -> Option<Enclosure> {
        if self.lo > Rat::zero() || self.hi < Rat::zero() {
            Some(Enclosure {
                lo: self.hi.recip(),
                hi: self.lo.recip(),
            })
        } else {
            None
        }
    }

    /// Interval division; `other` must exclude zero.
    pub fn div(&self, other: &Enclosure) -> Option<Enclosure> {
        other.recip().map(|r| self.mul(&r))
    }

    /// Integer power of a non-negative enclosure.
    pub fn pow_nonneg(&self, k: u32) -> Enclosure {
        debug_assert!(self.lo >= Rat::zero());
        let mut lo = Rat::from_integer(1.into());
        let mut hi = Rat::from_integer(1.into());
        for _ in 0..k {
            lo *= &self.lo;
            hi *= &self.hi;
        }
        Enclosure { lo, hi }
    }

    /// Three-way comparison against an exact rational; `None` while the
    /// enclosure straddles it.
    pub fn cmp_rat(&self, x: &Rat) -> Option<Ordering> {
        if &self.hi < x {
            Some(Ordering::Less)
        } else if &self.lo > x {
            Some(Ordering::Greater)
        } else if self.is_exact() && &self.lo == x {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Decides `value <= x` when possible.
    pub fn decide_le(&self, x: &Rat) -> Option<bool> {
        if &self.hi <= x {
            Some(true)
        } else if &self.lo > x {
            Some(false)
        } else {
            None
        }
    }

    /// Decides `value < x` when possible.
    pub fn decide_lt(&self, x: &Rat) -> Option<bool> {
        if &self.hi < x {
            Some(true)
        } else if &self.lo >= x {
            Some(false)
        } else {
            None
        }
    }
}
