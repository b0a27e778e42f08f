//! The two sieve variants and their combinatorial ingredients: the weight
//! function f, the factorial-like product F, the level branching R_n and the
//! per-level removal budgets.
//!
//! Bounded variant: `f(q) = log* q * log*(log q)`,
//! `F(n) = prod k * floor(log* k)`, `R_n = R (n+1) floor(log*(n+1))`,
//! budget `7 log^2 R * n^2 (log* n)^2` at stratum n-1.
//! Doubling variant: `f(q) = log*(log q) * log*(log*(log q))`,
//! `F(n) = prod floor(log* k * log*(log k))`,
//! `R_n = R floor(log*(n+1) log*(log(n+1)))`,
//! budget `7 log^2 R (log* n)^2 (log*(log n))^2`.
//!
//! Brackets read as floors: `R_n` must be a natural number, and
//! `R_n = R * F(n+1)/F(n)` holds as an exact integer identity.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::rigor::{
    floor_of_enclosure, log_enclosure, log_star_enclosure, log_star_of_enclosure, rat_pow2,
    Enclosure, Precision, Rat, RigorError,
};

use super::LittlewoodError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// The bounded-`D` construction with `f(q) = log* q * log*(log q)`.
    Prop1,
    /// The rapidly-growing-`D` construction with
    /// `f(q) = log*(log q) * log*(log*(log q))`.
    Prop2,
}

impl Variant {
    /// Enclosure of f(q) with width at most eps.
    pub fn f_value(&self, q: &BigInt, eps: &Rat) -> Result<Enclosure, RigorError> {
        if !q.is_positive() {
            return Err(RigorError::Domain(format!("f needs q >= 1, got {q}")));
        }
        let qr = Rat::from_integer(q.clone());
        let mut inner = eps.clone() / Rat::from_integer(4.into());
        loop {
            let value = match self {
                Variant::Prop1 => {
                    let a = log_star_enclosure(&qr, &inner)?;
                    let lnq = log_enclosure(&qr, &inner)?;
                    let b = log_star_of_enclosure(&lnq, &inner)?;
                    a.mul(&b)
                }
                Variant::Prop2 => {
                    let lnq = log_enclosure(&qr, &inner)?;
                    let a = log_star_of_enclosure(&lnq, &inner)?;
                    let b = log_star_of_enclosure(&a, &inner)?;
                    a.mul(&b)
                }
            };
            if value.width() <= *eps {
                return Ok(value);
            }
            inner /= Rat::from_integer(16.into());
        }
    }

    /// Enclosure of the per-factor value whose floor enters F:
    /// `log* k` for the bounded variant, `log* k * log*(log k)` for the
    /// doubling one.
    fn factor_value(&self, k: u32, eps: &Rat) -> Result<Enclosure, RigorError> {
        let kr = Rat::from_integer(k.into());
        let mut inner = eps.clone() / Rat::from_integer(4.into());
        loop {
            let value = match self {
                Variant::Prop1 => log_star_enclosure(&kr, &inner)?,
                Variant::Prop2 => {
                    let a = log_star_enclosure(&kr, &inner)?;
                    let lnk = log_enclosure(&kr, &inner)?;
                    let b = log_star_of_enclosure(&lnk, &inner)?;
                    a.mul(&b)
                }
            };
            if value.width() <= *eps {
                return Ok(value);
            }
            inner /= Rat::from_integer(16.into());
        }
    }

    /// The per-level budget `r_{n-1,n}` as a refinable value (it involves
    /// log^2 R). Defined for n >= 1.
    pub fn budget_enclosure(&self, n: u32, r: u64, eps: &Rat) -> Result<Enclosure, RigorError> {
        let variant = *self;
        let nr = Rat::from_integer(n.into());
        // every factor is recomputed per pass: the width target applies to
        // the product, so all inputs must tighten together
        let mut inner = eps.clone() / Rat::from_integer(64.into());
        loop {
            let ln_r = log_enclosure(&Rat::from_integer(r.into()), &inner)?;
            let tail = match variant {
                Variant::Prop1 => {
                    // n^2 (log* n)^2
                    let ls = log_star_enclosure(&nr, &inner)?;
                    ls.pow_nonneg(2).scale(&(&nr * &nr))
                }
                Variant::Prop2 => {
                    // (log* n)^2 (log*(log n))^2
                    let ls = log_star_enclosure(&nr, &inner)?;
                    let lnn = log_enclosure(&nr, &inner)?;
                    let lls = log_star_of_enclosure(&lnn, &inner)?;
                    ls.pow_nonneg(2).mul(&lls.pow_nonneg(2))
                }
            };
            let value = ln_r
                .pow_nonneg(2)
                .mul(&tail)
                .scale(&Rat::from_integer(7.into()));
            if value.width() <= *eps {
                return Ok(value);
            }
            inner /= Rat::from_integer(16.into());
        }
    }
}

/// Memoized exact integers: the floored per-factor values and the running
/// products F(n).
pub struct FTable {
    variant: Variant,
    precision: Precision,
    inner: Mutex<FTableInner>,
}

struct FTableInner {
    /// `factors[k-1]` = the k-th floored factor (including the leading k for
    /// the bounded variant), k >= 1.
    factors: Vec<BigInt>,
    /// `products[n]` = F(n), starting at F(0) = 1.
    products: Vec<BigInt>,
}

impl FTable {
    pub fn new(variant: Variant, precision: Precision) -> Self {
        FTable {
            variant,
            precision,
            inner: Mutex::new(FTableInner {
                factors: Vec::new(),
                products: vec![BigInt::one()],
            }),
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    fn extend_to(&self, n: u32) -> Result<(), RigorError> {
        let mut inner = self.inner.lock().unwrap();
        while inner.products.len() <= n as usize {
            let k = inner.factors.len() as u32 + 1;
            let initial = self.variant.factor_value(k, &rat_pow2(-6))?;
            let floored = floor_of_enclosure(
                initial,
                |eps| self.variant.factor_value(k, eps),
                &self.precision,
            )?;
            let factor = match self.variant {
                Variant::Prop1 => BigInt::from(k) * &floored,
                Variant::Prop2 => floored.clone(),
            };
            let next = inner.products.last().unwrap() * &factor;
            inner.factors.push(factor);
            inner.products.push(next);
        }
        Ok(())
    }

    /// F(n); equals 1 for n <= 0.
    pub fn f(&self, n: i64) -> Result<BigInt, RigorError> {
        if n <= 0 {
            return Ok(BigInt::one());
        }
        self.extend_to(n as u32)?;
        Ok(self.inner.lock().unwrap().products[n as usize].clone())
    }

    /// The floored factor `F(k)/F(k-1)` for k >= 1.
    pub fn factor(&self, k: u32) -> Result<BigInt, RigorError> {
        self.extend_to(k)?;
        Ok(self.inner.lock().unwrap().factors[k as usize - 1].clone())
    }

    /// `R_n = R * F(n+1)/F(n)`, exact.
    pub fn level_r(&self, n: u32, r: u64) -> Result<u64, LittlewoodError> {
        let value = BigInt::from(r) * self.factor(n + 1)?;
        value.to_u64().ok_or_else(|| {
            LittlewoodError::Overflow(format!("branching R_{n} = {value} exceeds u64"))
        })
    }
}
