//! D-sequences, the D-adic pseudo-norm and heights.
//!
//! `|q|_D = inf { D_n^-1 : q in D_n Z }` with `D_0 = 1`, `D_n = d_1 ... d_n`;
//! the infimum is attained at the largest n with `D_n | q`. The height of a
//! rational r/q is `H(q) = q^2 |q|_D`, always a positive integer.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rigor::Rat;

use super::LittlewoodError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum DKind {
    /// d_k = p for all k (the p-adic case when p is prime).
    Constant(u64),
    /// d_k cycles through the list.
    Periodic(Vec<u64>),
    /// d_k = 2^(2^k), so D_k = 2^(2^(k+1) - 2) >= 2^(2^k) for k >= 1.
    Doubling,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DSequence {
    pub kind: DKind,
}

impl DSequence {
    pub fn constant(p: u64) -> Result<Self, LittlewoodError> {
        if p < 2 {
            return Err(LittlewoodError::InvalidParams(format!(
                "constant D-sequence needs d >= 2, got {p}"
            )));
        }
        Ok(DSequence {
            kind: DKind::Constant(p),
        })
    }

    pub fn periodic(list: Vec<u64>) -> Result<Self, LittlewoodError> {
        if list.is_empty() || list.iter().any(|&d| d < 2) {
            return Err(LittlewoodError::InvalidParams(
                "periodic D-sequence needs a nonempty list of terms >= 2".into(),
            ));
        }
        Ok(DSequence {
            kind: DKind::Periodic(list),
        })
    }

    pub fn doubling() -> Self {
        DSequence {
            kind: DKind::Doubling,
        }
    }

    /// Parses `const:2`, `list:2,3,5`, `list:[2,3,5]` or `doubling`.
    pub fn parse(s: &str) -> Result<Self, LittlewoodError> {
        let bad = || LittlewoodError::InvalidParams(format!("cannot parse D-sequence {s:?}"));
        let s = s.trim();
        if s == "doubling" {
            return Ok(DSequence::doubling());
        }
        if let Some(rest) = s.strip_prefix("const:") {
            let p = rest.trim().parse().map_err(|_| bad())?;
            return DSequence::constant(p);
        }
        if let Some(rest) = s.strip_prefix("list:") {
            let rest = rest.trim().trim_start_matches('[').trim_end_matches(']');
            let list = rest
                .split(',')
                .map(|t| t.trim().parse::<u64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>, _>>()?;
            return DSequence::periodic(list);
        }
        Err(bad())
    }

    /// Bit length of d_k (k >= 1) without materializing it.
    pub(crate) fn term_bits(&self, k: u32) -> u64 {
        match &self.kind {
            DKind::Constant(p) => 64 - p.leading_zeros() as u64,
            DKind::Periodic(v) => {
                let d = v[(k as usize - 1) % v.len()];
                64 - d.leading_zeros() as u64
            }
            DKind::Doubling => (1u64 << k.min(62)) + 1,
        }
    }

    /// d_k for k >= 1.
    pub fn term(&self, k: u32) -> BigInt {
        match &self.kind {
            DKind::Constant(p) => BigInt::from(*p),
            DKind::Periodic(v) => BigInt::from(v[(k as usize - 1) % v.len()]),
            DKind::Doubling => {
                assert!(k <= 40, "doubling term d_{k} is astronomically large");
                BigInt::one() << (1usize << k)
            }
        }
    }

    /// The products `D_0, D_1, ..., D_K` with every listed `D_k < bound`.
    pub fn products_below(&self, bound: &BigInt) -> Vec<BigInt> {
        let mut out = vec![BigInt::one()];
        let bound_bits = bound.magnitude().bits();
        loop {
            let k = out.len() as u32;
            let last = out.last().unwrap();
            if last.magnitude().bits() + self.term_bits(k) > bound_bits + 2 {
                break;
            }
            let next = last * self.term(k);
            if &next >= bound {
                break;
            }
            out.push(next);
        }
        out
    }

    /// `(k, D_k, qbar)` with `q = D_k * qbar` and `q` not in `D_{k+1} Z`.
    pub fn valuation(&self, q: &BigInt) -> (u32, BigInt, BigInt) {
        assert!(q.is_positive(), "valuation needs q >= 1");
        let q_bits = q.magnitude().bits();
        let mut k = 0u32;
        let mut dk = BigInt::one();
        loop {
            if dk.magnitude().bits() + self.term_bits(k + 1) > q_bits + 2 {
                break;
            }
            let next = &dk * self.term(k + 1);
            if (q % &next).is_zero() {
                dk = next;
                k += 1;
            } else {
                break;
            }
        }
        let qbar = q / &dk;
        (k, dk, qbar)
    }

    /// `|q|_D = 1 / D_k`.
    pub fn d_norm(&self, q: &BigInt) -> Result<Rat, LittlewoodError> {
        if !q.is_positive() {
            return Err(LittlewoodError::InvalidParams(format!(
                "|q|_D needs q >= 1, got {q}"
            )));
        }
        let (_, dk, _) = self.valuation(q);
        Ok(Rat::new(BigInt::one(), dk))
    }

    /// `H(q) = q^2 |q|_D = D_k * qbar^2`, as an integer.
    pub fn height_int(&self, q: &BigInt) -> BigInt {
        let (_, dk, qbar) = self.valuation(q);
        dk * &qbar * &qbar
    }

    /// The height as an exact rational.
    pub fn height(&self, q: &BigInt) -> Result<Rat, LittlewoodError> {
        if !q.is_positive() {
            return Err(LittlewoodError::InvalidParams(format!(
                "H(q) needs q >= 1, got {q}"
            )));
        }
        Ok(Rat::from_integer(self.height_int(q)))
    }
}
