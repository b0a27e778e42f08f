//! Instance parameters, their validation, and the induced Cantor schedule.
//!
//! The smallness conditions tie the constants together:
//!   (i)  `2 e^2 c1 (log R + 2)/log 2 * R < 1`
//!   (ii) `c ( 64 R^2 (log R + 2)/(c1 log 2) + 16 e R^2 (log R + 2)^2 / log 2 ) < 1`
//! together with the threshold `R > e^12`. Parameters failing validation may
//! still be built in experimental mode; certificates are then flagged
//! uncertified and counting bounds are reported instead of asserted.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cantor::CantorSchedule;
use crate::rigor::{
    e_enclosure, e_squared_enclosure, ln2_enclosure, log_enclosure, rat_pow2, rat_serde,
    CertifiedReal, ClosedInterval, Enclosure, Precision, Rat,
};

use super::dseq::DSequence;
use super::enumerate::FStep;
use super::variant::{FTable, Variant};
use super::LittlewoodError;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceParams {
    pub variant: Variant,
    pub d: DSequence,
    /// The base branching constant R.
    pub r: u64,
    /// Root interval length; the root is any interval of length c1 in [0,1].
    #[serde(with = "rat_serde")]
    pub c1: Rat,
    /// The exclusion-interval constant c.
    #[serde(with = "rat_serde")]
    pub c: Rat,
    pub root: ClosedInterval,
    /// Set by validation; uncertified instances run in experimental mode.
    pub certified: bool,
}

impl InstanceParams {
    pub fn new(variant: Variant, d: DSequence, r: u64, c1: Rat, c: Rat) -> Self {
        let root = ClosedInterval::new(Rat::zero(), c1.clone());
        InstanceParams {
            variant,
            d,
            r,
            c1,
            c,
            root,
            certified: false,
        }
    }

    pub fn with_root(mut self, root: ClosedInterval) -> Self {
        self.root = root;
        self
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParamCheck {
    pub lhs: Enclosure,
    pub pass: bool,
}

/// Validation outcome with certified margins.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParamCertificate {
    /// `2 e^2 c1 (log R + 2)/log 2 * R < 1`.
    pub c1_smallness: ParamCheck,
    /// `c (64 R^2 (log R+2)/(c1 log 2) + 16 e R^2 (log R+2)^2/log 2) < 1`.
    pub c_smallness: ParamCheck,
    /// `R > e^12`.
    pub r_above_threshold: bool,
    /// Root is a sub-interval of [0,1] of length exactly c1.
    pub root_ok: bool,
    pub pass: bool,
}

/// Proof-internal constants, exposed for diagnostic reports only.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagnosticConstants {
    /// `(log R + 2)/log 2`: bounds the number of divisibility strata.
    pub strata_factor: Enclosure,
    /// `2 + log R`: bounds the number of height strata.
    pub height_strata_factor: Enclosure,
    /// `2 e^2 c1 R + 64 c R^2 / c1 + (log R + 2)(16 e c R^2 + 4)`.
    pub removal_sum_factor: Enclosure,
}

fn decide_lt_one(value: &Enclosure) -> Option<bool> {
    value.decide_lt(&Rat::one())
}

/// Decides the two smallness conditions and the R threshold by rigorous
/// enclosures.
pub fn validate_params(
    params: &InstanceParams,
    precision: &Precision,
) -> Result<ParamCertificate, LittlewoodError> {
    if params.r < 2 {
        return Err(LittlewoodError::InvalidParams(format!(
            "R must be at least 2, got {}",
            params.r
        )));
    }
    if params.c1 <= Rat::zero() {
        return Err(LittlewoodError::InvalidParams(
            "c1 must be strictly positive".into(),
        ));
    }
    if params.c <= Rat::zero() {
        return Err(LittlewoodError::InvalidParams(
            "c must be strictly positive".into(),
        ));
    }
    let r_rat = Rat::from_integer(params.r.into());
    let mut eps = rat_pow2(-32);
    let min_width = precision.min_width();
    let (c1_check, c_check) = loop {
        let e2 = e_squared_enclosure(&eps)?;
        let e1 = e_enclosure(&eps)?;
        let ln_r = log_enclosure(&r_rat, &eps)?;
        let ln2 = ln2_enclosure(&eps)?;
        let log_term = ln_r.shift(&Rat::from_integer(2.into())); // log R + 2
        let ratio = log_term.div(&ln2).expect("ln 2 > 0");

        // (i): 2 e^2 c1 ratio R
        let lhs1 = e2
            .scale(&(Rat::from_integer(2.into()) * &params.c1 * &r_rat))
            .mul(&ratio);

        // (ii): c (64 R^2 ratio / c1 + 16 e R^2 (log R + 2)^2 / log 2)
        let r2 = &r_rat * &r_rat;
        let term_a = ratio.scale(&(Rat::from_integer(64.into()) * &r2 / &params.c1));
        let term_b = e1
            .mul(&log_term.pow_nonneg(2))
            .div(&ln2)
            .expect("ln 2 > 0")
            .scale(&(Rat::from_integer(16.into()) * &r2));
        let lhs2 = term_a.add(&term_b).scale(&params.c);

        match (decide_lt_one(&lhs1), decide_lt_one(&lhs2)) {
            (Some(p1), Some(p2)) => {
                break (
                    ParamCheck {
                        lhs: lhs1,
                        pass: p1,
                    },
                    ParamCheck {
                        lhs: lhs2,
                        pass: p2,
                    },
                )
            }
            _ => {
                eps /= Rat::from_integer(64.into());
                if eps < min_width {
                    return Err(LittlewoodError::Rigor(
                        crate::rigor::RigorError::UndecidableComparison {
                            context: "parameter smallness conditions".into(),
                        },
                    ));
                }
            }
        }
    };

    // R > e^12, decided by refining the e enclosure (R is an integer)
    let r_above_threshold = {
        let mut eps = rat_pow2(-20);
        loop {
            let e1 = e_enclosure(&eps)?;
            let e12 = e1.pow_nonneg(12);
            if let Some(ans) = e12.decide_lt(&r_rat) {
                break ans;
            }
            eps /= Rat::from_integer(64.into());
            if eps < min_width {
                return Err(LittlewoodError::Rigor(
                    crate::rigor::RigorError::UndecidableComparison {
                        context: "R vs e^12".into(),
                    },
                ));
            }
        }
    };

    let root_ok = params.root.length() == params.c1
        && params.root.left >= Rat::zero()
        && params.root.right <= Rat::one();

    let pass = c1_check.pass && c_check.pass && r_above_threshold && root_ok;
    Ok(ParamCertificate {
        c1_smallness: c1_check,
        c_smallness: c_check,
        r_above_threshold,
        root_ok,
        pass,
    })
}

/// Diagnostic constants for reports.
pub fn diagnostic_constants(
    params: &InstanceParams,
    eps: &Rat,
) -> Result<DiagnosticConstants, LittlewoodError> {
    let r_rat = Rat::from_integer(params.r.into());
    let ln_r = log_enclosure(&r_rat, eps)?;
    let ln2 = ln2_enclosure(eps)?;
    let e1 = e_enclosure(eps)?;
    let e2 = e_squared_enclosure(eps)?;
    let log_term = ln_r.shift(&Rat::from_integer(2.into()));
    let strata_factor = log_term.div(&ln2).expect("ln 2 > 0");
    let height_strata_factor = ln_r.shift(&Rat::from_integer(2.into()));
    let r2 = &r_rat * &r_rat;
    let removal_sum_factor = e2
        .scale(&(Rat::from_integer(2.into()) * &params.c1 * &r_rat))
        .add(&Enclosure::exact(
            Rat::from_integer(64.into()) * &params.c * &r2 / &params.c1,
        ))
        .add(
            &log_term.mul(
                &e1.scale(&(Rat::from_integer(16.into()) * &params.c * &r2))
                    .shift(&Rat::from_integer(4.into())),
            ),
        );
    Ok(DiagnosticConstants {
        strata_factor,
        height_strata_factor,
        removal_sum_factor,
    })
}

/// A runnable instance: parameters plus the memoized combinatorial tables.
pub struct Instance {
    params: InstanceParams,
    ftable: FTable,
    fstep: FStep,
    precision: Precision,
}

impl Instance {
    pub fn new(params: InstanceParams) -> Result<Self, LittlewoodError> {
        if params.r < 2 {
            return Err(LittlewoodError::InvalidParams(format!(
                "R must be at least 2, got {}",
                params.r
            )));
        }
        if params.c1 <= Rat::zero() || params.c <= Rat::zero() {
            return Err(LittlewoodError::InvalidParams(
                "c1 and c must be strictly positive".into(),
            ));
        }
        if params.root.length() != params.c1 {
            return Err(LittlewoodError::InvalidParams(format!(
                "root has length {}, expected c1 = {}",
                params.root.length(),
                params.c1
            )));
        }
        if params.root.left < Rat::zero() || params.root.right > Rat::one() {
            return Err(LittlewoodError::InvalidParams(
                "root must lie inside [0, 1]".into(),
            ));
        }
        let precision = Precision::default_cap();
        let ftable = FTable::new(params.variant, precision);
        let fstep = FStep::new(params.variant);
        Ok(Instance {
            params,
            ftable,
            fstep,
            precision,
        })
    }

    /// Runs validation and stamps the certified flag.
    pub fn validate(&mut self) -> Result<ParamCertificate, LittlewoodError> {
        let cert = validate_params(&self.params, &self.precision)?;
        self.params.certified = cert.pass;
        Ok(cert)
    }

    pub fn params(&self) -> &InstanceParams {
        &self.params
    }

    pub fn precision(&self) -> &Precision {
        &self.precision
    }

    pub(crate) fn fstep(&self) -> &FStep {
        &self.fstep
    }

    pub fn f(&self, n: i64) -> Result<BigInt, LittlewoodError> {
        Ok(self.ftable.f(n)?)
    }

    pub fn level_r(&self, n: u32) -> Result<u64, LittlewoodError> {
        self.ftable.level_r(n, self.params.r)
    }

    /// `c1 * R^-n * F(n)^-1`, the exact interval length at level n.
    pub fn level_length(&self, n: u32) -> Result<Rat, LittlewoodError> {
        let rn = BigInt::from(self.params.r).pow(n);
        Ok(&self.params.c1 / Rat::from_integer(rn * self.f(n as i64)?))
    }

    /// `R^(n-1) F(n-1)`: the lower height bound of the level-n stratum (and
    /// the certified bound of a depth-n witness). Zero at n = 0.
    pub fn height_min(&self, n: u32) -> Result<BigInt, LittlewoodError> {
        if n == 0 {
            return Ok(BigInt::zero());
        }
        Ok(BigInt::from(self.params.r).pow(n - 1) * self.f(n as i64 - 1)?)
    }

    /// `R^n F(n)`: the upper height bound of the level-n stratum.
    pub fn height_max(&self, n: u32) -> Result<BigInt, LittlewoodError> {
        Ok(BigInt::from(self.params.r).pow(n) * self.f(n as i64)?)
    }

    /// The per-level removal budget `r_{n-1,n}` (n >= 1) as a refinable
    /// value.
    pub fn budget(&self, n: u32) -> CertifiedReal {
        let variant = self.params.variant;
        let r = self.params.r;
        CertifiedReal::dynamic(format!("budget(n={n}, R={r})"), move |eps| {
            variant.budget_enclosure(n, r, eps)
        })
    }

    /// Materializes the `(I, R, r)` schedule to the requested horizon.
    pub fn schedule_for(&self, horizon: u32) -> Result<CantorSchedule, LittlewoodError> {
        let mut branching = Vec::with_capacity(horizon as usize);
        for n in 0..horizon {
            branching.push(self.level_r(n)?);
        }
        let mut budgets = BTreeMap::new();
        for n in 1..horizon {
            budgets.insert((n - 1, n), self.budget(n));
        }
        Ok(CantorSchedule::new(
            self.params.root.clone(),
            branching,
            budgets,
        )?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigor::parse_rat;

    fn reference_params() -> InstanceParams {
        InstanceParams::new(
            Variant::Prop1,
            DSequence::constant(2).unwrap(),
            1 << 18,
            rat_pow2(-27),
            rat_pow2(-80),
        )
    }

    #[test]
    fn reference_parameters_validate_with_margins() {
        let p = Precision::default_cap();
        let cert = validate_params(&reference_params(), &p).unwrap();
        assert!(cert.pass);
        // the c1 condition evaluates to ~0.6028
        assert!(cert.c1_smallness.lhs.lo > parse_rat("0.60").unwrap());
        assert!(cert.c1_smallness.lhs.hi < parse_rat("0.61").unwrap());
        // the c condition evaluates to ~0.0102
        assert!(cert.c_smallness.lhs.lo > parse_rat("0.010").unwrap());
        assert!(cert.c_smallness.lhs.hi < parse_rat("0.011").unwrap());
        assert!(cert.r_above_threshold);
        assert!(cert.root_ok);
    }

    #[test]
    fn zero_c_is_rejected() {
        let mut params = reference_params();
        params.c = Rat::zero();
        assert!(validate_params(&params, &Precision::default_cap()).is_err());
        assert!(Instance::new(params).is_err());
    }

    #[test]
    fn small_r_fails_threshold() {
        let mut params = reference_params();
        params.r = 1 << 16; // 65536 < e^12 = 162754.79...
        let cert = validate_params(&params, &Precision::default_cap()).unwrap();
        assert!(!cert.r_above_threshold);
        assert!(!cert.pass);
        // 2^18 = 262144 > e^12 passes, as asserted above; the boundary is sharp
    }

    #[test]
    fn instance_lengths_and_bounds() {
        let inst = Instance::new(reference_params()).unwrap();
        assert_eq!(inst.level_length(0).unwrap(), rat_pow2(-27));
        assert_eq!(inst.level_length(1).unwrap(), rat_pow2(-45));
        // F(2) = 2: |J_2| = c1 R^-2 / 2
        assert_eq!(inst.level_length(2).unwrap(), rat_pow2(-64));
        assert_eq!(inst.height_min(3).unwrap(), BigInt::from(1u64 << 37));
        assert_eq!(inst.height_max(2).unwrap(), BigInt::from(1u64 << 37));
        assert_eq!(inst.height_min(1).unwrap(), BigInt::one());
    }

    #[test]
    fn schedule_frame_matches_formulas() {
        let inst = Instance::new(reference_params()).unwrap();
        let s = inst.schedule_for(4).unwrap();
        assert_eq!(s.branching()[0], 1 << 18);
        assert_eq!(s.branching()[1], 2 << 18);
        assert_eq!(s.branching()[2], 3 << 18);
        let p = Precision::default_cap();
        // budget(1) = 7 ln^2(2^18) within [1089, 1090]
        assert!(s
            .budget(0, 1)
            .decide_ge(&parse_rat("1089").unwrap(), &p)
            .unwrap());
        assert!(s
            .budget(0, 1)
            .decide_le(&parse_rat("1090").unwrap(), &p)
            .unwrap());
    }

    #[test]
    fn experimental_root_override() {
        let params = reference_params().with_root(ClosedInterval::new(
            parse_rat("1/2").unwrap(),
            parse_rat("1/2").unwrap() + rat_pow2(-27),
        ));
        let cert = validate_params(&params, &Precision::default_cap()).unwrap();
        assert!(cert.root_ok);
        let bad = reference_params()
            .with_root(ClosedInterval::new(Rat::zero(), parse_rat("1/2").unwrap()));
        assert!(Instance::new(bad).is_err());
    }
}
