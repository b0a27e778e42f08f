//! Real values that are either exact rationals or refinable enclosures.
//!
//! Removal budgets are the main client: generic schedules carry exact
//! rational budgets, the mixed-Littlewood schedules carry budgets defined
//! through logarithms that can only ever be enclosed.

use std::fmt;
use std::sync::Arc;

use super::enclosure::Enclosure;
use super::precision::Precision;
use super::rat::{rat_pow2, Rat};
use super::RigorError;

type RefineFn = dyn Fn(&Rat) -> Result<Enclosure, RigorError> + Send + Sync;

/// An exact rational or a dynamically refinable irrational value.
#[derive(Clone)]
pub enum CertifiedReal {
    Exact(Rat),
    Dynamic {
        label: String,
        refine: Arc<RefineFn>,
    },
}

impl CertifiedReal {
    pub fn exact(x: Rat) -> Self {
        CertifiedReal::Exact(x)
    }

    pub fn dynamic<F>(label: impl Into<String>, refine: F) -> Self
    where
        F: Fn(&Rat) -> Result<Enclosure, RigorError> + Send + Sync + 'static,
    {
        CertifiedReal::Dynamic {
            label: label.into(),
            refine: Arc::new(refine),
        }
    }

    pub fn as_exact(&self) -> Option<&Rat> {
        match self {
            CertifiedReal::Exact(x) => Some(x),
            CertifiedReal::Dynamic { .. } => None,
        }
    }

    pub fn enclose(&self, eps: &Rat) -> Result<Enclosure, RigorError> {
        match self {
            CertifiedReal::Exact(x) => Ok(Enclosure::exact(x.clone())),
            CertifiedReal::Dynamic { refine, .. } => refine(eps),
        }
    }

    /// Decides `value <= x`, refining as needed up to the precision cap.
    pub fn decide_le(&self, x: &Rat, precision: &Precision) -> Result<bool, RigorError> {
        match self {
            CertifiedReal::Exact(v) => Ok(v <= x),
            CertifiedReal::Dynamic { label, refine } => {
                let mut eps = Rat::new(1.into(), 4.into());
                let min_width = precision.min_width();
                loop {
                    let enc = refine(&eps)?;
                    if let Some(ans) = enc.decide_le(x) {
                        return Ok(ans);
                    }
                    if eps < min_width {
                        return Err(RigorError::UndecidableComparison {
                            context: format!("{label} vs {x}"),
                        });
                    }
                    eps /= Rat::from_integer(16.into());
                }
            }
        }
    }

    /// Decides `x <= value` (i.e. the budget admits a count of x).
    pub fn decide_ge(&self, x: &Rat, precision: &Precision) -> Result<bool, RigorError> {
        match self {
            CertifiedReal::Exact(v) => Ok(v >= x),
            CertifiedReal::Dynamic { label, refine } => {
                let mut eps = Rat::new(1.into(), 4.into());
                let min_width = precision.min_width();
                loop {
                    let enc = refine(&eps)?;
                    if &enc.lo >= x {
                        return Ok(true);
                    }
                    if &enc.hi < x {
                        return Ok(false);
                    }
                    if eps < min_width {
                        return Err(RigorError::UndecidableComparison {
                            context: format!("{label} vs {x}"),
                        });
                    }
                    eps /= Rat::from_integer(16.into());
                }
            }
        }
    }

    pub fn add(&self, other: &CertifiedReal) -> CertifiedReal {
        match (self, other) {
            (CertifiedReal::Exact(a), CertifiedReal::Exact(b)) => CertifiedReal::Exact(a + b),
            _ => {
                let a = self.clone();
                let b = other.clone();
                CertifiedReal::dynamic(format!("{self:?} + {other:?}"), move |eps| {
                    let half = eps / Rat::from_integer(2.into());
                    Ok(a.enclose(&half)?.add(&b.enclose(&half)?))
                })
            }
        }
    }

    /// A default-width enclosure for display and serialization.
    pub fn display_enclosure(&self) -> Result<Enclosure, RigorError> {
        self.enclose(&rat_pow2(-64))
    }
}

impl fmt::Debug for CertifiedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertifiedReal::Exact(x) => write!(f, "{x}"),
            CertifiedReal::Dynamic { label, .. } => write!(f, "~{label}"),
        }
    }
}

impl From<Rat> for CertifiedReal {
    fn from(x: Rat) -> Self {
        CertifiedReal::Exact(x)
    }
}
