//! The mass distribution principle check: `mu(B) <= a |B|^s` over a test
//! family, with `a := 2 |I|^-s prod_{i<=n0} R_i^s / t_i`.
//!
//! Finite-depth evaluation follows the proof's covering argument: for a test
//! interval B, pick the level n with `delta_n <= |B|` (shallowest such) and
//! sum the weights of the level-n intervals whose interiors meet B; interval
//! endpoints sitting on grid lines get the exact deepest-level point-mass
//! allowance instead of a whole neighboring interval.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::cantor::LevelCollection;
use crate::rigor::{pow_enclosure, rat_pow2, rat_serde, ClosedInterval, Enclosure, Precision, Rat};

use super::{LocalError, LocalSchedule, MeasureTable};

/// The configurable test family: dyadic cells of the root at every scale up
/// to `max_scale` (cells of length `|I| * 2^-k`), optionally all construction
/// intervals, plus arbitrary extra intervals.
#[derive(Clone, Debug)]
pub struct MdpFamily {
    pub max_scale: u32,
    pub include_construction: bool,
    pub extra: Vec<ClosedInterval>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MdpReport {
    #[serde(with = "rat_serde")]
    pub s: Rat,
    pub n0: u32,
    /// `R_n^s <= t_n` verified for `n0 < n <= horizon`.
    pub precondition_ok: bool,
    pub a: Enclosure,
    pub checked: u64,
    /// Checks with `|B| >= delta_{n0}`, outside the principle's scope; they
    /// are still evaluated but do not flip the verdict.
    pub out_of_scope: u64,
    pub failures: u64,
    pub verdict: bool,
    pub max_ratio: Option<MaxRatio>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MaxRatio {
    pub interval: ClosedInterval,
    pub ratio: Enclosure,
}

struct LevelIndex<'a> {
    levels: &'a [LevelCollection],
    prefix: Vec<Vec<Rat>>,
    lengths: Vec<Rat>,
}

impl<'a> LevelIndex<'a> {
    fn new(levels: &'a [LevelCollection], measure: &MeasureTable) -> Self {
        let prefix = levels
            .iter()
            .enumerate()
            .map(|(n, lv)| {
                let mut acc = Rat::zero();
                let mut out = Vec::with_capacity(lv.len() + 1);
                out.push(Rat::zero());
                for i in 0..lv.len() {
                    acc += &measure.weights[n][i].value;
                    out.push(acc.clone());
                }
                out
            })
            .collect();
        let lengths = levels
            .iter()
            .map(|lv| {
                lv.intervals
                    .first()
                    .map(|iv| iv.length())
                    .unwrap_or_else(Rat::zero)
            })
            .collect();
        LevelIndex {
            levels,
            prefix,
            lengths,
        }
    }

    /// Level to sum over for a test interval of length `len`: the shallowest
    /// n with `delta_n <= len`, clamped to the deepest available.
    fn level_for(&self, len: &Rat) -> usize {
        for (n, dn) in self.lengths.iter().enumerate() {
            if dn <= len {
                return n;
            }
        }
        self.levels.len() - 1
    }

    /// Upper bound on mu(B): open-overlap weights at the chosen level plus
    /// exact deepest-level point masses for grid-touching endpoints.
    fn mu_upper(&self, b: &ClosedInterval, measure: &MeasureTable) -> Rat {
        let level = self.level_for(&b.length());
        let lv = &self.levels[level];
        // interiors meet: iv.left < b.right && b.left < iv.right
        let lo = lv.intervals.partition_point(|iv| iv.right <= b.left);
        let hi = lv.intervals.partition_point(|iv| iv.left < b.right);
        let mut mu = &self.prefix[level][hi] - &self.prefix[level][lo];
        // endpoint allowance: a point not interior to a counted interval may
        // still carry limit mass; bound it by the deepest-level weights of
        // intervals containing the point
        let deepest = self.levels.len() - 1;
        for endpoint in [&b.left, &b.right] {
            let covered = (lo..hi).any(|i| {
                let iv = &lv.intervals[i];
                &iv.left < endpoint && endpoint < &iv.right
            });
            if covered {
                continue;
            }
            let dl = &self.levels[deepest];
            let from = dl.intervals.partition_point(|iv| &iv.right < endpoint);
            let to = dl.intervals.partition_point(|iv| &iv.left <= endpoint);
            for i in from..to {
                mu += &measure.weights[deepest][i].value;
            }
        }
        mu
    }
}

/// Counts the group members with `mu > a len^s`, refining the shared power
/// enclosure until every comparison is decided.
fn count_failures(
    mus: &[Rat],
    a: &Enclosure,
    len: &Rat,
    s: &Rat,
    precision: &Precision,
) -> Result<u64, LocalError> {
    let mut eps = rat_pow2(-32);
    let min_width = precision.min_width();
    loop {
        let pow = pow_enclosure(len, s, &eps)?;
        let rhs = a.mul(&pow);
        let mut failures = 0u64;
        let mut undecided = false;
        for mu in mus {
            if mu <= &rhs.lo {
                continue;
            }
            if mu > &rhs.hi || rhs.is_exact() {
                failures += 1;
            } else {
                undecided = true;
                break;
            }
        }
        if !undecided {
            return Ok(failures);
        }
        eps /= Rat::from_integer(64.into());
        if eps < min_width {
            return Err(LocalError::Rigor(
                crate::rigor::RigorError::UndecidableComparison {
                    context: format!("mu(B) vs a |B|^s at |B| = {len}"),
                },
            ));
        }
    }
}

/// Runs the `mu(B) <= a |B|^s` check over the family.
pub fn verify_mdp_bound(
    levels: &[LevelCollection],
    measure: &MeasureTable,
    schedule: &LocalSchedule,
    s: &Rat,
    n0: u32,
    family: &MdpFamily,
    precision: &Precision,
) -> Result<MdpReport, LocalError> {
    if levels.is_empty() {
        return Err(LocalError::EmptyLevel { level: 0 });
    }
    let horizon = levels.len() as u32 - 1;
    let eps = rat_pow2(-64);

    // measure-growth precondition: R_n^s <= t_n for n0 < n <= horizon
    let mut precondition_ok = true;
    for n in (n0 + 1)..=horizon.min(schedule.base().max_depth().saturating_sub(1)) {
        let r = Rat::from_integer(schedule.base().branch(n)?.into());
        let t = schedule.keep_count(n);
        let pow = pow_enclosure(&r, s, &eps)?;
        match pow.decide_le(&t) {
            Some(ok) => {
                if !ok {
                    precondition_ok = false;
                }
            }
            None if pow.is_exact() => {
                if pow.lo > t {
                    precondition_ok = false;
                }
            }
            None => {
                // refine once more before giving up
                let tighter = pow_enclosure(&r, s, &rat_pow2(-(precision.cap_bits as i64)))?;
                match tighter.decide_le(&t) {
                    Some(ok) => {
                        if !ok {
                            precondition_ok = false;
                        }
                    }
                    None => {
                        return Err(LocalError::Rigor(
                            crate::rigor::RigorError::UndecidableComparison {
                                context: format!("R_{n}^s vs t_{n}"),
                            },
                        ))
                    }
                }
            }
        }
    }

    // a := 2 |I|^-s prod_{i=0}^{n0} R_i^s / t_i
    let root_len = schedule.base().root().length();
    let mut a = pow_enclosure(&root_len, &(-s.clone()), &eps)?.scale(&Rat::from_integer(2.into()));
    for i in 0..=n0 {
        let r = Rat::from_integer(schedule.base().branch(i)?.into());
        let pow = pow_enclosure(&r, s, &eps)?;
        let t = schedule.keep_count(i);
        a = a.mul(&pow).scale(&t.recip());
    }

    let index = LevelIndex::new(levels, measure);
    let delta_n0 = schedule.base().level_length(n0)?;

    let mut targets: Vec<ClosedInterval> = Vec::new();
    let root = schedule.base().root();
    for k in 0..=family.max_scale {
        let cells = 1u64 << k;
        let step = root.length() * rat_pow2(-(k as i64));
        let mut left = root.left.clone();
        for j in 0..cells {
            let right = if j + 1 == cells {
                root.right.clone()
            } else {
                &left + &step
            };
            targets.push(ClosedInterval::new(left.clone(), right.clone()));
            left = right;
        }
    }
    if family.include_construction {
        for lv in levels {
            targets.extend(lv.intervals.iter().cloned());
        }
    }
    targets.extend(family.extra.iter().cloned());

    // group by interval length: the bound a |B|^s is shared within a group
    let mut groups: std::collections::BTreeMap<Rat, Vec<ClosedInterval>> =
        std::collections::BTreeMap::new();
    for b in targets {
        let len = b.length();
        if !len.is_zero() {
            groups.entry(len).or_default().push(b);
        }
    }

    let mut checked = 0u64;
    let mut out_of_scope = 0u64;
    let mut failures = 0u64;
    let mut best_per_len: std::collections::BTreeMap<Rat, (Rat, ClosedInterval)> =
        std::collections::BTreeMap::new();

    for (len, group) in &groups {
        let in_scope = len < &delta_n0;
        checked += group.len() as u64;
        if !in_scope {
            out_of_scope += group.len() as u64;
        }
        let mus: Vec<Rat> = group.iter().map(|b| index.mu_upper(b, measure)).collect();
        let group_failures = count_failures(&mus, &a, len, s, precision)?;
        if in_scope {
            failures += group_failures;
        }
        let (arg, mu_max) = mus
            .iter()
            .enumerate()
            .max_by(|(_, x), (_, y)| x.cmp(y))
            .expect("nonempty group");
        best_per_len.insert(len.clone(), (mu_max.clone(), group[arg].clone()));
    }

    let mut max_ratio: Option<MaxRatio> = None;
    for (len, (mu, iv)) in &best_per_len {
        let pow = pow_enclosure(len, s, &eps)?;
        let ratio = Enclosure::exact(mu.clone()).div(&pow).expect("|B|^s > 0");
        let better = match &max_ratio {
            None => true,
            Some(m) => ratio.lo > m.ratio.lo,
        };
        if better {
            max_ratio = Some(MaxRatio {
                interval: iv.clone(),
                ratio,
            });
        }
    }

    Ok(MdpReport {
        s: s.clone(),
        n0,
        precondition_ok,
        a,
        checked,
        out_of_scope,
        failures,
        verdict: precondition_ok && failures == 0,
        max_ratio,
    })
}
