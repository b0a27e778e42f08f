//! Shared test machinery: budget-saturating adversaries and randomized
//! schedule generators.
#![allow(dead_code)]

use std::collections::BTreeMap;

use gencantor::cantor::{
    CantorError, CantorSchedule, Deletion, LevelCollection, RemovalContext, RemovalRule,
};
use gencantor::rigor::{rat_floor, CertifiedReal, ClosedInterval, Rat};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Clone, Copy, Debug)]
pub enum Flavor {
    Leftmost,
    Rightmost,
    Spread,
    Seeded(u64),
}

/// Deletes as many candidates as the budgets allow, stratum by stratum in
/// descending order, per-ancestor quota = floor(r_{m,n}).
pub struct SaturatingAdversary {
    pub flavor: Flavor,
}

fn ancestor_at(history: &[LevelCollection], from_level: u32, idx: usize, to_level: u32) -> usize {
    let mut level = from_level;
    let mut i = idx;
    while level > to_level {
        i = history[level as usize].parents[i];
        level -= 1;
    }
    i
}

impl RemovalRule for SaturatingAdversary {
    fn deletions(&self, ctx: &RemovalContext<'_>) -> Result<Vec<Deletion>, CantorError> {
        let n = ctx.level;
        let mut alive = vec![true; ctx.candidates.len()];
        let mut out = Vec::new();
        for m in (0..=n).rev() {
            let budget = ctx.schedule.budget(m, n);
            let Some(exact) = budget.as_exact().cloned() else {
                continue;
            };
            if exact <= Rat::zero() {
                continue;
            }
            let quota = rat_floor(&exact).to_u64().unwrap_or(0) as usize;
            if quota == 0 {
                continue;
            }
            // group alive candidates by their level-m ancestor
            let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (i, &p) in ctx.candidates.parents.iter().enumerate() {
                if alive[i] {
                    let anc = ancestor_at(ctx.history, n, p, m);
                    groups.entry(anc).or_default().push(i);
                }
            }
            for (anc, members) in groups {
                let take = quota.min(members.len());
                let victims: Vec<usize> = match self.flavor {
                    Flavor::Leftmost => members[..take].to_vec(),
                    Flavor::Rightmost => members[members.len() - take..].to_vec(),
                    Flavor::Spread => members
                        .iter()
                        .step_by((members.len() / take.max(1)).max(1))
                        .take(take)
                        .copied()
                        .collect(),
                    Flavor::Seeded(seed) => {
                        let mut rng = StdRng::seed_from_u64(
                            seed ^ (n as u64) << 32 ^ (m as u64) << 16 ^ anc as u64,
                        );
                        let mut pool = members.clone();
                        let mut picked = Vec::with_capacity(take);
                        for _ in 0..take {
                            let j = rng.gen_range(0..pool.len());
                            picked.push(pool.swap_remove(j));
                        }
                        picked.sort();
                        picked
                    }
                };
                for i in victims {
                    alive[i] = false;
                    out.push(Deletion {
                        child: i,
                        stratum: m,
                    });
                }
            }
        }
        out.sort_by_key(|d| d.child);
        Ok(out)
    }
}

pub fn all_flavors(seed: u64) -> Vec<SaturatingAdversary> {
    vec![
        SaturatingAdversary {
            flavor: Flavor::Leftmost,
        },
        SaturatingAdversary {
            flavor: Flavor::Rightmost,
        },
        SaturatingAdversary {
            flavor: Flavor::Spread,
        },
        SaturatingAdversary {
            flavor: Flavor::Seeded(seed),
        },
        SaturatingAdversary {
            flavor: Flavor::Seeded(seed.wrapping_mul(0x9e3779b97f4a7c15)),
        },
    ]
}

pub fn unit_interval() -> ClosedInterval {
    ClosedInterval::new(Rat::zero(), Rat::one())
}

/// A random schedule with R_n <= max_r. `heavy` biases budgets toward
/// values that kill the t-recursion.
pub fn random_schedule(
    rng: &mut StdRng,
    max_r: u64,
    max_depth: u32,
    heavy: bool,
) -> CantorSchedule {
    let depth = rng.gen_range(2..=max_depth);
    let branching: Vec<u64> = (0..depth).map(|_| rng.gen_range(2..=max_r)).collect();
    let mut budgets = BTreeMap::new();
    for n in 0..depth {
        let r = branching[n as usize];
        if rng.gen_bool(0.9) {
            let hi = if heavy { r + 1 } else { r / 2 } as i64;
            let num = rng.gen_range(0..=2 * hi.max(1));
            let value = Rat::new(num.into(), 2.into());
            if value > Rat::zero() {
                budgets.insert((n, n), CertifiedReal::exact(value));
            }
        }
        for m in 0..n {
            if rng.gen_bool(if heavy { 0.4 } else { 0.25 }) {
                let hi = if heavy { r } else { (r / 3).max(1) } as i64;
                let num = rng.gen_range(0..=2 * hi);
                let value = Rat::new(num.into(), 2.into());
                if value > Rat::zero() {
                    budgets.insert((m, n), CertifiedReal::exact(value));
                }
            }
        }
    }
    CantorSchedule::new(unit_interval(), branching, budgets).unwrap()
}

/// A random schedule satisfying the dimension condition with R_n in
/// {4..=8}, depth
/// adapted so the full build stays small.
pub fn random_dimension_schedule(rng: &mut StdRng) -> CantorSchedule {
    loop {
        let mut depth = rng.gen_range(3..=7u32);
        let mut branching = Vec::new();
        let mut product: u64 = 1;
        for _ in 0..depth {
            let r = rng.gen_range(4..=8u64);
            if product.saturating_mul(r) > 60_000 {
                break;
            }
            product *= r;
            branching.push(r);
        }
        depth = branching.len() as u32;
        if depth < 2 {
            continue;
        }
        let mut budgets = BTreeMap::new();
        for n in 0..depth {
            let r = branching[n as usize] as i64;
            // diagonal at most R/4 keeps the dimension condition in easy reach
            let num = rng.gen_range(0..=r / 2);
            if num > 0 {
                budgets.insert((n, n), CertifiedReal::exact(Rat::new(num.into(), 2.into())));
            }
            if n >= 1 && rng.gen_bool(0.5) {
                let num = rng.gen_range(0..=r);
                if num > 0 {
                    budgets.insert(
                        (n - 1, n),
                        CertifiedReal::exact(Rat::new(num.into(), 2.into())),
                    );
                }
            }
        }
        let schedule = CantorSchedule::new(unit_interval(), branching, budgets).unwrap();
        let cert = gencantor::certify::check_dimension_condition(
            &schedule,
            depth - 1,
            &gencantor::rigor::Precision::default_cap(),
        )
        .unwrap();
        if cert.verdict {
            return schedule;
        }
    }
}

/// Ceil of a positive rational as u64 (saturating).
pub fn rat_ceil_u64(x: &Rat) -> u64 {
    if x.is_negative() {
        return 0;
    }
    gencantor::rigor::rat_ceil(x).to_u64().unwrap_or(u64::MAX)
}
