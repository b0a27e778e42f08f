//! Cross-module property tests: containment and exactness of the rigorous
//! arithmetic against independent oracles, structural invariants of builds,
//! and the construction-level inequalities checked at desk scale.

mod common;

use std::collections::BTreeMap;

use common::{all_flavors, random_schedule, rat_ceil_u64, unit_interval};
use gencantor::cantor::{build, intersect_schedules, BuildOptions, CantorSchedule, NoRemovals};
use gencantor::certify::{certify_nonempty, check_dimension_condition, t_sequence};
use gencantor::littlewood::{enumerate_candidates, DSequence, Instance, InstanceParams, Variant};
use gencantor::local::{build_measure, check_distribution, verify_additivity, LocalSchedule};
use gencantor::rigor::{
    log_enclosure, log_star_enclosure, parse_rat, rat_pow2, CertifiedReal, Enclosure, Precision,
    Rat,
};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

// ---------------------------------------------------------------------
// independent logarithm oracle: Mercator series with an explicit tail,
// computed in exact rational arithmetic (no dyadic machinery shared with
// the implementation), anchored at a frozen 55-digit ln 2 bracket
// ---------------------------------------------------------------------

fn ln2_reference() -> (Rat, Rat) {
    (
        parse_rat("6931471805599453094172321214581765680755001343602552541/10000000000000000000000000000000000000000000000000000000").unwrap(),
        parse_rat("6931471805599453094172321214581765680755001343602552542/10000000000000000000000000000000000000000000000000000000").unwrap(),
    )
}

/// Brackets ln(x) for rational x > 0 via ln(x) = k ln2 + ln(1 + t) with
/// |t| <= 1/3 and |tail after N terms| <= |t|^(N+1) / ((N+1)(1 - |t|)).
fn oracle_ln(x: &Rat, terms: usize) -> (Rat, Rat) {
    assert!(x > &Rat::zero());
    let (ln2_lo, ln2_hi) = ln2_reference();
    let mut k: i64 = 0;
    let mut m = x.clone();
    let four_thirds = parse_rat("4/3").unwrap();
    let two_thirds = parse_rat("2/3").unwrap();
    while m > four_thirds {
        m /= Rat::from_integer(2.into());
        k += 1;
    }
    while m < two_thirds {
        m *= Rat::from_integer(2.into());
        k -= 1;
    }
    let t = &m - Rat::one();
    let mut sum = Rat::zero();
    let mut pow = Rat::one();
    for j in 1..=terms {
        pow *= &t;
        let term = &pow / Rat::from_integer((j as i64).into());
        if j % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let abs_t = if t.is_negative() {
        -t.clone()
    } else {
        t.clone()
    };
    let tail = {
        let mut p = Rat::one();
        for _ in 0..=terms {
            p *= &abs_t;
        }
        p / (Rat::from_integer((terms as i64 + 1).into()) * (Rat::one() - &abs_t))
    };
    let (series_lo, series_hi) = (&sum - &tail, &sum + &tail);
    if k >= 0 {
        let kr = Rat::from_integer(k.into());
        (&kr * &ln2_lo + series_lo, kr * ln2_hi + series_hi)
    } else {
        let kr = Rat::from_integer(k.into());
        (&kr * &ln2_hi + series_lo, kr * ln2_lo + series_hi)
    }
}

/// Naive big-fraction arithmetic for the exactness oracle: no reduction,
/// comparisons by cross-multiplication.
#[derive(Clone, Debug)]
struct NaiveFrac {
    n: BigInt,
    d: BigInt,
}

impl NaiveFrac {
    fn new(n: i64, d: i64) -> Self {
        assert!(d != 0);
        let (n, d) = if d < 0 { (-n, -d) } else { (n, d) };
        NaiveFrac {
            n: n.into(),
            d: d.into(),
        }
    }
    fn add(&self, o: &NaiveFrac) -> NaiveFrac {
        NaiveFrac {
            n: &self.n * &o.d + &o.n * &self.d,
            d: &self.d * &o.d,
        }
    }
    fn sub(&self, o: &NaiveFrac) -> NaiveFrac {
        NaiveFrac {
            n: &self.n * &o.d - &o.n * &self.d,
            d: &self.d * &o.d,
        }
    }
    fn mul(&self, o: &NaiveFrac) -> NaiveFrac {
        NaiveFrac {
            n: &self.n * &o.n,
            d: &self.d * &o.d,
        }
    }
    fn div(&self, o: &NaiveFrac) -> Option<NaiveFrac> {
        if o.n.is_zero() {
            return None;
        }
        let (n, d) = (&self.n * &o.d, &self.d * &o.n);
        Some(if d.is_negative() {
            NaiveFrac { n: -n, d: -d }
        } else {
            NaiveFrac { n, d }
        })
    }
    fn to_rat(&self) -> Rat {
        Rat::new(self.n.clone(), self.d.clone())
    }
    fn cmp(&self, o: &NaiveFrac) -> std::cmp::Ordering {
        (&self.n * &o.d).cmp(&(&o.n * &self.d))
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        .. ProptestConfig::default()
    })]

    /// Containment: the reference logarithm lies inside every enclosure.
    #[test]
    fn log_enclosure_contains_reference(num in 1i64..1_000_000, den in 1i64..1_000_000, eps_exp in 3u32..40) {
        let x = Rat::new(num.into(), den.into());
        let eps = rat_pow2(-(eps_exp as i64));
        let enc = log_enclosure(&x, &eps).unwrap();
        prop_assert!(enc.width() <= eps, "width contract");
        let (lo, hi) = oracle_ln(&x, 80);
        prop_assert!(lo <= hi);
        prop_assert!(enc.lo <= hi && lo <= enc.hi, "disjoint from oracle bracket");
    }

    /// Width contract and monotonicity of the modified logarithm.
    #[test]
    fn log_star_monotone(a in 0i64..100_000, b in 0i64..100_000, den in 1i64..1000) {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let x = Rat::new(a.into(), den.into());
        let y = Rat::new(b.into(), den.into());
        let eps = parse_rat("1/1000").unwrap();
        let fx = log_star_enclosure(&x, &eps).unwrap();
        let fy = log_star_enclosure(&y, &eps).unwrap();
        prop_assert!(fx.lo <= fy.hi, "log* must be nondecreasing");
        prop_assert!(fx.lo >= Rat::one());
    }

    /// Exactness: rational arithmetic agrees with the naive big-fraction
    /// oracle.
    #[test]
    fn rational_arithmetic_matches_naive_oracle(
        an in -1000i64..1000, ad in 1i64..1000,
        bn in -1000i64..1000, bd in 1i64..1000,
    ) {
        let a = NaiveFrac::new(an, ad);
        let b = NaiveFrac::new(bn, bd);
        let ra = a.to_rat();
        let rb = b.to_rat();
        prop_assert_eq!(a.add(&b).to_rat(), &ra + &rb);
        prop_assert_eq!(a.sub(&b).to_rat(), &ra - &rb);
        prop_assert_eq!(a.mul(&b).to_rat(), &ra * &rb);
        if let Some(q) = a.div(&b) {
            prop_assert_eq!(q.to_rat(), &ra / &rb);
        }
        prop_assert_eq!(a.cmp(&b), ra.cmp(&rb));
    }

    /// Counting inequality: every built level satisfies
    /// #J_{n+1} >= R_n #J_n - sum_k r_{k,n} #J_k, with exact integers.
    #[test]
    fn counting_inequality_holds(seed in 0u64..500) {
        let mut rng = StdRng::seed_from_u64(seed);
        let schedule = random_schedule(&mut rng, 5, 5, seed % 2 == 1);
        let depth = schedule.max_depth();
        for adversary in all_flavors(seed) {
            let out = build(&schedule, &adversary, depth, &BuildOptions::default()).unwrap();
            let counts = out.counts();
            for n in 0..counts.len() - 1 {
                let mut rhs = Rat::from_integer((schedule.branch(n as u32).unwrap() as i64).into())
                    * Rat::from_integer((counts[n] as i64).into());
                for k in 0..=n {
                    let budget = schedule.budget(k as u32, n as u32);
                    if let Some(v) = budget.as_exact() {
                        rhs -= v * Rat::from_integer((counts[k] as i64).into());
                    }
                }
                let lhs = Rat::from_integer((counts[n + 1] as i64).into());
                prop_assert!(lhs >= rhs, "level {}: {} < {}", n + 1, lhs, rhs);
            }
            // nesting and exact lengths
            for n in 0..counts.len() {
                out.levels[n]
                    .validate(
                        &schedule.level_length(n as u32).unwrap(),
                        (n > 0).then(|| &out.levels[n - 1]),
                    )
                    .unwrap();
            }
            // ledger soundness: replaying recorded counts never exceeds budgets
            for ledger in &out.ledgers {
                for entry in &ledger.entries {
                    let budget = schedule.budget(entry.stratum, ledger.level);
                    let ok = budget
                        .decide_ge(&Rat::from_integer(entry.count.into()), &Precision::default_cap())
                        .unwrap();
                    prop_assert!(ok);
                    prop_assert_eq!(entry.within_budget, Some(true));
                }
            }
        }
    }

    /// The certified growth bound holds level by level: #J_n >= t_{n-1} #J_{n-1}.
    #[test]
    fn per_level_growth_bound(seed in 0u64..300) {
        let mut rng = StdRng::seed_from_u64(seed ^ 0xabcdef);
        let schedule = random_schedule(&mut rng, 6, 5, false);
        let depth = schedule.max_depth();
        let ts = t_sequence(&schedule, depth - 1, &Precision::default_cap()).unwrap();
        if ts.first_nonpositive.is_some() {
            return Ok(());
        }
        for adversary in all_flavors(seed) {
            let out = build(&schedule, &adversary, depth, &BuildOptions::default()).unwrap();
            let counts = out.counts();
            for n in 1..counts.len() {
                let bound = &ts.values[n - 1].lo * Rat::from_integer((counts[n - 1] as i64).into());
                prop_assert!(
                    Rat::from_integer((counts[n] as i64).into()) >= bound,
                    "#J_{} = {} < t_{} * #J_{}",
                    n, counts[n], n - 1, n - 1
                );
            }
        }
    }

    /// Measure additivity on randomized extracted families.
    #[test]
    fn measure_additivity(seed in 0u64..200) {
        let mut rng = StdRng::seed_from_u64(seed ^ 0x5ca1e);
        let schedule = random_schedule(&mut rng, 5, 5, false);
        let depth = schedule.max_depth();
        let adversary = &all_flavors(seed)[(seed % 5) as usize];
        let out = build(&schedule, adversary, depth, &BuildOptions::default()).unwrap();
        if out.empty_from.is_some() {
            return Ok(());
        }
        // the measure lives on local families: extract first (random
        // schedules may legitimately fail extraction)
        let local = LocalSchedule::from_base(&schedule);
        let Ok(extraction) = gencantor::local::extract_local(
            &out,
            &local,
            &gencantor::local::ExtractOptions::default(),
        ) else {
            return Ok(());
        };
        let table = build_measure(&extraction.levels).unwrap();
        verify_additivity(&extraction.levels, &table).unwrap();
        prop_assert_eq!(table.weights[0][0].value.clone(), Rat::one());
    }
}

// ---------------------------------------------------------------------
// exhaustive non-emptiness oracle on a tiny schedule: every budget-respecting
// deletion pattern is enumerated and compared against the certificate bound
// ---------------------------------------------------------------------

#[test]
fn exhaustive_tiny_schedule_respects_certificate() {
    // R = (3, 3), r_{0,0} = 1, r_{0,1} = 1, r_{1,1} = 1
    let mut budgets = BTreeMap::new();
    budgets.insert((0u32, 0u32), CertifiedReal::exact(Rat::one()));
    budgets.insert((0u32, 1u32), CertifiedReal::exact(Rat::one()));
    budgets.insert((1u32, 1u32), CertifiedReal::exact(Rat::one()));
    let schedule = CantorSchedule::new(unit_interval(), vec![3, 3], budgets).unwrap();
    let cert = certify_nonempty(&schedule, 1, &Precision::default_cap()).unwrap();
    assert!(cert.verdict);
    // t_0 = 2, t_1 = 3 - 1 - 1/2 = 3/2
    assert_eq!(cert.t_values[0], Enclosure::exact(parse_rat("2").unwrap()));
    assert_eq!(
        cert.t_values[1],
        Enclosure::exact(parse_rat("3/2").unwrap())
    );

    // enumerate every deletion pattern: level 1 has 3 candidates, up to 1
    // removed (stratum 0); level 2 has 3 * #J_1 candidates, per J_1 parent
    // up to 1 at stratum 1 and in total up to 1 charged to the root
    let mut min_final = usize::MAX;
    for kill1 in 0..=3usize {
        // kill1 = 3 means "no deletion"; otherwise delete candidate kill1-1
        let j1 = if kill1 == 0 { 3 } else { 2 };
        let _ = j1;
        let level1_kept: Vec<usize> = (0..3).filter(|&i| kill1 == 0 || i != kill1 - 1).collect();
        // enumerate per-parent diagonal deletions (at most 1 child each) and
        // at most one extra deletion charged to the root
        let parents = level1_kept.len();
        let diag_choices = (parents as u32).pow(0) as usize; // placeholder
        let _ = diag_choices;
        let mut diag_patterns: Vec<Vec<Option<usize>>> = vec![vec![None; parents]];
        for p in 0..parents {
            let mut next = Vec::new();
            for pat in &diag_patterns {
                for choice in [None, Some(0), Some(1), Some(2)] {
                    let mut np = pat.clone();
                    np[p] = choice;
                    next.push(np);
                }
            }
            diag_patterns = next;
        }
        for pat in &diag_patterns {
            // root-stratum deletion: any remaining candidate or none
            for root_kill in 0..=(3 * parents) {
                let mut kept = 0usize;
                let mut used = vec![[false; 3]; parents];
                for (p, choice) in pat.iter().enumerate() {
                    if let Some(c) = choice {
                        used[p][*c] = true;
                    }
                }
                if root_kill > 0 {
                    let idx = root_kill - 1;
                    let (p, c) = (idx / 3, idx % 3);
                    if used[p][c] {
                        continue; // already deleted diagonally; invalid double kill
                    }
                    used[p][c] = true;
                }
                for p in 0..parents {
                    kept += (0..3).filter(|&c| !used[p][c]).count();
                }
                min_final = min_final.min(kept);
            }
        }
    }
    // ceil(t_0 * t_1) = ceil(3) = 3
    let bound = rat_ceil_u64(&cert.survivor_lower_bounds[2].lo) as usize;
    assert_eq!(bound, 3);
    assert!(
        min_final >= bound,
        "exhaustive minimum {min_final} beats the certified bound {bound}"
    );
}

// ---------------------------------------------------------------------
// schedule-level checks for the sieve instances
// ---------------------------------------------------------------------

/// The dimension condition for the bounded-variant schedule holds for every
/// n <= 1000
/// at R = 2^18 > e^12 (the budget chain needs only R > e^9).
#[test]
fn dimension_condition_bounded_to_depth_1000() {
    let inst = Instance::new(InstanceParams::new(
        Variant::Prop1,
        DSequence::constant(2).unwrap(),
        1 << 18,
        rat_pow2(-27),
        rat_pow2(-80),
    ))
    .unwrap();
    let horizon = 1000u32;
    let schedule = inst.schedule_for(horizon + 1).unwrap();
    let cert = check_dimension_condition(&schedule, horizon, &Precision::default_cap()).unwrap();
    assert!(cert.verdict, "first failure at {:?}", cert.first_failure);
    let ts = t_sequence(&schedule, 50, &Precision::default_cap()).unwrap();
    assert!(ts.first_nonpositive.is_none());
}

/// Same for the doubling-variant schedule; its budget chain needs R > e^9,
/// and 2^14 = 16384 > e^9 = 8103.08...
#[test]
fn dimension_condition_doubling_to_depth_1000() {
    let inst = Instance::new(InstanceParams::new(
        Variant::Prop2,
        DSequence::doubling(),
        1 << 14,
        rat_pow2(-27),
        rat_pow2(-80),
    ))
    .unwrap();
    let horizon = 1000u32;
    let schedule = inst.schedule_for(horizon + 1).unwrap();
    let cert = check_dimension_condition(&schedule, horizon, &Precision::default_cap()).unwrap();
    assert!(cert.verdict, "first failure at {:?}", cert.first_failure);
}

/// Composition: k summed copies still pass the dimension condition when
/// R > k e^12, checked for k = 2 and 3.
#[test]
fn summed_budgets_pass_dimension_condition_for_k_2_and_3() {
    let precision = Precision::default_cap();
    for (k, r, c1, c) in [(2usize, 1u64 << 19, -28i64, -82i64), (3, 1 << 20, -29, -84)] {
        let inst = Instance::new(InstanceParams::new(
            Variant::Prop1,
            DSequence::constant(2).unwrap(),
            r,
            rat_pow2(c1),
            rat_pow2(c),
        ))
        .unwrap();
        let horizon = 80u32;
        let schedule = inst.schedule_for(horizon + 1).unwrap();
        let copies: Vec<CantorSchedule> = (0..k).map(|_| schedule.clone()).collect();
        let joint = intersect_schedules(&copies).unwrap();
        let cert = check_dimension_condition(&joint, horizon, &precision).unwrap();
        assert!(
            cert.verdict,
            "k = {k}: first failure {:?}",
            cert.first_failure
        );
    }
}

// ---------------------------------------------------------------------
// littlewood structural properties on enumerated candidates
// ---------------------------------------------------------------------

/// Separation within one (k, l) stratum: distinct candidate VALUES x1, x2
/// satisfy |x1 - x2| >= (H1 H2)^(-1/2); and the f lower bound
/// f(q) >= n (log* n)^2 / 2 holds for every enumerated candidate at valid
/// parameters.
#[test]
fn stratum_separation_and_f_lower_bound() {
    // f lower bound at valid parameters: f(q) >= n (log* n)^2 / 2
    let inst = Instance::new(InstanceParams::new(
        Variant::Prop1,
        DSequence::constant(2).unwrap(),
        1 << 18,
        rat_pow2(-27),
        rat_pow2(-80),
    ))
    .unwrap();
    let root = inst.params().root.clone();
    let cands = enumerate_candidates(&inst, 1, &root).unwrap();
    assert!(!cands.is_empty());
    let bound = Rat::new(1.into(), 2.into());
    for c in &cands {
        let f = inst.params().variant.f_value(&c.q, &rat_pow2(-20)).unwrap();
        assert!(f.lo >= bound || f.hi >= bound, "f({}) too small", c.q);
        assert!(f.lo >= Rat::one(), "f >= 1 always");
    }

    // separation needs distinct candidate values near the window: the
    // experimental-scale instance has them at level 2
    let inst = Instance::new(InstanceParams::new(
        Variant::Prop1,
        DSequence::constant(2).unwrap(),
        16,
        parse_rat("1/16").unwrap(),
        parse_rat("1/1024").unwrap(),
    ))
    .unwrap();
    let root = inst.params().root.clone();
    let cands = enumerate_candidates(&inst, 2, &root).unwrap();

    // group by (k, stratum) and compare distinct values pairwise
    let mut groups: BTreeMap<(u32, u32), Vec<&gencantor::littlewood::RationalCandidate>> =
        BTreeMap::new();
    for c in &cands {
        groups.entry((c.k, c.stratum)).or_default().push(c);
    }
    let mut pairs_checked = 0u32;
    for members in groups.values() {
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                let xa = a.center();
                let xb = b.center();
                if xa == xb {
                    continue;
                }
                let diff = if xa > xb { &xa - &xb } else { &xb - &xa };
                // |x1 - x2|^2 >= 1/(H1 H2), exactly
                let lhs = &diff * &diff;
                let rhs = Rat::one() / Rat::from_integer(&a.height * &b.height);
                assert!(lhs >= rhs, "{}/{} vs {}/{}", a.r, a.q, b.r, b.q);
                pairs_checked += 1;
            }
        }
    }
    assert!(pairs_checked > 0);
}

/// Ubiquity on the boundary schedule: a zero-removal T family
/// meets every built level, and the DP-exhaustive adversarial T cannot dodge
/// the survivors.
#[test]
fn distribution_check_with_exhaustive_adversary() {
    let depth = 6u32;
    let mut budgets = BTreeMap::new();
    for n in 0..depth {
        budgets.insert((n, n), CertifiedReal::exact(Rat::one()));
    }
    let schedule = CantorSchedule::new(unit_interval(), vec![4; depth as usize], budgets).unwrap();
    let out = build(
        &schedule,
        &gencantor::cantor::MiddleChildren { count: 1 },
        depth,
        &BuildOptions::default(),
    )
    .unwrap();

    // zero-removal T: h(n) = #J_n
    let local = LocalSchedule::from_base(&schedule);
    let t_frame = local.complementary_schedule().unwrap();
    let t_full = build(&t_frame, &NoRemovals, depth, &BuildOptions::default()).unwrap();
    let report = check_distribution(&out.levels, &t_full.levels, schedule.branching()).unwrap();
    assert!(report.all_nonempty);
    assert!(report.growth_ok);
    for (n, h) in report.h.iter().enumerate() {
        assert_eq!(*h as usize, out.levels[n].len());
    }

    // DP over the full 4-ary grid: min over all T (keeping exactly s = 2
    // children per node) of #(T_n ∩ J_n), per target level n
    for target in 1..=depth {
        let min_h = min_overlap_dp(&out, target, 4, 2);
        assert!(min_h >= 1, "an adversarial T dodges J at level {target}");
    }
}

/// DP: minimal possible #(T_target ∩ J_target) over all local T families
/// keeping exactly `keep` of `branch` children per node.
fn min_overlap_dp(
    out: &gencantor::cantor::BuildOutput,
    target: u32,
    branch: u64,
    keep: usize,
) -> u64 {
    use gencantor::rigor::ClosedInterval;
    // g(level, interval) = min overlap contribution of the subtree
    fn g(
        out: &gencantor::cantor::BuildOutput,
        level: u32,
        target: u32,
        iv: &ClosedInterval,
        branch: u64,
        keep: usize,
    ) -> u64 {
        if level == target {
            return out.levels[target as usize]
                .find_by_left(&iv.left)
                .map(|_| 1)
                .unwrap_or(0);
        }
        let width = iv.length() / Rat::from_integer((branch as i64).into());
        let mut child_costs: Vec<u64> = (0..branch)
            .map(|i| {
                let left = &iv.left + &width * Rat::from_integer((i as i64).into());
                let right = &left + &width;
                let child = ClosedInterval::new(left, right);
                g(out, level + 1, target, &child, branch, keep)
            })
            .collect();
        child_costs.sort();
        child_costs.iter().take(keep).sum()
    }
    let root = out.levels[0].intervals[0].clone();
    g(out, 0, target, &root, branch, keep)
}

/// Per-candidate kill bound: one exclusion interval can strike at most
/// |Delta| / |I_{n+1}| + 2 children, and the strata counts stay within
/// their logarithmic bounds.
#[test]
fn kill_counts_and_strata_bounds() {
    use gencantor::littlewood::{delta_interval, DeltaRounding};
    use gencantor::rigor::{log_enclosure, log_star_enclosure};

    let inst = Instance::new(InstanceParams::new(
        Variant::Prop1,
        DSequence::constant(2).unwrap(),
        16,
        parse_rat("1/16").unwrap(),
        parse_rat("1/1024").unwrap(),
    ))
    .unwrap();
    let root = inst.params().root.clone();
    for n in [1u32, 2] {
        let cands = enumerate_candidates(&inst, n, &root).unwrap();
        assert!(!cands.is_empty());
        let branch = inst.level_r(n).unwrap();
        for c in &cands {
            let delta = delta_interval(c, &inst, DeltaRounding::Outer).unwrap();
            // count the children of the root-level window the interval meets
            let width = root.length() / Rat::from_integer((branch as i64).into());
            let mut killed = 0u64;
            for i in 0..branch {
                let left = &root.left + &width * Rat::from_integer((i as i64).into());
                let child = gencantor::rigor::ClosedInterval::new(left.clone(), &left + &width);
                if delta.meets(&child) {
                    killed += 1;
                }
            }
            let bound = delta.length() / &width + Rat::from_integer(2.into());
            assert!(
                Rat::from_integer(killed.into()) <= bound,
                "candidate {}/{} kills {} children, bound {}",
                c.r,
                c.q,
                killed,
                bound
            );
        }

        // stratum bound: l <= ceil(c3 log* n) with c3 = 2 + ln R
        let eps = rat_pow2(-20);
        let c3 = log_enclosure(&Rat::from_integer(16.into()), &eps)
            .unwrap()
            .shift(&parse_rat("2").unwrap());
        let ls = log_star_enclosure(&Rat::from_integer((n as i64).into()), &eps).unwrap();
        let l_bound = c3.mul(&ls);
        let max_l = cands.iter().map(|c| c.stratum).max().unwrap();
        assert!(
            Rat::from_integer((max_l as i64).into()) <= l_bound.hi.ceil(),
            "stratum {} exceeds ceil(c3 log* n) <= {}",
            max_l,
            l_bound.hi
        );

        // k-count bound: the number of nonempty divisibility strata is at
        // most c2 n log* n with c2 = (ln R + 2)/ln 2
        let c2 = c3
            .div(&gencantor::rigor::ln2_enclosure(&eps).unwrap())
            .unwrap();
        let mut ks: Vec<u32> = cands.iter().map(|c| c.k).collect();
        ks.sort();
        ks.dedup();
        let k_bound = c2.scale(&Rat::from_integer((n as i64).into())).mul(&ls);
        assert!(
            Rat::from_integer((ks.len() as i64).into()) <= k_bound.hi.ceil(),
            "{} strata exceed c2 n log* n <= {}",
            ks.len(),
            k_bound.hi
        );
    }
}

/// A schedule violating the dimension condition admits an adversarial T
/// with h(n) = 0,
/// reported as a hypothesis-violation witness.
#[test]
fn oversized_budgets_admit_a_dodging_t() {
    // R = 4 with oversized diagonal budget 3: J keeps only the leftmost
    // child; T keeps the two rightmost children: empty intersection at
    // level 1
    let mut budgets = BTreeMap::new();
    budgets.insert((0u32, 0u32), CertifiedReal::exact(parse_rat("3").unwrap()));
    let schedule = CantorSchedule::new(unit_interval(), vec![4], budgets).unwrap();
    let cond = check_dimension_condition(&schedule, 0, &Precision::default_cap()).unwrap();
    assert!(
        !cond.verdict,
        "3 > R/4 = 1 must fail the dimension condition"
    );

    let keep_left = gencantor::cantor::ScriptedRule {
        per_level: [(0u32, vec![(1usize, 0u32), (2usize, 0u32), (3usize, 0u32)])]
            .into_iter()
            .collect(),
    };
    let j = build(&schedule, &keep_left, 1, &BuildOptions::default()).unwrap();

    let mut t_budgets = BTreeMap::new();
    t_budgets.insert((0u32, 0u32), CertifiedReal::exact(parse_rat("2").unwrap()));
    let t_frame = CantorSchedule::new(unit_interval(), vec![4], t_budgets).unwrap();
    let keep_right = gencantor::cantor::ScriptedRule {
        per_level: [(0u32, vec![(0usize, 0u32), (1usize, 0u32)])]
            .into_iter()
            .collect(),
    };
    let t = build(&t_frame, &keep_right, 1, &BuildOptions::default()).unwrap();

    let report = check_distribution(&j.levels, &t.levels, schedule.branching()).unwrap();
    assert!(!report.all_nonempty);
    assert_eq!(report.first_empty, Some(1));
}
