//! Executable checks of the archiver properties over recorded trajectories,
//! the optimal-approximation test, and limit experiments.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::archivers::{same_archive, Archiver, ArchiverConfig, Trajectory};
use crate::dominance::{
    better_unchecked, canonical, check_set, distinct, is_minimal_unchecked, minimal_unchecked, ObjectiveVector,
};
use crate::error::{usage, Result};
use crate::indicators::IndicatorSpec;

/// Witness lists are truncated to this many entries; `count` keeps the
/// full tally.
pub const MAX_WITNESSES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    ParetoSubset,
    PointMonotone,
    SetMonotone,
    Lemma1Monotone,
    Lemma2NoRevisit,
}

impl Property {
    pub const ANYTIME: [Property; 3] = [Property::ParetoSubset, Property::PointMonotone, Property::SetMonotone];

    pub fn name(self) -> &'static str {
        match self {
            Property::ParetoSubset => "pareto_subset",
            Property::PointMonotone => "point_monotone",
            Property::SetMonotone => "set_monotone",
            Property::Lemma1Monotone => "lemma1_monotone",
            Property::Lemma2NoRevisit => "lemma2_no_revisit",
        }
    }
}

/// Concrete evidence of a violation. Timesteps index trajectory snapshots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `archived` is a nondominated member of `A^(t)` dominated by the
    /// already-seen `dominated_by`.
    ParetoSubset { t: usize, archived: ObjectiveVector, dominated_by: ObjectiveVector },
    /// `earlier ∈ min A^(t)` dominates `later ∈ min A^(t_later)`.
    PointMonotone { t: usize, t_later: usize, earlier: ObjectiveVector, later: ObjectiveVector },
    /// `A^(t)` is better than `A^(t_later)`.
    SetMonotone { t: usize, t_later: usize },
    /// The indicator got worse from `t` to `t + 1`.
    Lemma1 { t: usize, before: f64, after: f64 },
    /// `A^(t)` differs from `A^(t_changed)` but reappears at `t_revisit`.
    Lemma2 { t: usize, t_changed: usize, t_revisit: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub property: Property,
    /// Total number of witnesses found.
    pub count: usize,
    /// The first [`MAX_WITNESSES`] witnesses, in discovery order.
    pub witnesses: Vec<Witness>,
}

impl ViolationReport {
    fn new(property: Property) -> Self {
        Self { property, count: 0, witnesses: Vec::new() }
    }

    fn add(&mut self, w: Witness) {
        self.count += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(w);
        }
    }

    pub fn held(&self) -> bool {
        self.count == 0
    }
}

/// Scans a trajectory for Pareto-subset, point-monotone and set-monotone
/// violations. Returns one report per property, in that order.
pub fn check_anytime(trajectory: &Trajectory) -> Result<Vec<ViolationReport>> {
    if trajectory.snapshots.is_empty() {
        return usage("trajectory must hold at least the empty snapshot");
    }
    let mins: Vec<Vec<ObjectiveVector>> =
        trajectory.snapshots.iter().map(|s| distinct(&minimal_unchecked(s))).collect();

    let mut pareto = ViolationReport::new(Property::ParetoSubset);
    // Something seen dominates `a` iff something in the nondominated part
    // of the seen set does.
    let mut seen_front: Vec<ObjectiveVector> = Vec::new();
    for (t, min) in mins.iter().enumerate() {
        for s in &trajectory.arrivals[t] {
            if !seen_front.iter().any(|y| y.wdom(s)) {
                seen_front.retain(|y| !s.dom(y));
                seen_front.push(s.clone());
            }
        }
        for a in min {
            if let Some(y) = seen_front.iter().find(|y| y.dom(a)) {
                pareto.add(Witness::ParetoSubset { t, archived: a.clone(), dominated_by: y.clone() });
            }
        }
    }

    let mut point = ViolationReport::new(Property::PointMonotone);
    let mut set = ViolationReport::new(Property::SetMonotone);
    for t in 0..mins.len() {
        for t2 in (t + 1)..mins.len() {
            for a in &mins[t] {
                for b in &mins[t2] {
                    if a.dom(b) {
                        point.add(Witness::PointMonotone { t, t_later: t2, earlier: a.clone(), later: b.clone() });
                    }
                }
            }
            if !mins[t].is_empty() && !mins[t2].is_empty() && better_unchecked(&mins[t], &mins[t2]) {
                set.add(Witness::SetMonotone { t, t_later: t2 });
            }
        }
    }
    Ok(vec![pareto, point, set])
}

/// Checks the indicator-never-degrades and no-revisit lemmas on a
/// trajectory produced by the weakly-compliant-indicator archiver.
pub fn check_lemmas(trajectory: &Trajectory, indicator: &IndicatorSpec) -> Result<Vec<ViolationReport>> {
    let mut lemma1 = ViolationReport::new(Property::Lemma1Monotone);
    let mut prev: Option<f64> = None;
    for (t, snap) in trajectory.snapshots.iter().enumerate() {
        if snap.is_empty() {
            prev = None;
            continue;
        }
        let value = indicator.loss(snap)?;
        if let Some(before) = prev {
            if value > before {
                lemma1.add(Witness::Lemma1 { t: t - 1, before, after: value });
            }
        }
        prev = Some(value);
    }

    let mut lemma2 = ViolationReport::new(Property::Lemma2NoRevisit);
    let keys: Vec<Vec<ObjectiveVector>> = trajectory.snapshots.iter().map(|s| canonical(s)).collect();
    let mut last_seen: HashMap<&[ObjectiveVector], usize> = HashMap::new();
    for (t, key) in keys.iter().enumerate() {
        if let Some(&prev) = last_seen.get(key.as_slice()) {
            if prev + 1 < t {
                if let Some(changed) = (prev + 1..t).find(|&i| keys[i] != *key) {
                    lemma2.add(Witness::Lemma2 { t: prev, t_changed: changed, t_revisit: t });
                }
            }
        }
        last_seen.insert(key.as_slice(), t);
    }
    Ok(vec![lemma1, lemma2])
}

fn check_subset(a: &[ObjectiveVector], y: &[ObjectiveVector], n: usize) -> Result<()> {
    let d = check_set(y, "ground set")?;
    if a.iter().any(|x| x.dim() != d) {
        return usage("archive and ground set differ in dimension");
    }
    if n == 0 {
        return usage("capacity must be at least 1");
    }
    if a.len() > n {
        return usage(format!("archive holds {} solutions, capacity is {n}", a.len()));
    }
    if let Some(x) = a.iter().find(|x| !y.contains(x)) {
        return usage(format!("{x:?} is not in the ground set"));
    }
    Ok(())
}

fn is_nondominated_set(a: &[ObjectiveVector]) -> bool {
    !a.is_empty() && is_minimal_unchecked(a)
}

/// Whether `a` is an optimal approximation of bounded size `n` of the
/// Pareto front of `y`, via the structural characterisation: the distinct
/// members of `a` form a subset of the distinct Pareto front of `y` of size
/// `min(n, |front|)`. Repeated members count once.
pub fn is_optimal_approximation(a: &[ObjectiveVector], y: &[ObjectiveVector], n: usize) -> Result<bool> {
    check_subset(a, y, n)?;
    let a = &distinct(a);
    if !is_nondominated_set(a) {
        return Ok(false);
    }
    let front = distinct(&minimal_unchecked(y));
    Ok(a.iter().all(|x| front.contains(x)) && a.len() == n.min(front.len()))
}

/// Largest number of candidate subsets the brute-force optimality check
/// will enumerate.
pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;

/// Optimality by definition: no subset of `y` with at most `n` members is
/// better than the distinct members of `a`. Enumerates every such subset
/// of the distinct members of `y`.
pub fn is_optimal_approximation_brute_force(a: &[ObjectiveVector], y: &[ObjectiveVector], n: usize) -> Result<bool> {
    check_subset(a, y, n)?;
    let a = &distinct(a);
    if !is_nondominated_set(a) {
        return Ok(false);
    }
    let pool = distinct(y);
    let k_max = n.min(pool.len());
    let mut total: u64 = 0;
    for k in 1..=k_max {
        total = total.saturating_add(binomial(pool.len() as u64, k as u64));
    }
    if total > BRUTE_FORCE_LIMIT {
        return usage(format!("{total} subsets exceed the brute-force limit"));
    }
    let mut chosen = Vec::with_capacity(k_max);
    Ok(!any_better_subset(&pool, 0, k_max, &mut chosen, a))
}

fn any_better_subset(
    pool: &[ObjectiveVector],
    start: usize,
    left: usize,
    chosen: &mut Vec<ObjectiveVector>,
    a: &[ObjectiveVector],
) -> bool {
    if !chosen.is_empty() && better_unchecked(chosen, a) {
        return true;
    }
    if left == 0 {
        return false;
    }
    for i in start..pool.len() {
        chosen.push(pool[i].clone());
        let found = any_better_subset(pool, i + 1, left - 1, chosen, a);
        chosen.pop();
        if found {
            return true;
        }
    }
    false
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Outcome of a limit experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitVerdict {
    pub stabilized: bool,
    /// Draw count at which the archive last changed, when stabilized.
    pub stable_at: Option<usize>,
    /// `min(A)` is contained in the Pareto front of the ground set. Only
    /// meaningful when `stabilized`.
    pub is_pareto_subset: bool,
    /// Only meaningful when `stabilized`.
    pub is_optimal: bool,
    pub budget_exhausted: bool,
    pub draws: usize,
    pub final_archive: Vec<ObjectiveVector>,
}

/// Default stability window: `50 |Y|` draws.
pub fn default_stability_window(ground_len: usize) -> usize {
    50 * ground_len
}

/// Default draw budget: `10^4 |Y|`.
pub fn default_budget(ground_len: usize) -> usize {
    10_000 * ground_len
}

/// Feeds uniform draws from `ground` one at a time until the archive has
/// been unchanged for `stability_window` draws or `budget` draws are spent.
///
/// `config` is resolved against `ground`; the archiver's random generator
/// is seeded from both `config.rng_seed` and `seed`.
pub fn run_limit_experiment(
    config: &ArchiverConfig,
    ground: &[ObjectiveVector],
    seed: u64,
    stability_window: usize,
    budget: usize,
) -> Result<LimitVerdict> {
    let d = check_set(ground, "ground set")?;
    if stability_window < ground.len() {
        return usage(format!("stability window {stability_window} is shorter than the ground set ({})", ground.len()));
    }
    let mut resolved = config.resolve(ground)?;
    resolved.rng_seed = config.rng_seed ^ seed.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let capacity = resolved.capacity;
    let mut archiver = Archiver::new(resolved, d)?;
    let mut sampler = ChaCha8Rng::seed_from_u64(seed);

    let mut current = archiver.members();
    let mut last_change = 0usize;
    let mut draws = 0usize;
    let mut stabilized = false;
    while draws < budget {
        let s = &ground[sampler.gen_range(0..ground.len())];
        archiver.update(s)?;
        draws += 1;
        let next = archiver.members();
        if !same_archive(&current, &next) {
            current = next;
            last_change = draws;
        }
        if draws - last_change >= stability_window {
            stabilized = true;
            break;
        }
    }

    let front = distinct(&minimal_unchecked(ground));
    let archive_front = distinct(&minimal_unchecked(&current));
    let is_pareto_subset = !current.is_empty() && archive_front.iter().all(|a| front.contains(a));
    let is_optimal = match capacity {
        Some(n) if current.len() <= n => is_optimal_approximation(&current, ground, n)?,
        Some(_) => false,
        None => is_nondominated_set(&current) && distinct(&current) == front,
    };
    Ok(LimitVerdict {
        stabilized,
        stable_at: stabilized.then_some(last_change),
        is_pareto_subset,
        is_optimal,
        budget_exhausted: !stabilized,
        draws,
        final_archive: current,
    })
}
