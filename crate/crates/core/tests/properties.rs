mod common;

use std::collections::BTreeSet;

use moarchive::archivers::{same_archive, ArchiverKind, EpsMode, IdealPolicy, RefPolicy, Scalarizer, TiePolicy};
use moarchive::dominance::{distinct, set_weakly_dominates};
use moarchive::experiment::{classify, default_rows, run_experiment, to_json, ClassifyConfig, ExperimentConfig};
use moarchive::indicators::{hv_contribution, hypervolume, IndicatorChoice};
use moarchive::properties::{run_limit_experiment, Witness};
use moarchive::sequences::{order_and_batch, sample_ground_set, FrontSpec, OrderPolicy, Shape};
use moarchive::{
    better, check_anytime, check_lemmas, dominates, minimal_set, run_resolved, weakly_dominates, Archiver,
    ArchiverConfig, IndicatorKind, IndicatorSpec, ObjectiveVector, Sequence, Trajectory,
};
use proptest::prelude::*;

use common::ov;

fn point(d: usize, lo: i32, hi: i32) -> impl Strategy<Value = ObjectiveVector> {
    prop::collection::vec(lo..=hi, d).prop_map(|v| ov(&v.into_iter().map(f64::from).collect::<Vec<_>>()))
}

fn points(
    d: usize,
    n: std::ops::RangeInclusive<usize>,
    lo: i32,
    hi: i32,
) -> impl Strategy<Value = Vec<ObjectiveVector>> {
    prop::collection::vec(point(d, lo, hi), n)
}

/// A dimension and a one-at-a-time sequence of positive integer points.
fn sequence(max_len: usize) -> impl Strategy<Value = Sequence> {
    (2usize..=3).prop_flat_map(move |d| points(d, 1..=max_len, 1, 7)).prop_map(|s| Sequence::one_at_a_time(s).unwrap())
}

fn triple(d: usize) -> impl Strategy<Value = (ObjectiveVector, ObjectiveVector, ObjectiveVector)> {
    (point(d, 0, 3), point(d, 0, 3), point(d, 0, 3))
}

fn all_kinds() -> Vec<ArchiverConfig> {
    let mut rows = default_rows();
    rows.push(ArchiverConfig::new(ArchiverKind::Nsga2 { batch_native: true }, Some(2)).named("nsga2_batch"));
    rows.push(
        ArchiverConfig::new(
            ArchiverKind::IndicatorMu1 {
                indicator: IndicatorChoice::Named(IndicatorKind::Hypervolume),
                tie_policy: TiePolicy::UniformRandom,
                ref_policy: RefPolicy::Fixed,
            },
            Some(2),
        )
        .named("a_hv_random"),
    );
    rows.push(
        ArchiverConfig::new(
            ArchiverKind::Moead { scalarizer: Scalarizer::Tch, weights: None, ideal: IdealPolicy::Adaptive },
            Some(2),
        )
        .named("moead_tch_adaptive"),
    );
    rows
}

fn with_capacity(config: &ArchiverConfig, n: usize) -> ArchiverConfig {
    let mut c = config.clone();
    if c.capacity.is_some() {
        c.capacity = Some(n);
    }
    c
}

fn wc(kind: IndicatorKind, n: usize) -> ArchiverConfig {
    ArchiverConfig::new(ArchiverKind::WeakCompliant { indicator: IndicatorChoice::Named(kind) }, Some(n))
}

fn strictly_below(a: &ObjectiveVector, r: &ObjectiveVector) -> bool {
    a.values().iter().zip(r.values()).all(|(x, y)| x < y)
}

/// Pairs `t < t'` of snapshots with `better(A^t, A^t')`, straight from the
/// definition.
fn set_monotone_pairs(tr: &Trajectory) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for t in 1..tr.snapshots.len() {
        for u in t + 1..tr.snapshots.len() {
            let (a, b) = (&tr.snapshots[t], &tr.snapshots[u]);
            if !a.is_empty() && !b.is_empty() && better(a, b).unwrap() {
                out.insert((t, u));
            }
        }
    }
    out
}

fn dominating_pair(a: &[ObjectiveVector], b: &[ObjectiveVector]) -> bool {
    let (a, b) = (minimal_set(a).unwrap(), minimal_set(b).unwrap());
    a.iter().any(|x| b.iter().any(|y| dominates(x, y).unwrap()))
}

fn point_monotone_pairs(tr: &Trajectory) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for t in 1..tr.snapshots.len() {
        for u in t + 1..tr.snapshots.len() {
            if dominating_pair(&tr.snapshots[t], &tr.snapshots[u]) {
                out.insert((t, u));
            }
        }
    }
    out
}

fn pareto_subset_pairs(tr: &Trajectory) -> BTreeSet<(usize, ObjectiveVector)> {
    let mut out = BTreeSet::new();
    for t in 1..tr.snapshots.len() {
        let seen = tr.seen(t);
        for a in distinct(&minimal_set(&tr.snapshots[t]).unwrap()) {
            if seen.iter().any(|s| dominates(s, &a).unwrap()) {
                out.insert((t, a));
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dominance_is_antisymmetric_and_transitive((y1, y2, y3) in (2usize..=4).prop_flat_map(triple)) {
        if dominates(&y1, &y2).unwrap() {
            prop_assert!(!dominates(&y2, &y1).unwrap());
        }
        if weakly_dominates(&y1, &y2).unwrap() && weakly_dominates(&y2, &y3).unwrap() {
            prop_assert!(weakly_dominates(&y1, &y3).unwrap());
        }
        if dominates(&y1, &y2).unwrap() && dominates(&y2, &y3).unwrap() {
            prop_assert!(dominates(&y1, &y3).unwrap());
        }
    }

    #[test]
    fn minimal_set_is_idempotent(p in (2usize..=3).prop_flat_map(|d| points(d, 1..=15, 0, 5))) {
        let once = minimal_set(&p).unwrap();
        prop_assert!(same_archive(&minimal_set(&once).unwrap(), &once));
        for y in &p {
            prop_assert!(once.iter().any(|m| weakly_dominates(m, y).unwrap()));
        }
    }

    #[test]
    fn better_is_a_strict_order(
        (a, b, c) in (2usize..=3).prop_flat_map(|d| (points(d, 1..=4, 0, 4), points(d, 1..=4, 0, 4), points(d, 1..=4, 0, 4)))
    ) {
        let (a, b, c) = (minimal_set(&a).unwrap(), minimal_set(&b).unwrap(), minimal_set(&c).unwrap());
        prop_assert!(!better(&a, &a).unwrap());
        if better(&a, &b).unwrap() {
            prop_assert!(!better(&b, &a).unwrap());
            if better(&b, &c).unwrap() {
                prop_assert!(better(&a, &c).unwrap());
            }
        }
    }

    #[test]
    fn better_matches_set_weak_dominance(
        (a, b) in (2usize..=3).prop_flat_map(|d| (points(d, 1..=5, 0, 4), points(d, 1..=5, 0, 4)))
    ) {
        let expected = set_weakly_dominates(&a, &b).unwrap() && !set_weakly_dominates(&b, &a).unwrap();
        prop_assert_eq!(better(&a, &b).unwrap(), expected);
    }

    #[test]
    fn weakly_dominated_additions_do_not_change_indicators(
        (a, reference, pick, shift) in (2usize..=3).prop_flat_map(|d| (
            points(d, 1..=6, 0, 6),
            points(d, 1..=6, 0, 6),
            any::<prop::sample::Index>(),
            prop::collection::vec(0..=3i32, d),
        ))
    ) {
        let base = pick.get(&a).values().to_vec();
        let q = ov(&base.iter().zip(&shift).map(|(x, s)| x + f64::from(*s)).collect::<Vec<_>>());
        let mut with_q = a.clone();
        with_q.push(q);
        let mut universe = with_q.clone();
        universe.extend(reference.iter().cloned());
        for kind in [IndicatorKind::EpsilonAdditive, IndicatorKind::IgdPlus, IndicatorKind::R2] {
            let spec = IndicatorSpec::for_ground_set(kind, &universe).unwrap();
            prop_assert_eq!(spec.value(&a).unwrap(), spec.value(&with_q).unwrap(), "{}", kind.name());
        }
        let spec = IndicatorSpec::for_ground_set(IndicatorKind::Hypervolume, &universe).unwrap();
        prop_assert!(spec.value(&with_q).unwrap() >= spec.value(&a).unwrap());
    }

    #[test]
    fn hv_contribution_is_nonnegative_and_zero_exactly_when_redundant(
        (a, r, pick) in (2usize..=3).prop_flat_map(|d| (points(d, 1..=6, 0, 6), point(d, 0, 7), any::<prop::sample::Index>()))
    ) {
        let i = pick.index(a.len());
        let c = hv_contribution(&a, &a[i], &r).unwrap();
        prop_assert!(c >= 0.0);
        let redundant = a.iter().enumerate().any(|(j, b)| j != i && weakly_dominates(b, &a[i]).unwrap());
        prop_assert_eq!(c == 0.0, redundant || !strictly_below(&a[i], &r));
    }

    #[test]
    fn hypervolume_is_monotone_under_union(
        (a, b) in (2usize..=3).prop_flat_map(|d| (points(d, 1..=6, 0, 6), points(d, 1..=6, 0, 6)))
    ) {
        let r = ov(&vec![7.0; a[0].dim()]);
        let mut union = a.clone();
        union.extend(b);
        prop_assert!(hypervolume(&union, &r).unwrap() >= hypervolume(&a, &r).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn archives_respect_capacity(seq in sequence(25), n in 1usize..=5) {
        for config in all_kinds() {
            let config = with_capacity(&config, n);
            let tr = run_resolved(&config, &seq).unwrap();
            prop_assert!(tr.snapshots[0].is_empty());
            for (t, snap) in tr.snapshots.iter().enumerate().skip(1) {
                prop_assert!(!snap.is_empty(), "{} empty at {t}", config.label());
                if let Some(cap) = config.capacity {
                    prop_assert!(snap.len() <= cap, "{} holds {} > {cap} at {t}", config.label(), snap.len());
                }
            }
        }
    }

    #[test]
    fn weak_compliant_archives_are_nondominated_and_satisfy_the_lemmas(seq in sequence(20), n in 1usize..=5) {
        let ground = seq.ground_set();
        for kind in [IndicatorKind::EpsilonAdditive, IndicatorKind::IgdPlus, IndicatorKind::R2, IndicatorKind::Hypervolume] {
            let tr = run_resolved(&wc(kind, n), &seq).unwrap();
            for snap in &tr.snapshots[1..] {
                prop_assert_eq!(distinct(snap).len(), snap.len());
                prop_assert_eq!(minimal_set(snap).unwrap().len(), snap.len());
            }
            let spec = IndicatorSpec::for_ground_set(kind, &ground).unwrap();
            let reports = check_lemmas(&tr, &spec).unwrap();
            prop_assert!(reports.iter().all(|r| r.held()), "{}: {:?}", kind.name(), reports);
        }
    }

    #[test]
    fn a_dom_never_point_deteriorates(seq in sequence(25), n in 1usize..=5) {
        let tr = run_resolved(&ArchiverConfig::new(ArchiverKind::ADom, Some(n)), &seq).unwrap();
        prop_assert!(point_monotone_pairs(&tr).is_empty());
    }

    #[test]
    fn eps_pareto_keeps_only_undominated_members(seq in sequence(25), eps in prop::sample::select(vec![0.05, 0.1, 0.5])) {
        let config = ArchiverConfig::new(ArchiverKind::EpsBox { epsilon: eps, mode: EpsMode::Pareto }, None);
        let tr = run_resolved(&config, &seq).unwrap();
        prop_assert!(check_anytime(&tr).unwrap()[0].held());
    }

    #[test]
    fn set_monotone_archivers_never_set_deteriorate(seq in sequence(25), n in 1usize..=5) {
        for label in ["mga", "a_hv", "moead_tch"] {
            let config = default_rows().into_iter().find(|c| c.label() == label).unwrap();
            let tr = run_resolved(&with_capacity(&config, n), &seq).unwrap();
            prop_assert!(set_monotone_pairs(&tr).is_empty(), "{label}");
        }
    }

    #[test]
    fn moead_state_tracks_ideal_and_associations(seq in sequence(25), n in 1usize..=5) {
        let config = ArchiverConfig::new(
            ArchiverKind::Moead { scalarizer: Scalarizer::Pbi { theta: 5.0 }, weights: None, ideal: IdealPolicy::Adaptive },
            Some(n),
        );
        let config = config.resolve(&seq.ground_set()).unwrap();
        let mut archiver = Archiver::new(config, seq.dim).unwrap();
        let mut ideal = vec![f64::INFINITY; seq.dim];
        for s in seq.solutions() {
            archiver.update(s).unwrap();
            for (m, v) in ideal.iter_mut().zip(s.values()) {
                *m = m.min(*v);
            }
            let state = archiver.moead_state().unwrap();
            prop_assert_eq!(state.assoc.len(), n);
            prop_assert_eq!(&state.ideal, &ideal);
        }
    }

    #[test]
    fn runs_are_deterministic(seq in sequence(20), n in 1usize..=4) {
        for config in all_kinds() {
            let config = with_capacity(&config, n).with_seed(9);
            prop_assert_eq!(run_resolved(&config, &seq).unwrap(), run_resolved(&config, &seq).unwrap());
        }
    }

    #[test]
    fn checker_witnesses_match_the_definitions(seq in sequence(12), n in 1usize..=3) {
        for config in all_kinds() {
            let tr = run_resolved(&with_capacity(&config, n), &seq).unwrap();
            let reports = check_anytime(&tr).unwrap();
            let mut pareto = BTreeSet::new();
            let mut point = BTreeSet::new();
            let mut set = BTreeSet::new();
            for w in reports.iter().flat_map(|r| &r.witnesses) {
                match w {
                    Witness::ParetoSubset { t, archived, dominated_by } => {
                        prop_assert!(tr.seen(*t).contains(dominated_by));
                        pareto.insert((*t, archived.clone()));
                    }
                    Witness::PointMonotone { t, t_later, earlier, later } => {
                        prop_assert!(t < t_later);
                        prop_assert!(dominates(earlier, later).unwrap());
                        point.insert((*t, *t_later));
                    }
                    Witness::SetMonotone { t, t_later } => {
                        prop_assert!(t < t_later);
                        set.insert((*t, *t_later));
                    }
                    other => prop_assert!(false, "unexpected witness {other:?}"),
                }
            }
            prop_assert_eq!(&pareto, &pareto_subset_pairs(&tr), "{}", config.label());
            prop_assert_eq!(&point, &point_monotone_pairs(&tr), "{}", config.label());
            prop_assert_eq!(&set, &set_monotone_pairs(&tr), "{}", config.label());
            for (report, expected) in reports.iter().zip([pareto.len(), point.len(), set.len()]) {
                prop_assert_eq!(report.held(), expected == 0);
            }
            // A set deterioration backed by a dominating pair is also a
            // point deterioration.
            if reports[1].held() {
                for &(t, u) in &set {
                    prop_assert!(!dominating_pair(&tr.snapshots[t], &tr.snapshots[u]));
                }
            }
        }
    }

    #[test]
    fn reversed_trajectories_only_report_forward_pairs(seq in sequence(12), n in 1usize..=3) {
        let tr = run_resolved(&with_capacity(&default_rows()[0], n), &seq).unwrap();
        let mut reversed = tr.clone();
        reversed.snapshots[1..].reverse();
        reversed.arrivals[1..].reverse();
        for w in check_anytime(&reversed).unwrap().iter().flat_map(|r| &r.witnesses) {
            match w {
                Witness::PointMonotone { t, t_later, .. } | Witness::SetMonotone { t, t_later } => {
                    prop_assert!(t < t_later)
                }
                _ => {}
            }
        }
        prop_assert_eq!(set_monotone_pairs(&reversed), check_anytime(&reversed).unwrap()[2]
            .witnesses.iter().map(|w| match w { Witness::SetMonotone { t, t_later } => (*t, *t_later), _ => unreachable!() })
            .collect::<BTreeSet<_>>());
    }

    #[test]
    fn order_and_batch_preserves_each_pass(
        ground in (2usize..=3).prop_flat_map(|d| points(d, 1..=12, 0, 9)),
        policy in prop_oneof![
            any::<u64>().prop_map(|seed| OrderPolicy::Shuffle { seed }),
            Just(OrderPolicy::LexicographicSweep),
            Just(OrderPolicy::ExtremesFirst),
            Just(OrderPolicy::Replay),
        ],
        batch_size in 1usize..=4,
        passes in 1usize..=3,
    ) {
        let seq = order_and_batch(&ground, &policy, batch_size, passes).unwrap();
        prop_assert!(seq.batches.iter().all(|b| !b.solutions.is_empty() && b.solutions.len() <= batch_size));
        let flat: Vec<ObjectiveVector> = seq.solutions().cloned().collect();
        prop_assert_eq!(flat.len(), ground.len() * passes);
        let mut expected = ground.clone();
        expected.sort();
        for pass in flat.chunks(ground.len()) {
            let mut pass = pass.to_vec();
            pass.sort();
            prop_assert_eq!(&pass, &expected);
        }
    }

    #[test]
    fn generated_fronts_are_mutually_nondominated(
        shape in prop::sample::select(vec![Shape::Linear, Shape::Concave, Shape::Convex, Shape::Disconnected, Shape::Degenerate]),
        dim in 2usize..=3,
        pts in 2usize..=12,
        noise in 0usize..=6,
        seed in any::<u64>(),
        lattice in any::<bool>(),
    ) {
        let spec = FrontSpec { shape, dim, points: pts, noise, seed, lattice, scale: 60.0, offset: 0.0 };
        let ground = sample_ground_set(&spec).unwrap();
        prop_assert_eq!(ground.len(), pts + noise);
        let (front, extra) = ground.split_at(pts);
        prop_assert_eq!(minimal_set(front).unwrap().len(), front.len());
        for y in extra {
            prop_assert!(front.iter().any(|f| dominates(f, y).unwrap()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn limit_experiments_are_deterministic(
        ground in (2usize..=3).prop_flat_map(|d| points(d, 2..=10, 0, 6)),
        seed in any::<u64>(),
        n in 1usize..=4,
    ) {
        for config in [wc(IndicatorKind::EpsilonAdditive, n), ArchiverConfig::new(ArchiverKind::Nsga2 { batch_native: false }, Some(n))] {
            let run = || run_limit_experiment(&config, &ground, seed, 50 * ground.len(), 2000 * ground.len()).unwrap();
            prop_assert_eq!(run(), run());
        }
    }
}

#[test]
fn classify_reports_are_byte_identical() {
    let cfg = ClassifyConfig { sequences: 6, limit_seeds: 2, seed: 5, ..ClassifyConfig::default() };
    assert_eq!(to_json(&classify(&cfg).unwrap()), to_json(&classify(&cfg).unwrap()));
}

#[test]
fn run_reports_are_byte_identical() {
    let cfg = ExperimentConfig::from_json(
        r#"{
            "schema_version": 1,
            "archivers": [
                {"kind": "nsga2", "capacity": 3},
                {"kind": "indicator_mu1", "capacity": 3, "indicator": "hypervolume", "tie_policy": "uniform_random"}
            ],
            "source": {"generator": {"front": {"shape": "concave", "dim": 2, "points": 8, "noise": 4, "seed": 3, "lattice": true, "scale": 60}, "passes": 2}},
            "checks": ["anytime", "lemmas", "limit"],
            "limit": {"seeds": 3},
            "seed": 11
        }"#,
    )
    .unwrap();
    assert_eq!(to_json(&run_experiment(&cfg).unwrap()), to_json(&run_experiment(&cfg).unwrap()));
}
