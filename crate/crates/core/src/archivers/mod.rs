//! The archiver catalogue behind one update contract.
//!
//! An [`Archiver`] owns its archive and any auxiliary state, and folds
//! solutions in one at a time (or, for batch-native NSGA-II selection, a
//! whole batch at once). [`run`] drives an archiver over a [`Sequence`] and
//! records the resulting [`Trajectory`].

mod eps_box;
mod indicator;
mod mga;
mod moead;
mod nsga2;
mod pareto;
pub mod sorting;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dominance::{canonical, check_set, ObjectiveVector};
use crate::error::{usage, Result};
use crate::indicators::{bounds, uniform_weights, IndicatorChoice, IndicatorKind, IndicatorSpec};
use crate::sequences::{Batch, Sequence};

pub use eps_box::box_index;
pub use moead::{pbi, MoeadState};
pub use sorting::{crowding_distance, nondom_sorting};

/// ε-box acceptance rules.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsMode {
    /// Box dominance plus same-box Pareto refinement.
    #[default]
    Pareto,
    /// Box dominance only.
    Approx,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Scalarizer {
    Tch,
    Pbi {
        #[serde(default = "default_theta")]
        theta: f64,
    },
}

fn default_theta() -> f64 {
    5.0
}

/// Where the scalarizing reference (ideal) point comes from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdealPolicy {
    /// Componentwise minimum of everything seen so far.
    #[default]
    Adaptive,
    /// Frozen at the componentwise minimum of the experiment's ground set.
    GroundTruth,
    /// Frozen at the given point.
    Frozen(ObjectiveVector),
}

/// Hypervolume reference point handling for the generic indicator archiver.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefPolicy {
    /// Use the indicator's configured reference point.
    #[default]
    Fixed,
    /// Worst value of the archive plus the newcomer, plus one, recomputed
    /// at every update.
    AdaptiveNadirPlusOne,
}

/// What to do when several members tie for least contribution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TiePolicy {
    /// A newcomer tied for least contribution is rejected.
    #[default]
    RejectNew,
    /// Newcomer and incumbents are drawn from uniformly.
    UniformRandom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArchiverKind {
    Unbounded,
    ADom,
    EpsBox {
        epsilon: f64,
        #[serde(default)]
        mode: EpsMode,
    },
    Mga,
    Nsga2 {
        #[serde(default)]
        batch_native: bool,
    },
    Moead {
        scalarizer: Scalarizer,
        #[serde(default)]
        weights: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        ideal: IdealPolicy,
    },
    IndicatorMu1 {
        indicator: IndicatorChoice,
        #[serde(default)]
        tie_policy: TiePolicy,
        #[serde(default)]
        ref_policy: RefPolicy,
    },
    WeakCompliant {
        indicator: IndicatorChoice,
    },
}

impl ArchiverKind {
    pub fn tag(&self) -> &'static str {
        match self {
            ArchiverKind::Unbounded => "unbounded",
            ArchiverKind::ADom => "a_dom",
            ArchiverKind::EpsBox { .. } => "eps_box",
            ArchiverKind::Mga => "mga",
            ArchiverKind::Nsga2 { .. } => "nsga2",
            ArchiverKind::Moead { .. } => "moead",
            ArchiverKind::IndicatorMu1 { .. } => "indicator_mu1",
            ArchiverKind::WeakCompliant { .. } => "weak_compliant",
        }
    }

    /// Kinds that hold at most `capacity` members.
    pub fn is_bounded(&self) -> bool {
        !matches!(self, ArchiverKind::Unbounded | ArchiverKind::EpsBox { .. })
    }
}

/// Full configuration of one archiver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchiverConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Capacity `N`; absent for the unbounded and ε-box archivers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<usize>,
    #[serde(flatten)]
    pub kind: ArchiverKind,
    #[serde(default)]
    pub rng_seed: u64,
}

impl ArchiverConfig {
    pub fn new(kind: ArchiverKind, capacity: Option<usize>) -> Self {
        Self { name: None, capacity, kind, rng_seed: 0 }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.kind.tag().to_string())
    }

    /// Indicator driving the archiver, if any.
    pub fn indicator_kind(&self) -> Option<IndicatorKind> {
        match &self.kind {
            ArchiverKind::IndicatorMu1 { indicator, .. } | ArchiverKind::WeakCompliant { indicator } => {
                Some(indicator.kind())
            }
            _ => None,
        }
    }

    /// Replaces every ground-set-dependent setting (named indicators,
    /// default MOEA/D weights, ground-truth ideal point) with an explicit
    /// value derived from `ground`.
    pub fn resolve(&self, ground: &[ObjectiveVector]) -> Result<ArchiverConfig> {
        let d = check_set(ground, "ground set")?;
        let mut out = self.clone();
        match &mut out.kind {
            ArchiverKind::IndicatorMu1 { indicator, .. } | ArchiverKind::WeakCompliant { indicator } => {
                *indicator = IndicatorChoice::Explicit(indicator.resolve(ground)?);
            }
            ArchiverKind::Moead { weights, ideal, .. } => {
                if weights.is_none() {
                    let n = self.capacity.ok_or_else(|| crate::Error::Usage("moead needs a capacity".into()))?;
                    *weights = Some(uniform_weights(d, n));
                }
                if *ideal == IdealPolicy::GroundTruth {
                    *ideal = IdealPolicy::Frozen(ObjectiveVector::new(bounds(ground).0)?);
                }
            }
            _ => {}
        }
        Ok(out)
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match (self.kind.is_bounded(), self.capacity) {
            (true, None) => return usage(format!("{} needs a capacity", self.kind.tag())),
            (true, Some(0)) => return usage("capacity must be at least 1"),
            (false, Some(_)) => return usage(format!("{} does not take a capacity", self.kind.tag())),
            _ => {}
        }
        match &self.kind {
            ArchiverKind::EpsBox { epsilon, .. } => {
                if !(epsilon.is_finite() && *epsilon > 0.0) {
                    return usage(format!("epsilon must be positive, got {epsilon}"));
                }
            }
            ArchiverKind::Moead { scalarizer, weights, ideal } => {
                let Some(w) = weights else {
                    return usage("moead weights are unresolved; call resolve() first");
                };
                crate::indicators::check_weights(w, dim)?;
                if Some(w.len()) != self.capacity {
                    return usage(format!(
                        "moead needs exactly {} weights, got {}",
                        self.capacity.unwrap_or(0),
                        w.len()
                    ));
                }
                match ideal {
                    IdealPolicy::GroundTruth => {
                        return usage("ground-truth ideal point is unresolved; call resolve() first")
                    }
                    IdealPolicy::Frozen(p) if p.dim() != dim => {
                        return usage("frozen ideal point has the wrong dimension")
                    }
                    _ => {}
                }
                if let Scalarizer::Pbi { theta } = scalarizer {
                    if !theta.is_finite() || *theta < 0.0 {
                        return usage("pbi theta must be non-negative");
                    }
                }
            }
            ArchiverKind::IndicatorMu1 { indicator, ref_policy, .. } => {
                let spec = explicit(indicator)?;
                spec.validate(dim)?;
                if *ref_policy == RefPolicy::AdaptiveNadirPlusOne && spec.kind() != IndicatorKind::Hypervolume {
                    return usage("adaptive reference policy applies to hypervolume only");
                }
            }
            ArchiverKind::WeakCompliant { indicator } => explicit(indicator)?.validate(dim)?,
            _ => {}
        }
        Ok(())
    }
}

fn explicit(choice: &IndicatorChoice) -> Result<&IndicatorSpec> {
    match choice {
        IndicatorChoice::Explicit(spec) => Ok(spec),
        IndicatorChoice::Named(kind) => usage(format!("indicator {} is unresolved; call resolve() first", kind.name())),
    }
}

/// One update rule. Implementations own the archive contents.
trait UpdateRule: Send {
    fn insert(&mut self, s: &ObjectiveVector, rng: &mut ChaCha8Rng) -> Result<()>;

    fn insert_batch(&mut self, batch: &[ObjectiveVector], rng: &mut ChaCha8Rng) -> Result<()> {
        batch.iter().try_for_each(|s| self.insert(s, rng))
    }

    fn members(&self) -> Vec<ObjectiveVector>;

    fn moead_state(&self) -> Option<&MoeadState> {
        None
    }
}

/// A live archiver: configuration, archive and auxiliary state.
pub struct Archiver {
    config: ArchiverConfig,
    dim: usize,
    rule: Box<dyn UpdateRule>,
    rng: ChaCha8Rng,
}

impl std::fmt::Debug for Archiver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Archiver").field("config", &self.config).field("members", &self.members()).finish()
    }
}

impl Archiver {
    /// Builds an empty archiver for `dim`-objective solutions. The config
    /// must already be resolved.
    pub fn new(config: ArchiverConfig, dim: usize) -> Result<Self> {
        if dim < 2 {
            return usage("solutions need at least 2 objectives");
        }
        config.validate(dim)?;
        let cap = config.capacity.unwrap_or(usize::MAX);
        let rule: Box<dyn UpdateRule> = match &config.kind {
            ArchiverKind::Unbounded => Box::new(pareto::Unbounded::default()),
            ArchiverKind::ADom => Box::new(pareto::ADom::new(cap)),
            ArchiverKind::EpsBox { epsilon, mode } => Box::new(eps_box::EpsBox::new(*epsilon, *mode)),
            ArchiverKind::Mga => Box::new(mga::Mga::new(cap)),
            ArchiverKind::Nsga2 { batch_native } => Box::new(nsga2::Nsga2::new(cap, *batch_native)),
            ArchiverKind::Moead { scalarizer, weights, ideal } => Box::new(moead::Moead::new(
                *scalarizer,
                weights.clone().unwrap_or_default(),
                match ideal {
                    IdealPolicy::Frozen(p) => Some(p.values().to_vec()),
                    _ => None,
                },
            )),
            ArchiverKind::IndicatorMu1 { indicator, tie_policy, ref_policy } => {
                Box::new(indicator::IndicatorMu1::new(cap, explicit(indicator)?.clone(), *tie_policy, *ref_policy))
            }
            ArchiverKind::WeakCompliant { indicator } => {
                Box::new(indicator::WeakCompliant::new(cap, explicit(indicator)?.clone()))
            }
        };
        let rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        Ok(Self { config, dim, rule, rng })
    }

    pub fn config(&self) -> &ArchiverConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Current archive contents.
    pub fn members(&self) -> Vec<ObjectiveVector> {
        self.rule.members()
    }

    /// Auxiliary MOEA/D state, for MOEA/D archivers.
    pub fn moead_state(&self) -> Option<&MoeadState> {
        self.rule.moead_state()
    }

    fn check_dim(&self, s: &ObjectiveVector) -> Result<()> {
        if s.dim() != self.dim {
            return usage(format!("solution {s:?} has dimension {}, archive expects {}", s.dim(), self.dim));
        }
        Ok(())
    }

    /// Presents a single solution.
    pub fn update(&mut self, s: &ObjectiveVector) -> Result<()> {
        self.check_dim(s)?;
        self.rule.insert(s, &mut self.rng)
    }

    /// Presents a batch: one solution at a time in batch order, except for
    /// batch-native NSGA-II which merges the batch and truncates once.
    pub fn fold_batch(&mut self, batch: &Batch) -> Result<()> {
        if batch.solutions.is_empty() {
            return usage("batch must be nonempty");
        }
        for s in &batch.solutions {
            self.check_dim(s)?;
        }
        self.rule.insert_batch(&batch.solutions, &mut self.rng)
    }
}

/// Full history of one archiver run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub dim: usize,
    /// Archive after each timestep; `snapshots[0]` is the empty archive.
    pub snapshots: Vec<Vec<ObjectiveVector>>,
    /// Batch label of each snapshot; `labels[0]` is the label of the first
    /// batch.
    pub labels: Vec<u64>,
    /// Solutions that arrived at each timestep; `arrivals[0]` is empty.
    pub arrivals: Vec<Vec<ObjectiveVector>>,
    pub rng_seed: u64,
}

impl Trajectory {
    /// Starts a trajectory holding only the empty archive.
    pub fn empty(dim: usize, rng_seed: u64) -> Self {
        Self { dim, snapshots: vec![Vec::new()], labels: vec![0], arrivals: vec![Vec::new()], rng_seed }
    }

    /// Builds a trajectory from explicit snapshots, pairing snapshot `k ≥ 1`
    /// with `arrivals[k - 1]`.
    pub fn from_parts(
        dim: usize,
        snapshots: Vec<Vec<ObjectiveVector>>,
        arrivals: Vec<Vec<ObjectiveVector>>,
    ) -> Result<Self> {
        if snapshots.len() != arrivals.len() {
            return usage("need one arrival batch per snapshot");
        }
        let mut tr = Self::empty(dim, 0);
        for (k, (snap, arr)) in snapshots.into_iter().zip(arrivals).enumerate() {
            tr.push(k as u64 + 1, arr, snap);
        }
        Ok(tr)
    }

    pub fn push(&mut self, label: u64, arrived: Vec<ObjectiveVector>, snapshot: Vec<ObjectiveVector>) {
        if self.snapshots.len() == 1 {
            self.labels[0] = label;
        }
        self.labels.push(label);
        self.arrivals.push(arrived);
        self.snapshots.push(snapshot);
    }

    /// Number of timesteps (snapshots after the empty one).
    pub fn len(&self) -> usize {
        self.snapshots.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every solution seen up to and including timestep `t`.
    pub fn seen(&self, t: usize) -> Vec<ObjectiveVector> {
        self.arrivals[..=t].iter().flatten().cloned().collect()
    }

    pub fn last(&self) -> &[ObjectiveVector] {
        self.snapshots.last().expect("trajectory has the empty snapshot")
    }
}

/// Whether two archives hold the same solutions (multiset equality).
pub fn same_archive(a: &[ObjectiveVector], b: &[ObjectiveVector]) -> bool {
    a.len() == b.len() && canonical(a) == canonical(b)
}

/// Runs `config` (already resolved) over `sequence`, snapshotting after
/// every batch.
pub fn run(config: &ArchiverConfig, sequence: &Sequence) -> Result<Trajectory> {
    let mut archiver = Archiver::new(config.clone(), sequence.dim)?;
    let mut tr = Trajectory::empty(sequence.dim, config.rng_seed);
    for batch in &sequence.batches {
        archiver.fold_batch(batch)?;
        tr.push(batch.t, batch.solutions.clone(), archiver.members());
    }
    Ok(tr)
}

/// Resolves `config` against the distinct solutions of `sequence`, then
/// runs it.
pub fn run_resolved(config: &ArchiverConfig, sequence: &Sequence) -> Result<Trajectory> {
    let ground = sequence.ground_set();
    run(&config.resolve(&ground)?, sequence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ov;

    fn batch(solutions: Vec<ObjectiveVector>) -> Batch {
        Batch { t: 1, solutions }
    }

    fn all_kinds() -> Vec<ArchiverConfig> {
        let ground = [ov![1, 1], ov![2, 2]];
        vec![
            ArchiverConfig::new(ArchiverKind::Unbounded, None),
            ArchiverConfig::new(ArchiverKind::ADom, Some(2)),
            ArchiverConfig::new(ArchiverKind::EpsBox { epsilon: 1.0, mode: EpsMode::Pareto }, None),
            ArchiverConfig::new(ArchiverKind::Mga, Some(2)),
            ArchiverConfig::new(ArchiverKind::Nsga2 { batch_native: false }, Some(2)),
            ArchiverConfig::new(
                ArchiverKind::Moead { scalarizer: Scalarizer::Tch, weights: None, ideal: IdealPolicy::Adaptive },
                Some(2),
            ),
            ArchiverConfig::new(
                ArchiverKind::IndicatorMu1 {
                    indicator: IndicatorChoice::Named(IndicatorKind::Hypervolume),
                    tie_policy: TiePolicy::RejectNew,
                    ref_policy: RefPolicy::Fixed,
                },
                Some(2),
            ),
            ArchiverConfig::new(
                ArchiverKind::WeakCompliant { indicator: IndicatorChoice::Named(IndicatorKind::IgdPlus) },
                Some(2),
            ),
        ]
        .into_iter()
        .map(|c| c.resolve(&ground).unwrap())
        .collect()
    }

    #[test]
    fn first_solution_is_always_accepted() {
        for config in all_kinds() {
            let mut a = Archiver::new(config.clone(), 2).unwrap();
            a.fold_batch(&batch(vec![ov![1, 1]])).unwrap();
            assert_eq!(a.members(), vec![ov![1, 1]], "{}", config.label());
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        for config in all_kinds() {
            let mut a = Archiver::new(config, 2).unwrap();
            assert!(a.update(&ov![1, 1, 1]).is_err());
            assert!(a.fold_batch(&batch(vec![])).is_err());
        }
    }

    #[test]
    fn capacity_is_validated() {
        assert!(Archiver::new(ArchiverConfig::new(ArchiverKind::ADom, None), 2).is_err());
        assert!(Archiver::new(ArchiverConfig::new(ArchiverKind::ADom, Some(0)), 2).is_err());
        assert!(Archiver::new(ArchiverConfig::new(ArchiverKind::Unbounded, Some(3)), 2).is_err());
        let eps = ArchiverKind::EpsBox { epsilon: 0.0, mode: EpsMode::Pareto };
        assert!(Archiver::new(ArchiverConfig::new(eps, None), 2).is_err());
    }

    #[test]
    fn unresolved_config_is_rejected() {
        let c = ArchiverConfig::new(
            ArchiverKind::WeakCompliant { indicator: IndicatorChoice::Named(IndicatorKind::R2) },
            Some(2),
        );
        assert!(matches!(Archiver::new(c, 2), Err(crate::Error::Usage(_))));
    }

    #[test]
    fn duplicate_rejected_by_weak_compliant() {
        let config = all_kinds().pop().unwrap();
        let mut a = Archiver::new(config, 2).unwrap();
        a.fold_batch(&batch(vec![ov![1, 1]])).unwrap();
        a.fold_batch(&batch(vec![ov![1, 1]])).unwrap();
        assert_eq!(a.members(), vec![ov![1, 1]]);
    }

    #[test]
    fn a_dom_batch_fold_by_hand() {
        let mut a = Archiver::new(ArchiverConfig::new(ArchiverKind::ADom, Some(2)), 2).unwrap();
        a.fold_batch(&batch(vec![ov![0, 2], ov![2, 0]])).unwrap();
        a.fold_batch(&batch(vec![ov![1, 1], ov![0, 2]])).unwrap();
        assert_eq!(a.members(), vec![ov![0, 2], ov![2, 0]]);
    }

    #[test]
    fn config_json_shape() {
        let json = r#"{"name":"pbi","capacity":4,"kind":"moead","scalarizer":{"name":"pbi"},"ideal":"ground_truth"}"#;
        let c: ArchiverConfig = serde_json::from_str(json).unwrap();
        assert_eq!(c.capacity, Some(4));
        match &c.kind {
            ArchiverKind::Moead { scalarizer, ideal, .. } => {
                assert_eq!(*scalarizer, Scalarizer::Pbi { theta: 5.0 });
                assert_eq!(*ideal, IdealPolicy::GroundTruth);
            }
            other => panic!("{other:?}"),
        }
        let resolved = c.resolve(&[ov![1, 3], ov![3, 1]]).unwrap();
        match resolved.kind {
            ArchiverKind::Moead { weights, ideal, .. } => {
                assert_eq!(weights.unwrap().len(), 4);
                assert_eq!(ideal, IdealPolicy::Frozen(ov![1, 1]));
            }
            other => panic!("{other:?}"),
        }
        let hv: ArchiverConfig = serde_json::from_str(
            r#"{"capacity":2,"kind":"indicator_mu1","indicator":{"kind":"hypervolume","reference_point":[4,4]},"ref_policy":"adaptive_nadir_plus_one"}"#,
        )
        .unwrap();
        assert!(Archiver::new(hv, 2).is_ok());
    }
}
