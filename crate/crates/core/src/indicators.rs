//! Unary quality indicators.
//!
//! Hypervolume is maximised; the others are minimised. [`IndicatorSpec::loss`]
//! folds the orientation away so that smaller is always better, which is the
//! form every indicator-driven archiver consumes.

use serde::{Deserialize, Serialize};

use crate::dominance::{check_set, distinct, minimal_unchecked, ObjectiveVector};
use crate::error::{usage, Result};

/// Measure of the region dominated by `set` and bounded above by `reference`.
///
/// Members that do not strictly dominate the reference point contribute
/// nothing. The computation is exact in any dimension (recursive slicing on
/// the last objective, with a sweep for the two-dimensional base case).
pub fn hypervolume(set: &[ObjectiveVector], reference: &ObjectiveVector) -> Result<f64> {
    let d = check_set(set, "hypervolume input")?;
    if d != reference.dim() {
        return usage(format!("reference point has dimension {}, set has {d}", reference.dim()));
    }
    Ok(hv_unchecked(set, reference))
}

pub(crate) fn hv_unchecked(set: &[ObjectiveVector], reference: &ObjectiveVector) -> f64 {
    let r = reference.values();
    let pts: Vec<&[f64]> = set.iter().map(|a| a.values()).filter(|a| a.iter().zip(r).all(|(x, y)| x < y)).collect();
    hv_recursive(pts, r)
}

fn hv_recursive(mut pts: Vec<&[f64]>, r: &[f64]) -> f64 {
    if pts.is_empty() {
        return 0.0;
    }
    let d = r.len();
    match d {
        1 => r[0] - pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min),
        2 => {
            pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
            let mut volume = 0.0;
            let mut floor = r[1];
            for p in pts {
                if p[1] < floor {
                    volume += (r[0] - p[0]) * (floor - p[1]);
                    floor = p[1];
                }
            }
            volume
        }
        _ => {
            let last = d - 1;
            pts.sort_by(|a, b| a[last].total_cmp(&b[last]));
            let mut volume = 0.0;
            for i in 0..pts.len() {
                let lo = pts[i][last];
                let hi = pts.get(i + 1).map_or(r[last], |p| p[last]);
                if hi > lo {
                    let slice: Vec<&[f64]> = pts[..=i].iter().map(|p| &p[..last]).collect();
                    volume += hv_recursive(slice, &r[..last]) * (hi - lo);
                }
            }
            volume
        }
    }
}

/// Hypervolume lost when one copy of `member` is removed from `set`.
pub fn hv_contribution(set: &[ObjectiveVector], member: &ObjectiveVector, reference: &ObjectiveVector) -> Result<f64> {
    let total = hypervolume(set, reference)?;
    let Some(pos) = set.iter().position(|a| a == member) else {
        return usage(format!("{member:?} is not a member of the set"));
    };
    let mut rest = set.to_vec();
    rest.remove(pos);
    Ok(total - hv_unchecked(&rest, reference))
}

/// Additive epsilon indicator: the smallest shift that makes `set` weakly
/// dominate `reference_set`.
pub fn epsilon_additive(set: &[ObjectiveVector], reference_set: &[ObjectiveVector]) -> Result<f64> {
    check_pair_sets(set, reference_set)?;
    Ok(eps_unchecked(set, reference_set))
}

fn eps_unchecked(set: &[ObjectiveVector], reference_set: &[ObjectiveVector]) -> f64 {
    reference_set
        .iter()
        .map(|r| {
            set.iter()
                .map(|a| a.values().iter().zip(r.values()).map(|(x, y)| x - y).fold(f64::NEG_INFINITY, f64::max))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// IGD+: mean dominance-truncated distance from each reference point to
/// its nearest member of `set`.
pub fn igd_plus(set: &[ObjectiveVector], reference_set: &[ObjectiveVector]) -> Result<f64> {
    check_pair_sets(set, reference_set)?;
    Ok(igd_plus_unchecked(set, reference_set))
}

fn igd_plus_unchecked(set: &[ObjectiveVector], reference_set: &[ObjectiveVector]) -> f64 {
    let total: f64 = reference_set
        .iter()
        .map(|r| {
            set.iter()
                .map(|a| {
                    a.values()
                        .iter()
                        .zip(r.values())
                        .map(|(x, y)| {
                            let gap = (x - y).max(0.0);
                            gap * gap
                        })
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    total / reference_set.len() as f64
}

/// R2 with the weighted Tchebycheff utility relative to a utopian point.
pub fn r2(set: &[ObjectiveVector], weights: &[Vec<f64>], utopian: &ObjectiveVector) -> Result<f64> {
    let d = check_set(set, "R2 input")?;
    check_weights(weights, d)?;
    if utopian.dim() != d {
        return usage(format!("utopian point has dimension {}, set has {d}", utopian.dim()));
    }
    if let Some(bad) = set.iter().find(|a| !utopian.wdom(a)) {
        return usage(format!("utopian point {utopian:?} does not weakly dominate {bad:?}"));
    }
    Ok(r2_unchecked(set, weights, utopian))
}

fn r2_unchecked(set: &[ObjectiveVector], weights: &[Vec<f64>], utopian: &ObjectiveVector) -> f64 {
    let total: f64 = weights
        .iter()
        .map(|w| set.iter().map(|a| tchebycheff(a.values(), w, utopian.values())).fold(f64::INFINITY, f64::min))
        .sum();
    total / weights.len() as f64
}

/// Weighted Tchebycheff distance `max_i w_i |a_i - z_i|`.
pub(crate) fn tchebycheff(a: &[f64], w: &[f64], z: &[f64]) -> f64 {
    a.iter().zip(w).zip(z).map(|((a, w), z)| w * (a - z).abs()).fold(f64::NEG_INFINITY, f64::max)
}

fn check_pair_sets(set: &[ObjectiveVector], reference_set: &[ObjectiveVector]) -> Result<()> {
    let d = check_set(set, "indicator input")?;
    let dr = check_set(reference_set, "reference set")?;
    if d != dr {
        return usage(format!("reference set has dimension {dr}, set has {d}"));
    }
    Ok(())
}

pub(crate) fn check_weights(weights: &[Vec<f64>], d: usize) -> Result<()> {
    if weights.is_empty() {
        return usage("weight set must be nonempty");
    }
    for w in weights {
        if w.len() != d {
            return usage(format!("weight {w:?} does not have dimension {d}"));
        }
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return usage(format!("weight {w:?} has a negative or non-finite component"));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return usage(format!("weight {w:?} sums to {sum}, not 1"));
        }
    }
    Ok(())
}

/// Uniform simplex-lattice weights with `divisions` steps per objective.
pub fn simplex_lattice(d: usize, divisions: usize) -> Vec<Vec<f64>> {
    fn rec(d: usize, left: usize, h: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if prefix.len() == d - 1 {
            prefix.push(left);
            out.push(prefix.iter().map(|&k| k as f64 / h as f64).collect());
            prefix.pop();
            return;
        }
        for k in (0..=left).rev() {
            prefix.push(k);
            rec(d, left - k, h, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if divisions == 0 {
        out.push(vec![1.0 / d as f64; d]);
    } else {
        rec(d, divisions, divisions, &mut Vec::with_capacity(d), &mut out);
    }
    out
}

/// Exactly `n` weights spread over the simplex: a lattice for two objectives,
/// otherwise evenly spaced picks from the smallest lattice holding `n`.
pub fn uniform_weights(d: usize, n: usize) -> Vec<Vec<f64>> {
    if n == 1 {
        return vec![vec![1.0 / d as f64; d]];
    }
    let mut h = 1;
    let lattice = loop {
        let l = simplex_lattice(d, h);
        if l.len() >= n {
            break l;
        }
        h += 1;
    };
    if lattice.len() == n {
        return lattice;
    }
    (0..n).map(|i| lattice[i * (lattice.len() - 1) / (n - 1)].clone()).collect()
}

/// Which direction of an indicator is better.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Minimised,
    Maximised,
}

/// Indicator identity without its configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorKind {
    Hypervolume,
    EpsilonAdditive,
    IgdPlus,
    R2,
}

impl IndicatorKind {
    pub fn name(self) -> &'static str {
        match self {
            IndicatorKind::Hypervolume => "hypervolume",
            IndicatorKind::EpsilonAdditive => "epsilon_additive",
            IndicatorKind::IgdPlus => "igd_plus",
            IndicatorKind::R2 => "r2",
        }
    }
}

/// A fully configured indicator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndicatorSpec {
    Hypervolume { reference_point: ObjectiveVector },
    EpsilonAdditive { reference_set: Vec<ObjectiveVector> },
    IgdPlus { reference_set: Vec<ObjectiveVector> },
    R2 { weights: Vec<Vec<f64>>, utopian: ObjectiveVector },
}

impl IndicatorSpec {
    pub fn kind(&self) -> IndicatorKind {
        match self {
            IndicatorSpec::Hypervolume { .. } => IndicatorKind::Hypervolume,
            IndicatorSpec::EpsilonAdditive { .. } => IndicatorKind::EpsilonAdditive,
            IndicatorSpec::IgdPlus { .. } => IndicatorKind::IgdPlus,
            IndicatorSpec::R2 { .. } => IndicatorKind::R2,
        }
    }

    pub fn orientation(&self) -> Orientation {
        match self {
            IndicatorSpec::Hypervolume { .. } => Orientation::Maximised,
            _ => Orientation::Minimised,
        }
    }

    /// Configuration under which the indicator is weakly Pareto compliant on
    /// the finite universe `ground`: reference sets are the distinct minimal
    /// elements of `ground`, the hypervolume reference point and the R2
    /// utopian point sit one unit outside its bounding box.
    pub fn for_ground_set(kind: IndicatorKind, ground: &[ObjectiveVector]) -> Result<Self> {
        let d = check_set(ground, "ground set")?;
        let (lo, hi) = bounds(ground);
        Ok(match kind {
            IndicatorKind::Hypervolume => IndicatorSpec::Hypervolume {
                reference_point: ObjectiveVector::new(hi.iter().map(|v| v + 1.0).collect())?,
            },
            IndicatorKind::EpsilonAdditive => {
                IndicatorSpec::EpsilonAdditive { reference_set: distinct(&minimal_unchecked(ground)) }
            }
            IndicatorKind::IgdPlus => IndicatorSpec::IgdPlus { reference_set: distinct(&minimal_unchecked(ground)) },
            IndicatorKind::R2 => IndicatorSpec::R2 {
                weights: simplex_lattice(d, if d == 2 { 10 } else { 4 }),
                utopian: ObjectiveVector::new(lo.iter().map(|v| v - 1.0).collect())?,
            },
        })
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        match self {
            IndicatorSpec::Hypervolume { reference_point } => {
                if reference_point.dim() != d {
                    return usage("hypervolume reference point has the wrong dimension");
                }
            }
            IndicatorSpec::EpsilonAdditive { reference_set } | IndicatorSpec::IgdPlus { reference_set } => {
                if check_set(reference_set, "reference set")? != d {
                    return usage("reference set has the wrong dimension");
                }
                if minimal_unchecked(reference_set).len() != reference_set.len() {
                    return usage("reference set must be nondominated");
                }
            }
            IndicatorSpec::R2 { weights, utopian } => {
                check_weights(weights, d)?;
                if utopian.dim() != d {
                    return usage("utopian point has the wrong dimension");
                }
            }
        }
        Ok(())
    }

    /// Indicator value in its natural orientation.
    pub fn value(&self, set: &[ObjectiveVector]) -> Result<f64> {
        match self {
            IndicatorSpec::Hypervolume { reference_point } => hypervolume(set, reference_point),
            IndicatorSpec::EpsilonAdditive { reference_set } => epsilon_additive(set, reference_set),
            IndicatorSpec::IgdPlus { reference_set } => igd_plus(set, reference_set),
            IndicatorSpec::R2 { weights, utopian } => r2(set, weights, utopian),
        }
    }

    /// Indicator value oriented so that smaller is better.
    pub fn loss(&self, set: &[ObjectiveVector]) -> Result<f64> {
        let v = self.value(set)?;
        Ok(match self.orientation() {
            Orientation::Minimised => v,
            Orientation::Maximised => -v,
        })
    }

    /// Like [`loss`](Self::loss) but defined on the empty set (zero
    /// hypervolume, infinite distance) for use inside selection loops where
    /// a candidate removal may leave nothing behind.
    pub(crate) fn loss_or_empty(&self, set: &[ObjectiveVector]) -> Result<f64> {
        if set.is_empty() {
            return Ok(match self.orientation() {
                Orientation::Maximised => 0.0,
                Orientation::Minimised => f64::INFINITY,
            });
        }
        self.loss(set)
    }
}

/// Either a named indicator to be configured from the experiment's ground
/// set, or a fully explicit configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IndicatorChoice {
    Named(IndicatorKind),
    Explicit(IndicatorSpec),
}

impl IndicatorChoice {
    pub fn resolve(&self, ground: &[ObjectiveVector]) -> Result<IndicatorSpec> {
        match self {
            IndicatorChoice::Named(kind) => IndicatorSpec::for_ground_set(*kind, ground),
            IndicatorChoice::Explicit(spec) => Ok(spec.clone()),
        }
    }

    pub fn kind(&self) -> IndicatorKind {
        match self {
            IndicatorChoice::Named(kind) => *kind,
            IndicatorChoice::Explicit(spec) => spec.kind(),
        }
    }
}

impl From<IndicatorSpec> for IndicatorChoice {
    fn from(spec: IndicatorSpec) -> Self {
        IndicatorChoice::Explicit(spec)
    }
}

/// Componentwise minimum and maximum of a nonempty set.
pub fn bounds(set: &[ObjectiveVector]) -> (Vec<f64>, Vec<f64>) {
    let d = set[0].dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for a in set {
        for (i, v) in a.values().iter().enumerate() {
            lo[i] = lo[i].min(*v);
            hi[i] = hi[i].max(*v);
        }
    }
    (lo, hi)
}
