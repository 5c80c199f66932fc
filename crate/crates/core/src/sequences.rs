//! Solution sequences: synthetic ground sets, ordering and batching,
//! the built-in counterexample scenarios, and the CSV sequence format.

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::archivers::{ArchiverConfig, ArchiverKind, RefPolicy, TiePolicy};
use crate::dominance::{distinct, minimal_unchecked, ObjectiveVector};
use crate::error::{usage, Error, Result};
use crate::indicators::{simplex_lattice, IndicatorChoice, IndicatorKind};
use crate::properties::Property;

/// Solutions arriving together at one timestep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Batch {
    /// Batch label, strictly increasing along a sequence.
    pub t: u64,
    pub solutions: Vec<ObjectiveVector>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sequence {
    pub dim: usize,
    pub batches: Vec<Batch>,
}

impl Sequence {
    /// Checks that every batch is non-empty, labels strictly increase and
    /// all solutions share dimension `dim`.
    pub fn new(dim: usize, batches: Vec<Batch>) -> Result<Self> {
        if dim < 2 {
            return usage("dimension must be at least 2");
        }
        let mut prev: Option<u64> = None;
        for b in &batches {
            if b.solutions.is_empty() {
                return usage(format!("batch {} is empty", b.t));
            }
            if prev.is_some_and(|p| b.t <= p) {
                return usage(format!("batch label {} does not increase", b.t));
            }
            prev = Some(b.t);
            if let Some(s) = b.solutions.iter().find(|s| s.dim() != dim) {
                return usage(format!("solution {s:?} does not have dimension {dim}"));
            }
        }
        Ok(Self { dim, batches })
    }

    /// One singleton batch per solution, labelled 1, 2, ...
    pub fn one_at_a_time(solutions: Vec<ObjectiveVector>) -> Result<Self> {
        let Some(first) = solutions.first() else {
            return usage("sequence needs at least one solution");
        };
        let dim = first.dim();
        let batches = solutions.into_iter().zip(1..).map(|(s, t)| Batch { t, solutions: vec![s] }).collect();
        Self::new(dim, batches)
    }

    pub fn len(&self) -> usize {
        self.batches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.batches.is_empty()
    }

    pub fn solutions(&self) -> impl Iterator<Item = &ObjectiveVector> {
        self.batches.iter().flat_map(|b| b.solutions.iter())
    }

    /// Distinct solutions of the sequence, sorted.
    pub fn ground_set(&self) -> Vec<ObjectiveVector> {
        distinct(&self.solutions().cloned().collect::<Vec<_>>())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// Coordinates sum to the scale.
    Linear,
    /// Quarter sphere of radius `scale` around the origin.
    Concave,
    /// Quarter sphere bulging towards the origin.
    Convex,
    /// Linear front with the middle band of the first objective removed.
    Disconnected,
    /// Linear front in the first two objectives; the rest fixed.
    Degenerate,
}

fn default_scale() -> f64 {
    10.0
}

/// Recipe for a synthetic ground set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontSpec {
    pub shape: Shape,
    pub dim: usize,
    /// Number of mutually nondominated points.
    pub points: usize,
    /// Number of extra points strictly dominated by some front point.
    #[serde(default)]
    pub noise: usize,
    #[serde(default)]
    pub seed: u64,
    /// Snap every coordinate to an integer.
    #[serde(default)]
    pub lattice: bool,
    #[serde(default = "default_scale")]
    pub scale: f64,
    /// Added to every coordinate after generation.
    #[serde(default)]
    pub offset: f64,
}

impl FrontSpec {
    pub fn new(shape: Shape, dim: usize, points: usize) -> Self {
        Self { shape, dim, points, noise: 0, seed: 0, lattice: false, scale: 10.0, offset: 0.0 }
    }
}

/// Generates the front points of `spec` followed by its noise points.
pub fn sample_ground_set(spec: &FrontSpec) -> Result<Vec<ObjectiveVector>> {
    if spec.dim < 2 {
        return usage("dimension must be at least 2");
    }
    if spec.points == 0 {
        return usage("need at least one front point");
    }
    if !(spec.scale.is_finite() && spec.scale > 0.0) || !spec.offset.is_finite() {
        return usage("scale must be positive and offset finite");
    }
    if spec.lattice && spec.scale.fract() != 0.0 {
        return usage("lattice fronts need an integer scale");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let front = if spec.lattice { lattice_front(spec, &mut rng)? } else { continuous_front(spec, &mut rng) };

    let mut out: Vec<Vec<f64>> = front.clone();
    for _ in 0..spec.noise {
        let base = &front[rng.gen_range(0..front.len())];
        let noisy = base
            .iter()
            .map(|&x| if spec.lattice { x + rng.gen_range(1..=3) as f64 } else { x + rng.gen_range(0.5..3.0) })
            .collect();
        out.push(noisy);
    }
    out.into_iter().map(|v| ObjectiveVector::new(v.into_iter().map(|x| x + spec.offset).collect())).collect()
}

fn in_gap(first: f64, scale: f64) -> bool {
    first > 0.4 * scale && first < 0.6 * scale
}

/// Candidate pool on the integer lattice, sorted and distinct.
fn lattice_pool(spec: &FrontSpec) -> Vec<Vec<f64>> {
    let s = spec.scale;
    let d = spec.dim;
    let linear = |dim: usize| {
        simplex_lattice(dim, s as usize)
            .into_iter()
            .map(|w| w.into_iter().map(|x| (x * s).round()).collect::<Vec<f64>>())
            .collect::<Vec<_>>()
    };
    let pool: Vec<Vec<f64>> = match spec.shape {
        Shape::Linear => linear(d),
        Shape::Disconnected => linear(d).into_iter().filter(|p| !in_gap(p[0], s)).collect(),
        Shape::Degenerate => linear(2)
            .into_iter()
            .map(|mut p| {
                p.resize(d, (s / 2.0).round());
                p
            })
            .collect(),
        Shape::Concave | Shape::Convex => {
            let dirs = simplex_lattice(d, 4 * s as usize);
            let snapped: Vec<ObjectiveVector> = dirs
                .iter()
                .map(|w| {
                    let p = sphere_point(spec.shape, w, s);
                    ObjectiveVector::new(p.into_iter().map(f64::round).collect())
                        .expect("rounded sphere point is finite")
                })
                .collect();
            return distinct(&minimal_unchecked(&snapped)).into_iter().map(ObjectiveVector::into_values).collect();
        }
    };
    let pool: Vec<ObjectiveVector> =
        pool.into_iter().map(|p| ObjectiveVector::new(p).expect("lattice point is finite")).collect();
    distinct(&pool).into_iter().map(ObjectiveVector::into_values).collect()
}

/// Number of distinct front points available when `spec.lattice` is set.
pub fn lattice_capacity(spec: &FrontSpec) -> usize {
    lattice_pool(spec).len()
}

fn lattice_front(spec: &FrontSpec, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<f64>>> {
    let pool = lattice_pool(spec);
    if spec.points > pool.len() {
        return usage(format!("{} points requested but the lattice holds only {}", spec.points, pool.len()));
    }
    if spec.dim == 2 || spec.shape == Shape::Degenerate {
        // Evenly spaced along the (sorted) front.
        let n = spec.points;
        let last = pool.len() - 1;
        let picks: Vec<usize> =
            if n == 1 { vec![last / 2] } else { (0..n).map(|i| (i * last + (n - 1) / 2) / (n - 1)).collect() };
        let mut out: Vec<Vec<f64>> = picks.iter().map(|&i| pool[i].clone()).collect();
        out.dedup();
        if out.len() < n {
            let mut rest: Vec<Vec<f64>> = pool.iter().filter(|p| !out.contains(p)).cloned().collect();
            rest.shuffle(rng);
            out.extend(rest.into_iter().take(n - out.len()));
            out.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        }
        return Ok(out);
    }
    let mut out: Vec<Vec<f64>> = pool.choose_multiple(rng, spec.points).cloned().collect();
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    Ok(out)
}

fn sphere_point(shape: Shape, direction: &[f64], scale: f64) -> Vec<f64> {
    let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    let unit = direction.iter().map(|x| x / norm);
    match shape {
        Shape::Concave => unit.map(|u| scale * u).collect(),
        _ => unit.map(|u| scale * (1.0 - u)).collect(),
    }
}

fn random_simplex(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let e: Vec<f64> = (0..d).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|x| x / total).collect()
}

fn continuous_front(spec: &FrontSpec, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let s = spec.scale;
    let d = spec.dim;
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(spec.points);
    while out.len() < spec.points {
        let p: Vec<f64> = match spec.shape {
            Shape::Linear => random_simplex(d, rng).into_iter().map(|x| x * s).collect(),
            Shape::Disconnected => {
                let p: Vec<f64> = random_simplex(d, rng).into_iter().map(|x| x * s).collect();
                if in_gap(p[0], s) {
                    continue;
                }
                p
            }
            Shape::Degenerate => {
                let mut p: Vec<f64> = random_simplex(2, rng).into_iter().map(|x| x * s).collect();
                p.resize(d, s / 2.0);
                p
            }
            Shape::Concave | Shape::Convex => {
                let dir: Vec<f64> = (0..d).map(|_| rng.gen::<f64>().max(1e-12)).collect();
                sphere_point(spec.shape, &dir, s)
            }
        };
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// How one pass over a ground set is ordered.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrderPolicy {
    /// A fresh uniform permutation per pass.
    Shuffle { seed: u64 },
    /// Lexicographic order (first objective, then the next, ...).
    LexicographicSweep,
    /// The best point of each objective first, then lexicographic order.
    ExtremesFirst,
    /// The given order, verbatim.
    Replay,
}

/// Concatenates `passes` orderings of `ground` and chunks them into
/// batches of `batch_size`, labelled 1, 2, ...
pub fn order_and_batch(
    ground: &[ObjectiveVector],
    policy: &OrderPolicy,
    batch_size: usize,
    passes: usize,
) -> Result<Sequence> {
    if batch_size == 0 || passes == 0 {
        return usage("batch size and pass count must be at least 1");
    }
    let Some(first) = ground.first() else {
        return usage("ground set is empty");
    };
    let dim = first.dim();
    let mut rng = match policy {
        OrderPolicy::Shuffle { seed } => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    let mut stream: Vec<ObjectiveVector> = Vec::with_capacity(ground.len() * passes);
    for _ in 0..passes {
        let mut pass: Vec<ObjectiveVector> = ground.to_vec();
        match policy {
            OrderPolicy::Shuffle { .. } => pass.shuffle(rng.as_mut().expect("shuffle has a generator")),
            OrderPolicy::LexicographicSweep => pass.sort(),
            OrderPolicy::ExtremesFirst => pass = extremes_first(pass),
            OrderPolicy::Replay => {}
        }
        stream.extend(pass);
    }
    let batches = stream.chunks(batch_size).zip(1..).map(|(c, t)| Batch { t, solutions: c.to_vec() }).collect();
    Sequence::new(dim, batches)
}

fn extremes_first(mut pass: Vec<ObjectiveVector>) -> Vec<ObjectiveVector> {
    pass.sort();
    let d = pass[0].dim();
    let mut head = Vec::new();
    for k in 0..d {
        let best = (0..pass.len())
            .min_by(|&i, &j| pass[i].values()[k].total_cmp(&pass[j].values()[k]))
            .expect("pass is not empty");
        head.push(pass.remove(best));
        if pass.is_empty() {
            break;
        }
    }
    head.extend(pass);
    head
}

/// The built-in counterexample scenarios.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioName {
    Fig1Crowding,
    Fig2Adom,
    Fig4AdaptiveHv,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 3] =
        [ScenarioName::Fig1Crowding, ScenarioName::Fig2Adom, ScenarioName::Fig4AdaptiveHv];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::Fig1Crowding => "fig1_crowding",
            ScenarioName::Fig2Adom => "fig2_adom",
            ScenarioName::Fig4AdaptiveHv => "fig4_adaptive_hv",
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::Usage(format!("unknown scenario {s:?}")))
    }
}

/// A crafted sequence, the archiver it targets, and exactly which anytime
/// properties that archiver violates on it.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: ScenarioName,
    pub sequence: Sequence,
    pub archiver: ArchiverConfig,
    pub violated: Vec<Property>,
    /// A second archiver on the same sequence and the properties it
    /// violates, when the scenario contrasts two configurations.
    pub control: Option<(ArchiverConfig, Vec<Property>)>,
}

fn seq2(points: &[(f64, f64)]) -> Sequence {
    Sequence::one_at_a_time(points.iter().map(|&(a, b)| crate::ov![a, b]).collect()).expect("scenario points are valid")
}

pub fn scenario(name: ScenarioName) -> Scenario {
    match name {
        ScenarioName::Fig1Crowding => Scenario {
            name,
            sequence: seq2(&[(0.0, 10.0), (2.0, 7.0), (10.0, 0.0), (6.0, 2.0), (4.0, 7.5)]),
            archiver: ArchiverConfig::new(ArchiverKind::Nsga2 { batch_native: false }, Some(3)).named("nsga2"),
            violated: vec![Property::ParetoSubset, Property::PointMonotone, Property::SetMonotone],
            control: None,
        },
        ScenarioName::Fig2Adom => Scenario {
            name,
            sequence: seq2(&[(4.0, 5.0), (5.0, 4.0), (1.0, 8.0), (3.0, 3.0), (2.0, 9.0)]),
            archiver: ArchiverConfig::new(ArchiverKind::ADom, Some(2)).named("a_dom"),
            violated: vec![Property::ParetoSubset],
            control: None,
        },
        ScenarioName::Fig4AdaptiveHv => {
            let hv = |ref_policy| {
                ArchiverConfig::new(
                    ArchiverKind::IndicatorMu1 {
                        indicator: IndicatorChoice::Named(IndicatorKind::Hypervolume),
                        tie_policy: TiePolicy::RejectNew,
                        ref_policy,
                    },
                    Some(2),
                )
            };
            Scenario {
                name,
                sequence: seq2(&FIG4_POINTS),
                archiver: hv(RefPolicy::AdaptiveNadirPlusOne).named("sms_emoa"),
                violated: FIG4_VIOLATED.to_vec(),
                control: Some((hv(RefPolicy::Fixed).named("a_hv"), Vec::new())),
            }
        }
    }
}

// Under the nadir-following reference the archive runs {(4,5),(6,2)},
// {(4,5),(0,11)}, {(4,5),(11,0)}, {(4,5),(9,2)}.
const FIG4_POINTS: [(f64, f64); 5] = [(4.0, 5.0), (6.0, 2.0), (0.0, 11.0), (11.0, 0.0), (9.0, 2.0)];
const FIG4_VIOLATED: [Property; 3] = [Property::ParetoSubset, Property::PointMonotone, Property::SetMonotone];

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source }
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io { path: Default::default(), source },
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
            Error::Format { line, message: format!("expected {expected_len} fields, found {len}") }
        }
        kind => Error::Format { line, message: format!("{kind:?}") },
    }
}

/// Parses the CSV sequence format: header `t,f1,...,fd`, one solution per
/// row, rows with equal `t` forming one batch.
pub fn parse_sequence<R: Read>(reader: R) -> Result<Sequence> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        Some(r) => r.map_err(csv_err)?,
        None => return Err(Error::Format { line: 1, message: "missing header".into() }),
    };
    let dim = header.len().saturating_sub(1);
    let well_formed = header.get(0).map(str::trim) == Some("t")
        && (1..=dim).all(|k| header.get(k).map(str::trim) == Some(format!("f{k}").as_str()));
    if dim < 2 || !well_formed {
        return Err(Error::Format { line: 1, message: "header must be t,f1,...,fd with d >= 2".into() });
    }

    let mut batches: Vec<Batch> = Vec::new();
    for rec in records {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let fail = |message: String| Error::Format { line, message };
        if rec.len() != dim + 1 {
            return Err(fail(format!("expected {} fields, found {}", dim + 1, rec.len())));
        }
        let t: u64 = rec[0]
            .trim()
            .parse()
            .map_err(|_| fail(format!("batch index {:?} is not a non-negative integer", &rec[0])))?;
        let values = (1..=dim)
            .map(|k| rec[k].trim().parse::<f64>().map_err(|_| fail(format!("bad value {:?}", &rec[k]))))
            .collect::<Result<Vec<f64>>>()?;
        let s = ObjectiveVector::new(values).map_err(|e| fail(e.to_string()))?;
        match batches.last_mut() {
            Some(b) if b.t == t => b.solutions.push(s),
            Some(b) if b.t > t => {
                return Err(fail(format!("batch index {t} follows {}", b.t)));
            }
            _ => batches.push(Batch { t, solutions: vec![s] }),
        }
    }
    Sequence::new(dim, batches)
}

pub fn read_sequence(path: impl AsRef<Path>) -> Result<Sequence> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    parse_sequence(file).map_err(|e| match e {
        Error::Io { source, .. } => io_err(path, source),
        other => other,
    })
}

/// Header `prefix,f1,...,fd`.
pub(crate) fn csv_header(prefix: &str, dim: usize) -> String {
    let mut h = prefix.to_string();
    for k in 1..=dim {
        h.push_str(&format!(",f{k}"));
    }
    h
}

/// Comma-joined shortest round-trip rendering of the values.
pub(crate) fn csv_values(s: &ObjectiveVector) -> String {
    s.values().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

pub fn render_sequence(sequence: &Sequence) -> String {
    let mut out = csv_header("t", sequence.dim);
    out.push('\n');
    for b in &sequence.batches {
        for s in &b.solutions {
            out.push_str(&format!("{},{}\n", b.t, csv_values(s)));
        }
    }
    out
}

pub fn write_sequence(sequence: &Sequence, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut file = File::create(path).map_err(|e| io_err(path, e))?;
    file.write_all(render_sequence(sequence).as_bytes()).map_err(|e| io_err(path, e))
}
