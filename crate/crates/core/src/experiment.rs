//! Experiment runner behind the command-line tool: run archivers over a
//! sequence, compare them against the unbounded archive, and classify them
//! by which properties they exhibit on random and crafted sequences.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::archivers::{
    run, ArchiverConfig, ArchiverKind, EpsMode, IdealPolicy, RefPolicy, Scalarizer, TiePolicy, Trajectory,
};
use crate::dominance::{minimal_unchecked, ObjectiveVector};
use crate::error::{usage, Error, Result};
use crate::indicators::{IndicatorChoice, IndicatorKind, IndicatorSpec, Orientation};
use crate::properties::{
    check_anytime, check_lemmas, default_budget, default_stability_window, run_limit_experiment, LimitVerdict,
    Property, ViolationReport, Witness,
};
use crate::sequences::{
    csv_header, csv_values, lattice_capacity, order_and_batch, read_sequence, sample_ground_set, scenario, FrontSpec,
    OrderPolicy, ScenarioName, Sequence, Shape,
};

pub const SCHEMA_VERSION: u32 = 1;

fn check_schema(version: u32) -> Result<()> {
    if version != SCHEMA_VERSION {
        return usage(format!("unsupported schema_version {version}, expected {SCHEMA_VERSION}"));
    }
    Ok(())
}

fn one() -> usize {
    1
}

/// A generated sequence: sample a ground set, then order and batch it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub front: FrontSpec,
    #[serde(default = "default_order")]
    pub order: OrderPolicy,
    #[serde(default = "one")]
    pub batch_size: usize,
    #[serde(default = "one")]
    pub passes: usize,
}

fn default_order() -> OrderPolicy {
    OrderPolicy::Shuffle { seed: 0 }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Scenario(ScenarioName),
    /// CSV sequence file, relative paths resolved against the config file.
    File(PathBuf),
    Generator(GeneratorSpec),
}

impl Source {
    pub fn load(&self) -> Result<Sequence> {
        match self {
            Source::Scenario(name) => Ok(scenario(*name).sequence),
            Source::File(path) => read_sequence(path),
            Source::Generator(g) => {
                let ground = sample_ground_set(&g.front)?;
                order_and_batch(&ground, &g.order, g.batch_size, g.passes)
            }
        }
    }

    fn describe(&self) -> String {
        match self {
            Source::Scenario(name) => format!("scenario:{name}"),
            Source::File(path) => format!("file:{}", path.display()),
            Source::Generator(g) => format!("generator:{:?}/{}", g.front.shape, g.front.points).to_lowercase(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Anytime,
    Lemmas,
    Limit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitSettings {
    #[serde(default = "default_limit_seeds")]
    pub seeds: usize,
    #[serde(default)]
    pub window: Option<usize>,
    #[serde(default)]
    pub budget: Option<usize>,
}

fn default_limit_seeds() -> usize {
    20
}

impl Default for LimitSettings {
    fn default() -> Self {
        Self { seeds: default_limit_seeds(), window: None, budget: None }
    }
}

fn default_checks() -> Vec<Check> {
    vec![Check::Anytime]
}

fn default_metrics() -> Vec<IndicatorChoice> {
    [IndicatorKind::Hypervolume, IndicatorKind::EpsilonAdditive, IndicatorKind::IgdPlus, IndicatorKind::R2]
        .into_iter()
        .map(IndicatorChoice::Named)
        .collect()
}

/// Configuration of `run` and `compare`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub archivers: Vec<ArchiverConfig>,
    pub source: Source,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<IndicatorChoice>,
    #[serde(default = "default_checks")]
    pub checks: Vec<Check>,
    #[serde(default)]
    pub limit: LimitSettings,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|e| Error::Format { line: e.line(), message: e.to_string() })
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| Error::Format { line: e.line(), message: e.to_string() })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative sequence and output paths are taken
    /// relative to the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut cfg: Self = read_json(path)?;
        cfg.validate()?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let Source::File(p) = &mut cfg.source {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(p) = &mut cfg.output {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_schema(self.schema_version)?;
        if self.archivers.is_empty() {
            return usage("at least one archiver is required");
        }
        if self.checks.contains(&Check::Limit) && self.limit.seeds == 0 {
            return usage("limit checks need at least one seed");
        }
        Ok(())
    }

    /// Archivers with their run seed mixed with the experiment seed and
    /// unique labels.
    fn seeded_archivers(&self) -> Vec<ArchiverConfig> {
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        self.archivers
            .iter()
            .map(|a| {
                let mut a = a.clone();
                a.rng_seed = a.rng_seed.wrapping_add(self.seed);
                let label = a.label();
                let k = seen.entry(label.clone()).or_insert(0);
                *k += 1;
                if *k > 1 {
                    a.name = Some(format!("{label}_{k}"));
                } else {
                    a.name = Some(label);
                }
                a
            })
            .collect()
    }
}

/// A metric resolved against a ground set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub spec: IndicatorSpec,
}

fn resolve_metrics(choices: &[IndicatorChoice], ground: &[ObjectiveVector]) -> Result<Vec<Metric>> {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    choices
        .iter()
        .map(|c| {
            let base = c.kind().name();
            let k = seen.entry(base).or_insert(0);
            *k += 1;
            let name = if *k > 1 { format!("{base}_{k}") } else { base.to_string() };
            Ok(Metric { name, spec: c.resolve(ground)? })
        })
        .collect()
}

fn metric_value(m: &Metric, set: &[ObjectiveVector]) -> Result<f64> {
    if set.is_empty() {
        return Ok(match m.spec.orientation() {
            Orientation::Maximised => 0.0,
            Orientation::Minimised => f64::INFINITY,
        });
    }
    m.spec.value(set)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArchiverRun {
    pub label: String,
    /// Configuration after resolution against the ground set.
    pub config: ArchiverConfig,
    pub final_archive: Vec<ObjectiveVector>,
    /// Final value per metric, in metric order.
    pub final_metrics: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anytime: Option<Vec<ViolationReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemmas: Option<Vec<ViolationReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<Vec<LimitVerdict>>,
    #[serde(skip)]
    pub trajectory: Trajectory,
    /// Metric values per snapshot.
    #[serde(skip)]
    pub metric_rows: Vec<Vec<f64>>,
}

impl ArchiverRun {
    /// Number of witnesses across every check.
    pub fn violation_count(&self) -> usize {
        let reports = self.anytime.iter().chain(self.lemmas.iter()).flatten();
        let limit =
            self.limit.iter().flatten().filter(|v| v.stabilized && (!v.is_pareto_subset || !v.is_optimal)).count();
        reports.map(|r| r.count).sum::<usize>() + limit
    }

    pub fn counts_by_property(&self) -> BTreeMap<String, usize> {
        self.anytime
            .iter()
            .chain(self.lemmas.iter())
            .flatten()
            .map(|r| (r.property.name().to_string(), r.count))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub source: String,
    pub dim: usize,
    pub timesteps: usize,
    pub seed: u64,
    pub metrics: Vec<Metric>,
    pub archivers: Vec<ArchiverRun>,
}

impl RunReport {
    pub fn violation_count(&self) -> usize {
        self.archivers.iter().map(ArchiverRun::violation_count).sum()
    }
}

fn run_one(
    cfg: &ExperimentConfig,
    archiver: &ArchiverConfig,
    sequence: &Sequence,
    ground: &[ObjectiveVector],
    metrics: &[Metric],
) -> Result<ArchiverRun> {
    let resolved = archiver.resolve(ground)?;
    let trajectory = run(&resolved, sequence)?;
    let metric_rows = trajectory
        .snapshots
        .iter()
        .map(|s| metrics.iter().map(|m| metric_value(m, s)).collect::<Result<Vec<f64>>>())
        .collect::<Result<Vec<_>>>()?;
    let final_metrics = metric_rows.last().cloned().unwrap_or_default();

    let anytime = if cfg.checks.contains(&Check::Anytime) { Some(check_anytime(&trajectory)?) } else { None };
    let lemmas = match (&resolved.kind, cfg.checks.contains(&Check::Lemmas)) {
        (ArchiverKind::WeakCompliant { indicator }, true) => {
            Some(check_lemmas(&trajectory, &indicator.resolve(ground)?)?)
        }
        _ => None,
    };
    let limit = if cfg.checks.contains(&Check::Limit) {
        let window = cfg.limit.window.unwrap_or_else(|| default_stability_window(ground.len()));
        let budget = cfg.limit.budget.unwrap_or_else(|| default_budget(ground.len()));
        Some(
            (0..cfg.limit.seeds as u64)
                .map(|k| run_limit_experiment(&resolved, ground, cfg.seed.wrapping_add(k), window, budget))
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    Ok(ArchiverRun {
        label: archiver.label(),
        final_archive: trajectory.last().to_vec(),
        config: resolved,
        final_metrics,
        anytime,
        lemmas,
        limit,
        trajectory,
        metric_rows,
    })
}

/// Runs every configured archiver over the configured sequence.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let sequence = cfg.source.load()?;
    if sequence.is_empty() {
        return usage("the sequence has no batches");
    }
    let ground = sequence.ground_set();
    let metrics = resolve_metrics(&cfg.metrics, &ground)?;
    let archivers = cfg
        .seeded_archivers()
        .par_iter()
        .map(|a| run_one(cfg, a, &sequence, &ground, &metrics))
        .collect::<Result<Vec<_>>>()?;
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        source: cfg.source.describe(),
        dim: sequence.dim,
        timesteps: sequence.len(),
        seed: cfg.seed,
        metrics,
        archivers,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })
}

/// Archive snapshots as CSV: header `snapshot,t,f1,...,fd`, one row per
/// member per snapshot.
pub fn render_trajectory(tr: &Trajectory) -> String {
    let mut out = csv_header("snapshot,t", tr.dim);
    out.push('\n');
    for (k, snap) in tr.snapshots.iter().enumerate() {
        for s in snap {
            let _ = writeln!(out, "{k},{},{}", tr.labels[k], csv_values(s));
        }
    }
    out
}

fn render_metric_rows(tr: &Trajectory, metrics: &[Metric], rows: &[Vec<f64>]) -> String {
    let mut out = String::from("snapshot,t");
    for m in metrics {
        out.push(',');
        out.push_str(&m.name);
    }
    out.push('\n');
    for (k, row) in rows.iter().enumerate() {
        let _ = write!(out, "{k},{}", tr.labels[k]);
        for v in row {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Writes per-archiver trajectory (CSV and JSON) and metric files plus
/// `report.json` into `dir`.
pub fn write_run(report: &RunReport, dir: &Path) -> Result<()> {
    create_dir(dir)?;
    for a in &report.archivers {
        write_file(&dir.join(format!("{}.trajectory.csv", a.label)), &render_trajectory(&a.trajectory))?;
        write_file(&dir.join(format!("{}.trajectory.json", a.label)), &to_json(&a.trajectory))?;
        write_file(
            &dir.join(format!("{}.metrics.csv", a.label)),
            &render_metric_rows(&a.trajectory, &report.metrics, &a.metric_rows),
        )?;
    }
    write_file(&dir.join("report.json"), &to_json(report))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricComparison {
    pub metric: String,
    pub value: f64,
    /// The same metric on the minimal set of everything seen.
    pub unbounded: f64,
    /// How many times worse than the unbounded archive (1 = as good);
    /// absent when the unbounded value makes the ratio undefined.
    pub ratio: Option<f64>,
    /// Mean value over the limit runs' final archives, when limit checks
    /// were requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit_value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub label: String,
    pub metrics: Vec<MetricComparison>,
    pub violations: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub schema_version: u32,
    pub source: String,
    pub seed: u64,
    pub rows: Vec<CompareRow>,
}

impl CompareReport {
    pub fn violation_count(&self) -> usize {
        self.rows.iter().flat_map(|r| r.violations.values()).sum()
    }
}

/// Ratio of `value` to the unbounded archive's value, oriented so that 1 is
/// as good as the unbounded archive and larger is worse.
pub fn ratio_vs_unbounded(orientation: Orientation, value: f64, unbounded: f64) -> Option<f64> {
    let (num, den) = match orientation {
        Orientation::Minimised => (value, unbounded),
        Orientation::Maximised => (unbounded, value),
    };
    (den != 0.0 && num.is_finite() && den.is_finite()).then(|| num / den)
}

pub fn compare_experiment(cfg: &ExperimentConfig) -> Result<CompareReport> {
    if cfg.archivers.len() < 2 {
        return usage("compare needs at least two archivers");
    }
    let report = run_experiment(cfg)?;
    let sequence = cfg.source.load()?;
    let seen: Vec<ObjectiveVector> = sequence.solutions().cloned().collect();
    let unbounded = minimal_unchecked(&seen);
    let rows = report
        .archivers
        .iter()
        .map(|a| {
            let metrics = report
                .metrics
                .iter()
                .zip(&a.final_metrics)
                .map(|(m, &value)| {
                    let reference = metric_value(m, &unbounded)?;
                    let limit_value = match &a.limit {
                        Some(runs) if !runs.is_empty() => {
                            let total = runs.iter().map(|v| metric_value(m, &v.final_archive)).sum::<Result<f64>>()?;
                            Some(total / runs.len() as f64)
                        }
                        _ => None,
                    };
                    Ok(MetricComparison {
                        metric: m.name.clone(),
                        value,
                        unbounded: reference,
                        ratio: ratio_vs_unbounded(m.spec.orientation(), value, reference),
                        limit_value,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(CompareRow { label: a.label.clone(), metrics, violations: a.counts_by_property() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CompareReport { schema_version: SCHEMA_VERSION, source: report.source, seed: cfg.seed, rows })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"))
}

fn render_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    for r in std::iter::once(header).chain(rows.iter().map(Vec::as_slice)) {
        let line: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Aligned text table: one line per archiver and metric.
pub fn render_compare(report: &CompareReport) -> String {
    let header: Vec<String> = ["archiver", "metric", "value", "unbounded", "ratio", "limit", "violations"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::new();
    for r in &report.rows {
        let violations: usize = r.violations.values().sum();
        for m in &r.metrics {
            rows.push(vec![
                r.label.clone(),
                m.metric.clone(),
                format!("{:.4}", m.value),
                format!("{:.4}", m.unbounded),
                fmt_opt(m.ratio),
                fmt_opt(m.limit_value),
                violations.to_string(),
            ]);
        }
    }
    render_table(&header, &rows)
}

pub fn write_compare(report: &CompareReport, dir: &Path) -> Result<()> {
    create_dir(dir)?;
    write_file(&dir.join("compare.json"), &to_json(report))?;
    write_file(&dir.join("compare.txt"), &render_compare(report))
}

/// Budgets and archiver rows of a classification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    pub schema_version: u32,
    #[serde(default = "default_sequences")]
    pub sequences: usize,
    #[serde(default = "default_max_ground")]
    pub max_ground: usize,
    #[serde(default = "default_dims")]
    pub dims: Vec<usize>,
    #[serde(default = "default_max_capacity")]
    pub max_capacity: usize,
    #[serde(default = "default_limit_seeds")]
    pub limit_seeds: usize,
    #[serde(default)]
    pub window: Option<usize>,
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Archiver rows; each bounded row's capacity is drawn per case.
    #[serde(default)]
    pub rows: Option<Vec<ArchiverConfig>>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_sequences() -> usize {
    200
}
fn default_max_ground() -> usize {
    30
}
fn default_dims() -> Vec<usize> {
    vec![2, 3]
}
fn default_max_capacity() -> usize {
    10
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            sequences: default_sequences(),
            max_ground: default_max_ground(),
            dims: default_dims(),
            max_capacity: default_max_capacity(),
            limit_seeds: default_limit_seeds(),
            window: None,
            budget: None,
            seed: 0,
            rows: None,
            output: None,
        }
    }
}

impl ClassifyConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut cfg: Self = read_json(path)?;
        cfg.validate()?;
        if let Some(p) = &mut cfg.output {
            if p.is_relative() {
                *p = path.parent().unwrap_or(Path::new("")).join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_schema(self.schema_version)?;
        if self.max_ground < 4 {
            return usage("max_ground must be at least 4");
        }
        if self.max_capacity < 2 {
            return usage("max_capacity must be at least 2");
        }
        if self.dims.is_empty() || self.dims.iter().any(|&d| !(2..=4).contains(&d)) {
            return usage("dims must be a non-empty subset of 2..=4");
        }
        if matches!(&self.rows, Some(r) if r.is_empty()) {
            return usage("rows must not be empty");
        }
        Ok(())
    }

    pub fn rows(&self) -> Vec<ArchiverConfig> {
        self.rows.clone().unwrap_or_else(default_rows)
    }
}

/// The representative archivers of the classification table.
pub fn default_rows() -> Vec<ArchiverConfig> {
    let bounded = |kind| ArchiverConfig::new(kind, Some(2));
    let mu1 = |kind, ref_policy| ArchiverKind::IndicatorMu1 {
        indicator: IndicatorChoice::Named(kind),
        tie_policy: TiePolicy::RejectNew,
        ref_policy,
    };
    let wc = |kind| ArchiverKind::WeakCompliant { indicator: IndicatorChoice::Named(kind) };
    let moead = |scalarizer| ArchiverKind::Moead { scalarizer, weights: None, ideal: IdealPolicy::GroundTruth };
    vec![
        bounded(ArchiverKind::Nsga2 { batch_native: false }).named("nsga2"),
        bounded(ArchiverKind::ADom).named("a_dom"),
        ArchiverConfig::new(ArchiverKind::EpsBox { epsilon: 0.1, mode: EpsMode::Approx }, None).named("eps_approx"),
        ArchiverConfig::new(ArchiverKind::EpsBox { epsilon: 0.1, mode: EpsMode::Pareto }, None).named("eps_pareto"),
        bounded(moead(Scalarizer::Pbi { theta: 5.0 })).named("moead_pbi"),
        bounded(moead(Scalarizer::Tch)).named("moead_tch"),
        bounded(mu1(IndicatorKind::R2, RefPolicy::Fixed)).named("a_r2"),
        bounded(mu1(IndicatorKind::Hypervolume, RefPolicy::Fixed)).named("a_hv"),
        bounded(mu1(IndicatorKind::Hypervolume, RefPolicy::AdaptiveNadirPlusOne)).named("sms_emoa"),
        bounded(ArchiverKind::Mga).named("mga"),
        bounded(wc(IndicatorKind::EpsilonAdditive)).named("wc_eps"),
        bounded(wc(IndicatorKind::IgdPlus)).named("wc_igd"),
        bounded(wc(IndicatorKind::R2)).named("wc_r2"),
    ]
}

/// One random classification case: a positive integer ground set, a
/// sequence over it and a capacity.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomCase {
    pub ground: Vec<ObjectiveVector>,
    pub sequence: Sequence,
    pub capacity: usize,
}

fn case_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(index) << 20);
    rng
}

/// Draws case `index` of stream `stream`: dimension from `dims`,
/// `4 ≤ |Y| ≤ max_ground` lattice points (front plus dominated noise,
/// coordinates ≥ 1; the front is capped at what the shape's lattice holds), a shuffled sequence of one or two passes, and
/// `2 ≤ N ≤ max_capacity`.
pub fn random_case(
    seed: u64,
    stream: u64,
    index: u64,
    dims: &[usize],
    max_ground: usize,
    max_capacity: usize,
) -> Result<RandomCase> {
    let mut rng = case_rng(seed, stream, index);
    let dim = dims[rng.gen_range(0..dims.len())];
    let size = rng.gen_range(4..=max_ground.max(4));
    let points = rng.gen_range(2..=size);
    let shapes = [Shape::Linear, Shape::Concave, Shape::Convex, Shape::Disconnected, Shape::Degenerate];
    let shape = shapes[rng.gen_range(0..shapes.len())];
    let mut spec = FrontSpec {
        shape,
        dim,
        points,
        noise: 0,
        seed: rng.gen(),
        lattice: true,
        scale: if dim == 2 { 60.0 } else { 20.0 },
        offset: 1.0,
    };
    spec.points = points.min(lattice_capacity(&spec));
    spec.noise = size - spec.points;
    let ground = sample_ground_set(&spec)?;
    let passes = rng.gen_range(1..=2);
    let sequence = order_and_batch(&ground, &OrderPolicy::Shuffle { seed: rng.gen() }, 1, passes)?;
    Ok(RandomCase { ground, sequence, capacity: rng.gen_range(2..=max_capacity.max(2)) })
}

/// Sequence on which MOEA/D-PBI replaces (1,3) by the dominated (3,3).
pub fn pbi_deterioration_sequence() -> Sequence {
    Sequence::one_at_a_time(vec![crate::ov![0, 4], crate::ov![4, 0], crate::ov![1, 3], crate::ov![3, 3]])
        .expect("valid points")
}

/// Hand-made sequences every row also runs on, with their capacities.
pub fn crafted_cases() -> Vec<(String, Sequence, usize)> {
    let mut out: Vec<(String, Sequence, usize)> = ScenarioName::ALL
        .into_iter()
        .map(|n| {
            let sc = scenario(n);
            (n.to_string(), sc.sequence, sc.archiver.capacity.unwrap_or(2))
        })
        .collect();
    out.push(("pbi_deterioration".into(), pbi_deterioration_sequence(), 3));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// No witness found at the configured budget; not a proof.
    Held,
    /// A stored witness exists.
    Violated,
    /// Budget exhausted or no applicable case.
    Inconclusive,
    NotApplicable,
}

impl Status {
    pub fn symbol(self) -> &'static str {
        match self {
            Status::Held => "held",
            Status::Violated => "VIOLATED",
            Status::Inconclusive => "inconclusive",
            Status::NotApplicable => "n/a",
        }
    }
}

/// Concrete evidence behind a "violated" entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// Feed `trajectory` to the checker to reproduce `witness`.
    Trajectory { case: String, capacity: Option<usize>, witness: Witness, trajectory: Trajectory },
    /// A stabilized limit run whose final archive fails the property.
    /// Stabilization is empirical (no change within the window).
    Limit { case: String, capacity: Option<usize>, ground: Vec<ObjectiveVector>, final_archive: Vec<ObjectiveVector> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub status: Status,
    /// Cases the property was checked on.
    pub cases: usize,
    /// Cases with at least one witness.
    pub violating_cases: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<Evidence>,
}

impl Entry {
    fn not_applicable() -> Self {
        Self { status: Status::NotApplicable, cases: 0, violating_cases: 0, evidence: None }
    }
}

/// Matrix columns.
pub const COLUMNS: [&str; 7] = [
    "pareto_subset",
    "point_monotone",
    "set_monotone",
    "lemma1_monotone",
    "lemma2_no_revisit",
    "limit_pareto_subset",
    "limit_optimal",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyRow {
    pub label: String,
    pub config: ArchiverConfig,
    /// Keyed by column name.
    pub entries: BTreeMap<String, Entry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub schema_version: u32,
    pub seed: u64,
    pub sequences: usize,
    pub limit_seeds: usize,
    pub rows: Vec<ClassifyRow>,
}

impl ClassifyReport {
    pub fn row(&self, label: &str) -> Option<&ClassifyRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn status(&self, label: &str, column: &str) -> Option<Status> {
        self.row(label)?.entries.get(column).map(|e| e.status)
    }

    pub fn violation_count(&self) -> usize {
        self.rows.iter().flat_map(|r| r.entries.values()).filter(|e| e.status == Status::Violated).count()
    }
}

fn is_positive(seq: &Sequence) -> bool {
    seq.solutions().all(|s| s.values().iter().all(|&v| v > 0.0))
}

fn with_capacity(row: &ArchiverConfig, capacity: usize) -> ArchiverConfig {
    let mut c = row.clone();
    if c.kind.is_bounded() {
        c.capacity = Some(capacity);
    }
    c
}

/// Reports of one (row, case) cell, or `None` when the row cannot run on
/// the case (ε-boxes need positive coordinates).
type CellOutcome = Option<(Vec<ViolationReport>, Trajectory, Option<usize>)>;

fn anytime_cell(row: &ArchiverConfig, seq: &Sequence, capacity: usize) -> Result<CellOutcome> {
    if matches!(row.kind, ArchiverKind::EpsBox { .. }) && !is_positive(seq) {
        return Ok(None);
    }
    let config = with_capacity(row, capacity).resolve(&seq.ground_set())?;
    let tr = run(&config, seq)?;
    let mut reports = check_anytime(&tr)?;
    if let ArchiverKind::WeakCompliant { indicator } = &config.kind {
        reports.extend(check_lemmas(&tr, &indicator.resolve(&seq.ground_set())?)?);
    }
    Ok(Some((reports, tr, config.capacity)))
}

fn limit_cell(
    cfg: &ClassifyConfig,
    row: &ArchiverConfig,
    case: &RandomCase,
    seed: u64,
) -> Result<(LimitVerdict, Option<usize>)> {
    let config = with_capacity(row, case.capacity);
    let window = cfg.window.unwrap_or_else(|| default_stability_window(case.ground.len()));
    let budget = cfg.budget.unwrap_or_else(|| default_budget(case.ground.len()));
    let verdict = run_limit_experiment(&config, &case.ground, seed, window, budget)?;
    Ok((verdict, config.capacity))
}

/// Runs every row over `sequences` random cases plus the crafted cases,
/// and `limit_seeds` limit experiments, in parallel.
pub fn classify(cfg: &ClassifyConfig) -> Result<ClassifyReport> {
    cfg.validate()?;
    let rows = cfg.rows();
    let mut cases: Vec<(String, Sequence, usize)> = crafted_cases();
    for r in 0..cfg.sequences as u64 {
        let c = random_case(cfg.seed, 0, r, &cfg.dims, cfg.max_ground, cfg.max_capacity)?;
        cases.push((format!("random_{r}"), c.sequence, c.capacity));
    }
    let limit_cases = (0..cfg.limit_seeds as u64)
        .map(|l| random_case(cfg.seed, 1, l, &cfg.dims, cfg.max_ground, cfg.max_capacity))
        .collect::<Result<Vec<_>>>()?;

    let anytime: Vec<Vec<CellOutcome>> = rows
        .par_iter()
        .map(|row| cases.par_iter().map(|(_, seq, n)| anytime_cell(row, seq, *n)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let limits: Vec<Vec<(LimitVerdict, Option<usize>)>> = rows
        .par_iter()
        .map(|row| {
            limit_cases
                .par_iter()
                .enumerate()
                .map(|(l, case)| limit_cell(cfg, row, case, cfg.seed.wrapping_add(l as u64)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut out = Vec::with_capacity(rows.len());
    for ((row, cells), limit) in rows.iter().zip(anytime).zip(limits) {
        let mut entries = BTreeMap::new();
        let properties = [
            Property::ParetoSubset,
            Property::PointMonotone,
            Property::SetMonotone,
            Property::Lemma1Monotone,
            Property::Lemma2NoRevisit,
        ];
        for property in properties {
            let mut entry = Entry { status: Status::Held, cases: 0, violating_cases: 0, evidence: None };
            for ((name, _, _), cell) in cases.iter().zip(&cells) {
                let Some((reports, tr, capacity)) = cell else { continue };
                let Some(report) = reports.iter().find(|r| r.property == property) else { continue };
                entry.cases += 1;
                if !report.held() {
                    entry.violating_cases += 1;
                    if entry.evidence.is_none() {
                        entry.evidence = Some(Evidence::Trajectory {
                            case: name.clone(),
                            capacity: *capacity,
                            witness: report.witnesses[0].clone(),
                            trajectory: tr.clone(),
                        });
                    }
                }
            }
            entry.status = match (entry.cases, entry.violating_cases) {
                (0, _) => Status::NotApplicable,
                (_, 0) => Status::Held,
                _ => Status::Violated,
            };
            entries.insert(property.name().to_string(), entry);
        }

        let limit_entry = |fails: &dyn Fn(&LimitVerdict) -> bool| {
            let mut entry = Entry { status: Status::Held, cases: limit.len(), violating_cases: 0, evidence: None };
            let mut exhausted = 0;
            for (l, (v, capacity)) in limit.iter().enumerate() {
                if !v.stabilized {
                    exhausted += 1;
                } else if fails(v) {
                    entry.violating_cases += 1;
                    if entry.evidence.is_none() {
                        entry.evidence = Some(Evidence::Limit {
                            case: format!("limit_{l}"),
                            capacity: *capacity,
                            ground: limit_cases[l].ground.clone(),
                            final_archive: v.final_archive.clone(),
                        });
                    }
                }
            }
            entry.status = if entry.violating_cases > 0 {
                Status::Violated
            } else if exhausted > 0 || limit.is_empty() {
                Status::Inconclusive
            } else {
                Status::Held
            };
            entry
        };
        entries.insert("limit_pareto_subset".into(), limit_entry(&|v| !v.is_pareto_subset));
        entries.insert(
            "limit_optimal".into(),
            if row.kind.is_bounded() { limit_entry(&|v| !v.is_optimal) } else { Entry::not_applicable() },
        );
        out.push(ClassifyRow { label: row.label(), config: row.clone(), entries });
    }
    Ok(ClassifyReport {
        schema_version: SCHEMA_VERSION,
        seed: cfg.seed,
        sequences: cfg.sequences,
        limit_seeds: cfg.limit_seeds,
        rows: out,
    })
}

/// Aligned text matrix of the classification.
pub fn render_matrix(report: &ClassifyReport) -> String {
    let header: Vec<String> =
        std::iter::once("archiver".to_string()).chain(COLUMNS.iter().map(|c| c.to_string())).collect();
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            std::iter::once(r.label.clone())
                .chain(COLUMNS.iter().map(|c| r.entries.get(*c).map_or("n/a", |e| e.status.symbol()).to_string()))
                .collect()
        })
        .collect();
    render_table(&header, &rows)
}

pub fn write_classify(report: &ClassifyReport, dir: &Path) -> Result<()> {
    create_dir(dir)?;
    write_file(&dir.join("classify.json"), &to_json(report))?;
    write_file(&dir.join("matrix.txt"), &render_matrix(report))
}
