//! Weight distributions, parameter sweeps and growth-rate classification.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coalitions::{run_coalitional_with, CoalitionPriority};
use crate::dynamics::{run_with, PriorityAlgorithm, RunOptions, DEFAULT_MAX_STEPS};
use crate::error::{Error, Result};
use crate::model::{CostPolicy, Instance, MachineModel, State, Weight};
use crate::rng::SplitMix64;

/// Weight profiles for `n` users, with `H = 10^floor(n/10)`:
/// `a`/`b`/`c` give 10%/50%/90% of the users (rounded up, lowest ids) weight
/// `H` and the rest weight 1; `d` draws each weight uniformly from `[1, H]`;
/// `e` gives user `i` weight `i + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightDistribution {
    A,
    B,
    C,
    D,
    E,
}

impl WeightDistribution {
    pub const ALL: [WeightDistribution; 5] = [
        WeightDistribution::A,
        WeightDistribution::B,
        WeightDistribution::C,
        WeightDistribution::D,
        WeightDistribution::E,
    ];

    fn heavy_percent(self) -> Option<usize> {
        match self {
            WeightDistribution::A => Some(10),
            WeightDistribution::B => Some(50),
            WeightDistribution::C => Some(90),
            _ => None,
        }
    }

    pub fn is_random(self) -> bool {
        self == WeightDistribution::D
    }
}

impl fmt::Display for WeightDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            WeightDistribution::A => "a",
            WeightDistribution::B => "b",
            WeightDistribution::C => "c",
            WeightDistribution::D => "d",
            WeightDistribution::E => "e",
        })
    }
}

impl FromStr for WeightDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(WeightDistribution::A),
            "b" => Ok(WeightDistribution::B),
            "c" => Ok(WeightDistribution::C),
            "d" => Ok(WeightDistribution::D),
            "e" => Ok(WeightDistribution::E),
            other => Err(Error::Parse(format!("unknown weight distribution `{other}`"))),
        }
    }
}

/// `10^floor(n/10)`, the heavy weight (and range bound) for `n` users.
pub fn heavy_weight(n: usize) -> Result<u128> {
    u32::try_from(n / 10)
        .ok()
        .and_then(|e| 10u128.checked_pow(e))
        .ok_or_else(|| Error::Range(format!("10^{} does not fit in 128 bits", n / 10)))
}

pub fn gen_weights(dist: WeightDistribution, n: usize, seed: u64) -> Result<Vec<Weight>> {
    if n == 0 {
        return Err(Error::Range("need at least one user".into()));
    }
    let raw: Vec<u128> = match dist {
        WeightDistribution::E => (1..=n as u128).collect(),
        WeightDistribution::D => {
            let bound = heavy_weight(n)?;
            let mut rng = SplitMix64::new(seed);
            (0..n).map(|_| 1 + rng.below_u128(bound)).collect()
        }
        _ => {
            let heavy = heavy_weight(n)?;
            let pct = dist.heavy_percent().expect("a, b or c");
            let count = (n * pct).div_ceil(100);
            (0..n).map(|i| if i < count { heavy } else { 1 }).collect()
        }
    };
    raw.into_iter().map(Weight::new).collect()
}

/// Number of machines, fixed or as `ceil(n / K)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MachineCount {
    Fixed(usize),
    PerUsers(usize),
}

impl MachineCount {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            MachineCount::Fixed(m) => m,
            MachineCount::PerUsers(k) => n.div_ceil(k).max(1),
        }
    }
}

impl Default for MachineCount {
    fn default() -> Self {
        MachineCount::PerUsers(2)
    }
}

impl FromStr for MachineCount {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parsed = match s.strip_prefix("n/") {
            Some(k) => k.trim().parse().ok().filter(|&k| k > 0).map(MachineCount::PerUsers),
            None => s.parse().ok().filter(|&m| m > 0).map(MachineCount::Fixed),
        };
        parsed.ok_or_else(|| Error::Parse(format!("machine count `{s}` is neither a positive integer nor n/K")))
    }
}

impl fmt::Display for MachineCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MachineCount::Fixed(m) => write!(f, "{m}"),
            MachineCount::PerUsers(k) => write!(f, "n/{k}"),
        }
    }
}

impl Serialize for MachineCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MachineCount::Fixed(m) => s.serialize_u64(*m as u64),
            MachineCount::PerUsers(_) => s.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for MachineCount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(m) => format!("{m}").parse(),
            Raw::Text(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialPlacement {
    /// Every user on machine 0.
    #[default]
    AllOnFirst,
    /// Uniformly random machines, seeded per run.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorityRule {
    Maw,
    Miw,
    Fifo,
    Random,
}

impl PriorityRule {
    pub fn with_seed(self, seed: u64) -> PriorityAlgorithm {
        match self {
            PriorityRule::Maw => PriorityAlgorithm::Maw,
            PriorityRule::Miw => PriorityAlgorithm::Miw,
            PriorityRule::Fifo => PriorityAlgorithm::Fifo,
            PriorityRule::Random => PriorityAlgorithm::Random { seed },
        }
    }
}

impl fmt::Display for PriorityRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.with_seed(0).tag())
    }
}

impl FromStr for PriorityRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match PriorityAlgorithm::parse(s, 0)? {
            PriorityAlgorithm::Maw => PriorityRule::Maw,
            PriorityAlgorithm::Miw => PriorityRule::Miw,
            PriorityAlgorithm::Fifo => PriorityRule::Fifo,
            PriorityAlgorithm::Random { .. } => PriorityRule::Random,
        })
    }
}

fn default_model() -> MachineModel {
    MachineModel::Identical
}

fn default_max_steps() -> u64 {
    DEFAULT_MAX_STEPS
}

/// One sweep: a fixed (policy, priority, coalition) combination over `n_values`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub policy: CostPolicy,
    pub priority: PriorityRule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coalition: Option<CoalitionPriority>,
    #[serde(default = "default_model")]
    pub machine_model: MachineModel,
    pub dist: WeightDistribution,
    pub n_values: Vec<usize>,
    #[serde(default)]
    pub m: MachineCount,
    /// Defaults to 5 when anything is randomized, else 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repetitions: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
    #[serde(default)]
    pub initial: InitialPlacement,
    /// Stop the sweep after the first `n` whose mean step count exceeds this.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_above: Option<u64>,
}

impl ExperimentConfig {
    pub fn new(policy: CostPolicy, priority: PriorityRule, dist: WeightDistribution, n_values: Vec<usize>) -> Self {
        ExperimentConfig {
            policy,
            priority,
            coalition: None,
            machine_model: MachineModel::Identical,
            dist,
            n_values,
            m: MachineCount::default(),
            repetitions: None,
            seed: 0,
            max_steps: DEFAULT_MAX_STEPS,
            initial: InitialPlacement::AllOnFirst,
            stop_above: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn repetitions(&self) -> usize {
        self.repetitions.unwrap_or_else(|| {
            let randomized = self.dist.is_random()
                || self.priority == PriorityRule::Random
                || self.initial == InitialPlacement::Random
                || self.machine_model != MachineModel::Identical;
            if randomized {
                5
            } else {
                1
            }
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(Error::config("n_values", "must not be empty"));
        }
        if self.n_values[0] == 0 || self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("n_values", "must be positive and strictly increasing"));
        }
        if self.repetitions == Some(0) {
            return Err(Error::config("repetitions", "must be at least 1"));
        }
        if self.max_steps == 0 {
            return Err(Error::config("max_steps", "must be at least 1"));
        }
        if self.m == MachineCount::Fixed(0) {
            return Err(Error::config("m", "must be at least 1"));
        }
        if self.coalition.is_some() {
            if self.policy != CostPolicy::Makespan {
                return Err(Error::config("coalition", "2-flips need the makespan policy"));
            }
            if self.machine_model != MachineModel::Identical {
                return Err(Error::config("coalition", "2-flips need identical machines"));
            }
        }
        let largest = *self.n_values.last().unwrap();
        if self.dist != WeightDistribution::E {
            heavy_weight(largest).map_err(|e| Error::config("n_values", e.to_string()))?;
        }
        Ok(())
    }
}

/// Outcome of one simulated run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSample {
    pub steps: u64,
    pub flips: u64,
    pub capped: bool,
}

/// Generates an instance with `n` users drawn from `dist`. Related machines
/// get speeds uniform in `1..=4`; on unrelated machines user `i`'s entry for
/// each machine is uniform in `[1, w_i]`.
pub fn build_instance(
    model: MachineModel,
    dist: WeightDistribution,
    n: usize,
    machines: MachineCount,
    rng: &mut SplitMix64,
) -> Result<Instance> {
    let weights = gen_weights(dist, n, rng.fork())?;
    let m = machines.resolve(n);
    let mut extra = SplitMix64::new(rng.fork());
    match model {
        MachineModel::Identical => Instance::identical(weights, m),
        MachineModel::Related => {
            let speeds = (0..m).map(|_| 1 + extra.below(4) as u128).collect();
            Instance::related(weights, speeds)
        }
        MachineModel::Unrelated => {
            let rows = weights
                .iter()
                .map(|w| {
                    (0..m)
                        .map(|_| Weight::new(1 + extra.below_u128(w.get())))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Instance::unrelated(rows)
        }
    }
}

/// Runs one cell from its derived seed.
pub fn run_cell(config: &ExperimentConfig, n: usize, cell_seed: u64) -> Result<RunSample> {
    let mut rng = SplitMix64::new(cell_seed);
    let inst = build_instance(config.machine_model, config.dist, n, config.m, &mut rng)?;
    let placement_seed = rng.fork();
    let priority_seed = rng.fork();
    let initial = match config.initial {
        InitialPlacement::AllOnFirst => State::all_on(&inst, 0)?,
        InitialPlacement::Random => State::random(&inst, placement_seed)?,
    };
    let algo = config.priority.with_seed(priority_seed);
    let opts = RunOptions {
        max_steps: config.max_steps,
        trace: false,
    };
    Ok(match config.coalition {
        Some(cp) => {
            let r = run_coalitional_with(&inst, initial, algo, cp, opts)?;
            RunSample {
                steps: r.steps(),
                flips: r.flips,
                capped: !r.reached_ne,
            }
        }
        None => {
            let r = run_with(&inst, initial, config.policy, algo, opts)?;
            RunSample {
                steps: r.steps,
                flips: 0,
                capped: !r.reached_ne,
            }
        }
    })
}

/// Aggregate over the repetitions at one `n`. Means are taken over uncapped
/// runs (over all runs when every run hit the cap).
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub n: usize,
    pub runs: usize,
    pub mean_steps: f64,
    pub max_steps_observed: u64,
    pub mean_flips: f64,
    pub capped_runs: usize,
}

impl SeriesRow {
    fn from_samples(n: usize, samples: &[RunSample]) -> Self {
        let uncapped: Vec<&RunSample> = samples.iter().filter(|s| !s.capped).collect();
        let pool: Vec<&RunSample> = if uncapped.is_empty() {
            samples.iter().collect()
        } else {
            uncapped
        };
        let mean = |f: fn(&RunSample) -> u64| pool.iter().map(|s| f(s) as f64).sum::<f64>() / pool.len() as f64;
        SeriesRow {
            n,
            runs: samples.len(),
            mean_steps: mean(|s| s.steps),
            max_steps_observed: samples.iter().map(|s| s.steps).max().unwrap_or(0),
            mean_flips: mean(|s| s.flips),
            capped_runs: samples.iter().filter(|s| s.capped).count(),
        }
    }

    /// Whether the row may enter a growth fit.
    pub fn fittable(&self) -> bool {
        self.capped_runs < self.runs
    }
}

/// Per-cell seeds, drawn in (n, repetition) order from the base seed.
pub fn cell_seeds(config: &ExperimentConfig) -> Vec<Vec<u64>> {
    let mut rng = SplitMix64::new(config.seed);
    let reps = config.repetitions();
    config
        .n_values
        .iter()
        .map(|_| (0..reps).map(|_| rng.next_u64()).collect())
        .collect()
}

/// Runs the sweep on the current rayon pool; repetitions at each `n` run in parallel.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<SeriesRow>> {
    config.validate()?;
    let mut rows = Vec::with_capacity(config.n_values.len());
    for (&n, seeds) in config.n_values.iter().zip(cell_seeds(config)) {
        let samples = seeds
            .par_iter()
            .map(|&seed| run_cell(config, n, seed))
            .collect::<Result<Vec<_>>>()?;
        let row = SeriesRow::from_samples(n, &samples);
        let stop = config.stop_above.is_some_and(|limit| row.mean_steps > limit as f64);
        rows.push(row);
        if stop {
            break;
        }
    }
    Ok(rows)
}

/// Same as [`run_experiment`] on a dedicated pool of `jobs` workers.
pub fn run_experiment_with_jobs(config: &ExperimentConfig, jobs: usize) -> Result<Vec<SeriesRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment(config))
}

pub const SERIES_HEADER: &str = "n,policy,priority,coalition,dist,mean_steps,max_steps_observed,mean_flips,capped_runs";

pub fn write_series_csv<W: Write>(mut out: W, config: &ExperimentConfig, rows: &[SeriesRow]) -> std::io::Result<()> {
    writeln!(out, "{SERIES_HEADER}")?;
    let coalition = config.coalition.map_or_else(|| "none".to_string(), |c| c.to_string());
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            config.policy,
            config.priority,
            coalition,
            config.dist,
            r.mean_steps,
            r.max_steps_observed,
            r.mean_flips,
            r.capped_runs
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthKind {
    Linear,
    Polynomial,
    Exponential,
    Inconclusive,
}

impl fmt::Display for GrowthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            GrowthKind::Linear => "linear",
            GrowthKind::Polynomial => "polynomial",
            GrowthKind::Exponential => "exponential",
            GrowthKind::Inconclusive => "inconclusive",
        })
    }
}

/// Least-squares line `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// `None` when `x` or `y` has no spread.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<Fit> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 || syy <= f64::EPSILON * my.abs().max(1.0) {
        return None;
    }
    let slope = sxy / sxx;
    Some(Fit {
        slope,
        intercept: my - slope * mx,
        r_squared: (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0),
    })
}

pub const DEFAULT_R2_THRESHOLD: f64 = 0.9;
/// Polynomial fits with an exponent at or below this count as linear.
pub const LINEAR_EXPONENT_CUTOFF: f64 = 1.2;

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthClass {
    pub kind: GrowthKind,
    /// Slope for linear, exponent `p` for polynomial (and reclassified
    /// linear), rate `r` of `e^{rn}` for exponential.
    pub rate: f64,
    pub r_squared: f64,
    pub linear: Option<Fit>,
    /// Fit of `ln y` against `ln n`.
    pub polynomial: Option<Fit>,
    /// Fit of `ln y` against `n`.
    pub exponential: Option<Fit>,
}

impl GrowthClass {
    fn inconclusive() -> Self {
        GrowthClass {
            kind: GrowthKind::Inconclusive,
            rate: f64::NAN,
            r_squared: 0.0,
            linear: None,
            polynomial: None,
            exponential: None,
        }
    }
}

impl fmt::Display for GrowthClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} rate={:.4} r2={:.4}", self.kind, self.rate, self.r_squared)?;
        let show = |f: &mut fmt::Formatter<'_>, name: &str, fit: Option<Fit>| match fit {
            Some(fit) => write!(f, " {name}[slope={:.4} r2={:.4}]", fit.slope, fit.r_squared),
            None => write!(f, " {name}[none]"),
        };
        show(f, "linear", self.linear)?;
        show(f, "polynomial", self.polynomial)?;
        show(f, "exponential", self.exponential)
    }
}

pub fn classify_growth(points: &[(f64, f64)]) -> GrowthClass {
    classify_growth_with(points, DEFAULT_R2_THRESHOLD)
}

/// Fits linear, power-law and exponential models and keeps the one with the
/// highest r². Needs at least four distinct `n` with positive counts.
pub fn classify_growth_with(points: &[(f64, f64)], threshold: f64) -> GrowthClass {
    let usable: Vec<(f64, f64)> = points.iter().copied().filter(|&(n, y)| n > 0.0 && y > 0.0).collect();
    let mut distinct: Vec<f64> = usable.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 4 {
        return GrowthClass::inconclusive();
    }
    let ns: Vec<f64> = usable.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = usable.iter().map(|p| p.1).collect();
    let log_ns: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let log_ys: Vec<f64> = ys.iter().map(|y| y.ln()).collect();

    let mut class = GrowthClass::inconclusive();
    class.linear = least_squares(&ns, &ys);
    class.polynomial = least_squares(&log_ns, &log_ys);
    class.exponential = least_squares(&ns, &log_ys);

    let candidates = [
        (GrowthKind::Linear, class.linear),
        (GrowthKind::Polynomial, class.polynomial),
        (GrowthKind::Exponential, class.exponential),
    ];
    let Some((kind, fit)) = candidates.into_iter().filter_map(|(k, f)| f.map(|f| (k, f))).fold(
        None,
        |best: Option<(GrowthKind, Fit)>, cur| match best {
            Some(b) if b.1.r_squared >= cur.1.r_squared => Some(b),
            _ => Some(cur),
        },
    ) else {
        return class;
    };
    if fit.r_squared < threshold {
        class.r_squared = fit.r_squared;
        return class;
    }
    class.kind = match kind {
        GrowthKind::Polynomial if fit.slope <= LINEAR_EXPONENT_CUTOFF => GrowthKind::Linear,
        k => k,
    };
    class.rate = fit.slope;
    class.r_squared = fit.r_squared;
    class
}

/// Growth classes of the step series and, for coalition sweeps, the flip series.
pub fn summarize(config: &ExperimentConfig, rows: &[SeriesRow]) -> Vec<(&'static str, GrowthClass)> {
    let fit_rows: Vec<&SeriesRow> = rows.iter().filter(|r| r.fittable()).collect();
    let steps: Vec<(f64, f64)> = fit_rows.iter().map(|r| (r.n as f64, r.mean_steps)).collect();
    let mut out = vec![("steps", classify_growth(&steps))];
    if config.coalition.is_some() {
        let flips: Vec<(f64, f64)> = fit_rows.iter().map(|r| (r.n as f64, r.mean_flips)).collect();
        out.push(("flips", classify_growth(&flips)));
    }
    out
}

pub fn write_summary<W: Write>(mut out: W, config: &ExperimentConfig, rows: &[SeriesRow]) -> std::io::Result<()> {
    let label = format!(
        "policy={} priority={} coalition={} dist={} m={}",
        config.policy,
        config.priority,
        config.coalition.map_or_else(|| "none".to_string(), |c| c.to_string()),
        config.dist,
        config.m
    );
    for (series, class) in summarize(config, rows) {
        writeln!(out, "{label} series={series}: {class}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn raw(ws: Vec<Weight>) -> Vec<u128> {
        ws.into_iter().map(Weight::get).collect()
    }

    #[test]
    fn distribution_shapes() {
        let a = raw(gen_weights(WeightDistribution::A, 10, 0).unwrap());
        assert_eq!(a, [10, 1, 1, 1, 1, 1, 1, 1, 1, 1]);
        assert_eq!(raw(gen_weights(WeightDistribution::E, 4, 0).unwrap()), [1, 2, 3, 4]);
        let b = raw(gen_weights(WeightDistribution::B, 21, 0).unwrap());
        assert_eq!(b.iter().filter(|&&w| w == 100).count(), 11);
        let c = raw(gen_weights(WeightDistribution::C, 15, 0).unwrap());
        assert_eq!(c.iter().filter(|&&w| w == 10).count(), 14);
        // below ten users the heavy weight is 10^0
        assert_eq!(raw(gen_weights(WeightDistribution::A, 5, 0).unwrap()), [1; 5]);
    }

    #[test]
    fn uniform_weights_stay_in_range() {
        for seed in 0..50 {
            let d = raw(gen_weights(WeightDistribution::D, 10, seed).unwrap());
            assert!(d.iter().all(|w| (1..=10).contains(w)));
        }
        let big = raw(gen_weights(WeightDistribution::D, 385, 1).unwrap());
        assert!(big.iter().all(|&w| w >= 1 && w <= 10u128.pow(38)));
    }

    #[test]
    fn oversized_heavy_weight_rejected() {
        assert!(gen_weights(WeightDistribution::A, 389, 0).is_ok());
        assert!(matches!(
            gen_weights(WeightDistribution::D, 390, 0),
            Err(Error::Range(_))
        ));
        assert!(gen_weights(WeightDistribution::E, 1000, 0).is_ok());
        assert!(gen_weights(WeightDistribution::E, 0, 0).is_err());
    }

    #[test]
    fn machine_count_parsing() {
        assert_eq!("n/2".parse::<MachineCount>().unwrap().resolve(7), 4);
        assert_eq!("10".parse::<MachineCount>().unwrap().resolve(7), 10);
        assert_eq!("n/3".parse::<MachineCount>().unwrap().resolve(1), 1);
        for bad in ["0", "n/0", "n*2", "x"] {
            assert!(bad.parse::<MachineCount>().is_err(), "{bad}");
        }
        let config: ExperimentConfig =
            serde_json::from_str(r#"{"policy":"fifo","priority":"maw","dist":"e","n_values":[2,4],"m":"n/4"}"#)
                .unwrap();
        assert_eq!(config.m, MachineCount::PerUsers(4));
    }

    #[test]
    fn config_validation_names_the_field() {
        let err =
            ExperimentConfig::from_json(r#"{"policy":"fifo","priority":"maw","dist":"e","n_values":[]}"#).unwrap_err();
        assert!(
            matches!(err, Error::Config { ref field, .. } if field == "n_values"),
            "{err}"
        );
        let err = ExperimentConfig::from_json(
            r#"{"policy":"sjf","priority":"maw","dist":"e","n_values":[3],"coalition":"mip"}"#,
        )
        .unwrap_err();
        assert!(
            matches!(err, Error::Config { ref field, .. } if field == "coalition"),
            "{err}"
        );
        assert!(
            ExperimentConfig::from_json(r#"{"policy":"fifo","priority":"maw","dist":"e","n_values":[3,3]}"#).is_err()
        );
        assert!(ExperimentConfig::from_json(
            r#"{"policy":"fifo","priority":"maw","dist":"e","n_values":[3],"bogus":1}"#
        )
        .is_err());
    }

    #[test]
    fn default_repetitions() {
        let mut config = ExperimentConfig::new(CostPolicy::Fifo, PriorityRule::Maw, WeightDistribution::E, vec![4]);
        assert_eq!(config.repetitions(), 1);
        config.dist = WeightDistribution::D;
        assert_eq!(config.repetitions(), 5);
        config.repetitions = Some(2);
        assert_eq!(config.repetitions(), 2);
    }

    #[test]
    fn single_user_never_moves() {
        for policy in CostPolicy::ALL {
            let config = ExperimentConfig::new(policy, PriorityRule::Maw, WeightDistribution::D, vec![1]);
            let rows = run_experiment(&config).unwrap();
            assert_eq!(rows[0].max_steps_observed, 0);
        }
    }

    #[test]
    fn fifo_rows_within_bound() {
        for dist in WeightDistribution::ALL {
            let config = ExperimentConfig::new(CostPolicy::Fifo, PriorityRule::Random, dist, vec![5, 10, 20, 40]);
            for row in run_experiment(&config).unwrap() {
                assert!(row.max_steps_observed < row.n as u64, "{row:?}");
            }
        }
    }

    #[test]
    fn sweeps_are_reproducible_and_job_independent() {
        let mut config = ExperimentConfig::new(
            CostPolicy::Sjf,
            PriorityRule::Random,
            WeightDistribution::D,
            vec![6, 8, 10],
        );
        config.machine_model = MachineModel::Related;
        let a = run_experiment_with_jobs(&config, 1).unwrap();
        let b = run_experiment_with_jobs(&config, 4).unwrap();
        assert_eq!(a, b);
        config.machine_model = MachineModel::Unrelated;
        config.policy = CostPolicy::Fifo;
        assert_eq!(run_experiment(&config).unwrap(), run_experiment(&config).unwrap());
    }

    #[test]
    fn stop_above_truncates_the_sweep() {
        let mut config = ExperimentConfig::new(
            CostPolicy::Makespan,
            PriorityRule::Miw,
            WeightDistribution::E,
            vec![4, 8, 16, 32],
        );
        config.stop_above = Some(3);
        let rows = run_experiment(&config).unwrap();
        assert!(rows.len() < 4);
        assert!(rows.last().unwrap().mean_steps > 3.0);
    }

    #[test]
    fn capped_rows_are_excluded_from_fits() {
        let samples = [
            RunSample {
                steps: 10,
                flips: 0,
                capped: true,
            },
            RunSample {
                steps: 4,
                flips: 0,
                capped: false,
            },
        ];
        let row = SeriesRow::from_samples(5, &samples);
        assert_eq!((row.mean_steps, row.max_steps_observed, row.capped_runs), (4.0, 10, 1));
        assert!(row.fittable());
        let row = SeriesRow::from_samples(5, &samples[..1]);
        assert!(!row.fittable());
    }

    fn series(f: impl Fn(f64) -> f64, ns: &[f64]) -> Vec<(f64, f64)> {
        ns.iter().map(|&n| (n, f(n))).collect()
    }

    #[test]
    fn classify_reference_series() {
        let ns = [10.0, 20.0, 40.0, 80.0];
        assert_eq!(classify_growth(&series(|n| 2.0 * n, &ns)).kind, GrowthKind::Linear);
        let quad = classify_growth(&series(|n| n * n, &ns));
        assert_eq!(quad.kind, GrowthKind::Polynomial);
        assert!((quad.rate - 2.0).abs() < 1e-9);
        let exp = classify_growth(&series(|n| 2f64.powf(n), &[10.0, 20.0, 30.0, 40.0]));
        assert_eq!(exp.kind, GrowthKind::Exponential);
        assert!((exp.rate - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn degenerate_series_inconclusive() {
        let flat = series(|_| 7.0, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(classify_growth(&flat).kind, GrowthKind::Inconclusive);
        let zeros = series(|_| 0.0, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(classify_growth(&zeros).kind, GrowthKind::Inconclusive);
        let short = series(|n| n, &[1.0, 2.0, 3.0]);
        assert_eq!(classify_growth(&short).kind, GrowthKind::Inconclusive);
    }

    proptest! {
        #[test]
        fn classification_is_scale_invariant(
            ys in prop::collection::vec(1.0f64..1e6, 5..9),
            scale in 0.01f64..100.0,
        ) {
            let pts: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, &y)| (5.0 * (i + 1) as f64, y)).collect();
            let scaled: Vec<(f64, f64)> = pts.iter().map(|&(n, y)| (n, y * scale)).collect();
            let a = classify_growth(&pts);
            let b = classify_growth(&scaled);
            prop_assert_eq!(a.kind, b.kind);
            if a.kind != GrowthKind::Inconclusive {
                prop_assert!((a.r_squared - b.r_squared).abs() < 1e-6);
            }
        }

        #[test]
        fn gen_weights_deterministic(tag in 0usize..5, n in 1usize..120, seed: u64) {
            let dist = WeightDistribution::ALL[tag];
            let a = gen_weights(dist, n, seed).unwrap();
            prop_assert_eq!(a.len(), n);
            prop_assert_eq!(&a, &gen_weights(dist, n, seed).unwrap());
        }
    }
}
