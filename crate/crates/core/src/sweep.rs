//! Logarithmic one-dimensional hyperparameter sweeps.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filex::{self, FilexParams};
use crate::prob::ProbVector;
use crate::rng::mix_seed;
use crate::stats::shannon_entropy;
use crate::toy_els::{self, ToyElsParams};

/// Number of grid points in the default toy-agent sweeps.
pub const DEFAULT_TOY_STEPS: usize = 200;
/// Number of grid points in the default process sweeps.
pub const DEFAULT_FILEX_STEPS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Filex,
    ToyEls,
}

impl Target {
    pub fn as_str(self) -> &'static str {
        match self {
            Target::Filex => "filex",
            Target::ToyEls => "toy_els",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "filex" => Ok(Target::Filex),
            "toy_els" | "toy-els" => Ok(Target::ToyEls),
            other => Err(Error::invalid(format!("unknown target `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hyperparameter {
    NIters,
    LexiconSize,
    Alpha,
    Beta,
    TimeSteps,
    LearningRate,
    BufferSize,
    Temperature,
}

impl Hyperparameter {
    pub const ALL: [Hyperparameter; 8] = [
        Hyperparameter::NIters,
        Hyperparameter::LexiconSize,
        Hyperparameter::Alpha,
        Hyperparameter::Beta,
        Hyperparameter::TimeSteps,
        Hyperparameter::LearningRate,
        Hyperparameter::BufferSize,
        Hyperparameter::Temperature,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Hyperparameter::NIters => "n_iters",
            Hyperparameter::LexiconSize => "lexicon_size",
            Hyperparameter::Alpha => "alpha",
            Hyperparameter::Beta => "beta",
            Hyperparameter::TimeSteps => "time_steps",
            Hyperparameter::LearningRate => "learning_rate",
            Hyperparameter::BufferSize => "buffer_size",
            Hyperparameter::Temperature => "temperature",
        }
    }

    pub fn applies_to(self, target: Target) -> bool {
        use Hyperparameter::*;
        match target {
            Target::Filex => matches!(self, NIters | LexiconSize | Alpha | Beta),
            Target::ToyEls => matches!(
                self,
                TimeSteps | LexiconSize | LearningRate | BufferSize | Temperature
            ),
        }
    }

    pub fn is_integer(self) -> bool {
        use Hyperparameter::*;
        matches!(self, NIters | LexiconSize | Beta | TimeSteps | BufferSize)
    }
}

impl fmt::Display for Hyperparameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Hyperparameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Hyperparameter::ALL
            .into_iter()
            .find(|h| h.as_str() == s || h.as_str().replace('_', "-") == s)
            .ok_or_else(|| Error::invalid(format!("unknown hyperparameter `{s}`")))
    }
}

/// Full parameter set for one simulation target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamSet {
    Filex(FilexParams),
    ToyEls(ToyElsParams),
}

fn to_count<T: TryFrom<u64>>(hp: Hyperparameter, value: f64) -> Result<T> {
    if value.fract() != 0.0 || value < 1.0 || value > u64::MAX as f64 {
        return Err(Error::invalid(format!(
            "{hp} needs a positive integer, got {value}"
        )));
    }
    T::try_from(value as u64)
        .map_err(|_| Error::invalid(format!("{hp} value {value} is out of range")))
}

impl ParamSet {
    pub fn target(&self) -> Target {
        match self {
            ParamSet::Filex(_) => Target::Filex,
            ParamSet::ToyEls(_) => Target::ToyEls,
        }
    }

    pub fn lexicon_size(&self) -> usize {
        match self {
            ParamSet::Filex(p) => p.lexicon_size(),
            ParamSet::ToyEls(p) => p.lexicon_size(),
        }
    }

    /// Current value of `hp`.
    pub fn get(&self, hp: Hyperparameter) -> Result<f64> {
        use Hyperparameter::*;
        Ok(match (self, hp) {
            (ParamSet::Filex(p), NIters) => p.n_iters() as f64,
            (ParamSet::Filex(p), LexiconSize) => p.lexicon_size() as f64,
            (ParamSet::Filex(p), Alpha) => p.alpha(),
            (ParamSet::Filex(p), Beta) => p.beta() as f64,
            (ParamSet::ToyEls(p), TimeSteps) => p.time_steps() as f64,
            (ParamSet::ToyEls(p), LexiconSize) => p.lexicon_size() as f64,
            (ParamSet::ToyEls(p), LearningRate) => p.learning_rate(),
            (ParamSet::ToyEls(p), BufferSize) => p.buffer_size() as f64,
            (ParamSet::ToyEls(p), Temperature) => p.temperature(),
            _ => {
                return Err(Error::invalid(format!(
                    "{hp} is not a {} hyperparameter",
                    self.target()
                )))
            }
        })
    }

    /// Copy with `hp` replaced by `value`.
    pub fn with(&self, hp: Hyperparameter, value: f64) -> Result<ParamSet> {
        use Hyperparameter::*;
        Ok(match (*self, hp) {
            (ParamSet::Filex(p), NIters) => ParamSet::Filex(p.with_n_iters(to_count(hp, value)?)?),
            (ParamSet::Filex(p), LexiconSize) => {
                ParamSet::Filex(p.with_lexicon_size(to_count(hp, value)?)?)
            }
            (ParamSet::Filex(p), Alpha) => ParamSet::Filex(p.with_alpha(value)?),
            (ParamSet::Filex(p), Beta) => ParamSet::Filex(p.with_beta(to_count(hp, value)?)?),
            (ParamSet::ToyEls(p), TimeSteps) => {
                ParamSet::ToyEls(p.with_time_steps(to_count(hp, value)?)?)
            }
            (ParamSet::ToyEls(p), LexiconSize) => {
                ParamSet::ToyEls(p.with_lexicon_size(to_count(hp, value)?)?)
            }
            (ParamSet::ToyEls(p), LearningRate) => ParamSet::ToyEls(p.with_learning_rate(value)?),
            (ParamSet::ToyEls(p), BufferSize) => {
                ParamSet::ToyEls(p.with_buffer_size(to_count(hp, value)?)?)
            }
            (ParamSet::ToyEls(p), Temperature) => ParamSet::ToyEls(p.with_temperature(value)?),
            (set, _) => {
                return Err(Error::invalid(format!(
                    "{hp} is not a {} hyperparameter",
                    set.target()
                )))
            }
        })
    }

    /// One simulation at this parameter set.
    pub fn simulate(&self, seed: u64) -> Result<ProbVector> {
        match self {
            ParamSet::Filex(p) => Ok(filex::run(p, seed)),
            ParamSet::ToyEls(p) => toy_els::toy_run(p, seed),
        }
    }
}

/// Rounds to 12 significant digits, so grid points that are mathematically
/// round numbers come out exact instead of one ulp off.
fn round_significant(x: f64) -> f64 {
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// `n` geometrically spaced values from `low` to `high`, endpoints included.
pub fn log_sweep(low: f64, high: f64, n: usize) -> Result<Vec<f64>> {
    if !(low > 0.0 && low.is_finite() && high.is_finite()) {
        return Err(Error::invalid(format!(
            "sweep bounds must be positive and finite, got [{low}, {high}]"
        )));
    }
    if low > high {
        return Err(Error::invalid(format!(
            "sweep lower bound {low} exceeds upper bound {high}"
        )));
    }
    if n == 0 {
        return Err(Error::invalid("sweep needs at least one step"));
    }
    if n == 1 {
        return Ok(vec![low]);
    }
    let log_ratio = (high / low).ln();
    let last = (n - 1) as f64;
    Ok((0..n)
        .map(|i| match i {
            0 => low,
            i if i == n - 1 => high,
            i => round_significant(low * (log_ratio * i as f64 / last).exp()).clamp(low, high),
        })
        .collect())
}

/// Declarative one-dimensional sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSweepSpec")]
pub struct SweepSpec {
    target: Target,
    swept_param: Hyperparameter,
    low: f64,
    high: f64,
    steps: usize,
    integer_valued: bool,
    base_seed: u64,
    repeats: usize,
    defaults: ParamSet,
}

#[derive(Deserialize)]
struct RawSweepSpec {
    target: Target,
    swept_param: Hyperparameter,
    low: f64,
    high: f64,
    steps: usize,
    integer_valued: bool,
    base_seed: u64,
    #[serde(default = "one")]
    repeats: usize,
    defaults: ParamSet,
}

fn one() -> usize {
    1
}

impl TryFrom<RawSweepSpec> for SweepSpec {
    type Error = Error;

    fn try_from(r: RawSweepSpec) -> Result<Self> {
        if r.defaults.target() != r.target {
            return Err(Error::invalid(format!(
                "target {} does not match {} defaults",
                r.target,
                r.defaults.target()
            )));
        }
        SweepSpec::new(
            r.swept_param,
            r.low,
            r.high,
            r.steps,
            r.integer_valued,
            r.defaults,
            r.base_seed,
        )?
        .with_repeats(r.repeats)
    }
}

impl SweepSpec {
    pub fn new(
        swept_param: Hyperparameter,
        low: f64,
        high: f64,
        steps: usize,
        integer_valued: bool,
        defaults: ParamSet,
        base_seed: u64,
    ) -> Result<Self> {
        let target = defaults.target();
        if !swept_param.applies_to(target) {
            return Err(Error::invalid(format!(
                "{swept_param} is not a {target} hyperparameter"
            )));
        }
        if swept_param.is_integer() && !integer_valued {
            return Err(Error::invalid(format!(
                "{swept_param} is integer valued; enable flooring"
            )));
        }
        // Validates the bounds and step count.
        log_sweep(low, high, steps)?;
        Ok(SweepSpec {
            target,
            swept_param,
            low,
            high,
            steps,
            integer_valued,
            base_seed,
            repeats: 1,
            defaults,
        })
    }

    /// Independent runs per grid point (default 1).
    pub fn with_repeats(mut self, repeats: usize) -> Result<Self> {
        if repeats == 0 {
            return Err(Error::invalid("repeats must be at least 1"));
        }
        self.repeats = repeats;
        Ok(self)
    }

    pub fn with_steps(self, steps: usize) -> Result<Self> {
        let repeats = self.repeats;
        Self::new(
            self.swept_param,
            self.low,
            self.high,
            steps,
            self.integer_valued,
            self.defaults,
            self.base_seed,
        )?
        .with_repeats(repeats)
    }

    pub fn with_base_seed(mut self, base_seed: u64) -> Self {
        self.base_seed = base_seed;
        self
    }

    pub fn with_defaults(self, defaults: ParamSet) -> Result<Self> {
        let repeats = self.repeats;
        Self::new(
            self.swept_param,
            self.low,
            self.high,
            self.steps,
            self.integer_valued,
            defaults,
            self.base_seed,
        )?
        .with_repeats(repeats)
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn swept_param(&self) -> Hyperparameter {
        self.swept_param
    }

    pub fn low(&self) -> f64 {
        self.low
    }

    pub fn high(&self) -> f64 {
        self.high
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn integer_valued(&self) -> bool {
        self.integer_valued
    }

    pub fn base_seed(&self) -> u64 {
        self.base_seed
    }

    pub fn repeats(&self) -> usize {
        self.repeats
    }

    pub fn defaults(&self) -> &ParamSet {
        &self.defaults
    }

    /// Grid values actually installed, floored when integer valued.
    pub fn grid(&self) -> Vec<f64> {
        let raw = log_sweep(self.low, self.high, self.steps).expect("validated at construction");
        if self.integer_valued {
            raw.into_iter().map(f64::floor).collect()
        } else {
            raw
        }
    }

    /// Seed for repeat `r` at grid index `i`.
    pub fn seed_for(&self, i: usize, r: usize) -> u64 {
        mix_seed(self.base_seed, (i * self.repeats + r) as u64)
    }

    /// Largest lexicon size any run of the sweep uses.
    pub fn max_lexicon_size(&self) -> usize {
        if self.swept_param == Hyperparameter::LexiconSize {
            self.high.floor() as usize
        } else {
            self.defaults.lexicon_size()
        }
    }
}

/// One `(hyperparameter value, entropy)` observation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub target: Target,
    pub param: Hyperparameter,
    pub value: f64,
    pub seed: u64,
    pub entropy: f64,
}

/// A grid point whose parameters were rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedPoint {
    pub index: usize,
    pub value: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepOutcome {
    pub records: Vec<RunRecord>,
    pub skipped: Vec<SkippedPoint>,
}

fn run_point(spec: &SweepSpec, index: usize, value: f64) -> Result<Vec<RunRecord>, SkippedPoint> {
    let params = spec
        .defaults
        .with(spec.swept_param, value)
        .map_err(|e| SkippedPoint {
            index,
            value,
            reason: e.to_string(),
        })?;
    (0..spec.repeats)
        .map(|r| {
            let seed = spec.seed_for(index, r);
            let probs = params.simulate(seed).map_err(|e| SkippedPoint {
                index,
                value,
                reason: e.to_string(),
            })?;
            Ok(RunRecord {
                target: spec.target,
                param: spec.swept_param,
                value,
                seed,
                entropy: shannon_entropy(&probs),
            })
        })
        .collect()
}

/// Executes every grid point (in parallel on the current rayon pool) and
/// returns records in grid order. Points with invalid parameters are
/// reported in `skipped` instead of failing the sweep.
pub fn run_sweep(spec: &SweepSpec) -> SweepOutcome {
    let grid = spec.grid();
    let results: Vec<_> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &value)| run_point(spec, i, value))
        .collect();
    let mut out = SweepOutcome::default();
    for r in results {
        match r {
            Ok(recs) => out.records.extend(recs),
            Err(skip) => out.skipped.push(skip),
        }
    }
    out
}

/// [`run_sweep`] on a dedicated pool of `workers` threads.
pub fn run_sweep_with_workers(spec: &SweepSpec, workers: usize) -> Result<SweepOutcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| run_sweep(spec)))
}

/// Per-spec base seed inside a suite.
fn suite_seed(base_seed: u64, target: Target, k: usize) -> u64 {
    let lane = match target {
        Target::Filex => 0,
        Target::ToyEls => 1 << 32,
    };
    mix_seed(base_seed, lane + k as u64)
}

/// Process sweeps over `N`, `S`, `α`, `β` with 1000 points each.
pub fn default_filex_suite(base_seed: u64) -> Vec<SweepSpec> {
    let defaults = ParamSet::Filex(FilexParams::default());
    [
        (Hyperparameter::NIters, 1e0, 1e3, true),
        (Hyperparameter::LexiconSize, 8.0, 256.0, true),
        (Hyperparameter::Alpha, 1e-3, 1e3, false),
        (Hyperparameter::Beta, 1e0, 1e3, true),
    ]
    .into_iter()
    .enumerate()
    .map(|(k, (hp, low, high, int))| {
        SweepSpec::new(
            hp,
            low,
            high,
            DEFAULT_FILEX_STEPS,
            int,
            defaults,
            suite_seed(base_seed, Target::Filex, k),
        )
        .expect("suite definition is valid")
    })
    .collect()
}

/// Toy-agent sweeps over time steps, lexicon size, learning rate, buffer
/// size and temperature.
pub fn default_toy_els_suite(steps: usize, base_seed: u64) -> Result<Vec<SweepSpec>> {
    let defaults = ParamSet::ToyEls(ToyElsParams::default());
    [
        (Hyperparameter::TimeSteps, 1e2, 1e6, true),
        (Hyperparameter::LexiconSize, 8.0, 256.0, true),
        (Hyperparameter::LearningRate, 1e-4, 1e-1, false),
        (Hyperparameter::BufferSize, 8.0, 1024.0, true),
        (Hyperparameter::Temperature, 1e-1, 1e1, false),
    ]
    .into_iter()
    .enumerate()
    .map(|(k, (hp, low, high, int))| {
        SweepSpec::new(
            hp,
            low,
            high,
            steps,
            int,
            defaults,
            suite_seed(base_seed, Target::ToyEls, k),
        )
    })
    .collect()
}
