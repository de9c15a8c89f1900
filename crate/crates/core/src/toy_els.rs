//! Softmax self-reinforcement agent.
//!
//! A desk-scale analog of an emergent-language sender with no environment
//! dynamics: a single logit vector over the lexicon. Every update first
//! collects a buffer of Gumbel-Softmax relaxed messages from the frozen
//! logits, then moves the logits toward the buffer average. Because every
//! message is rewarded, the only thing driving the policy is its own
//! sampling noise, and the lexicon drifts toward low entropy.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::ProbVector;
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawToyElsParams")]
pub struct ToyElsParams {
    time_steps: u64,
    lexicon_size: usize,
    learning_rate: f64,
    buffer_size: u64,
    temperature: f64,
    eval_samples: u64,
    logit_gain: f64,
}

#[derive(Deserialize)]
struct RawToyElsParams {
    time_steps: u64,
    lexicon_size: usize,
    learning_rate: f64,
    buffer_size: u64,
    temperature: f64,
    eval_samples: u64,
    #[serde(default = "default_gain")]
    logit_gain: f64,
}

fn default_gain() -> f64 {
    ToyElsParams::DEFAULT_LOGIT_GAIN
}

impl TryFrom<RawToyElsParams> for ToyElsParams {
    type Error = Error;

    fn try_from(r: RawToyElsParams) -> Result<Self> {
        ToyElsParams::new(
            r.time_steps,
            r.lexicon_size,
            r.learning_rate,
            r.buffer_size,
            r.temperature,
            r.eval_samples,
        )?
        .with_logit_gain(r.logit_gain)
    }
}

fn positive_real(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{name} must be a positive real, got {v}"
        )))
    }
}

impl ToyElsParams {
    pub const DEFAULT_TIME_STEPS: u64 = 200_000;
    pub const DEFAULT_LEXICON_SIZE: usize = 64;
    pub const DEFAULT_LEARNING_RATE: f64 = 3e-3;
    pub const DEFAULT_BUFFER_SIZE: u64 = 256;
    pub const DEFAULT_TEMPERATURE: f64 = 1.5;
    pub const DEFAULT_EVAL_SAMPLES: u64 = 10_000;
    /// Step multiplier between the learning rate and the logits. A bare
    /// logit vector moves four orders of magnitude less per step than the
    /// bottleneck of an optimizer-driven network at the same learning rate;
    /// at gain 1 the swept learning rates never leave the uniform policy.
    pub const DEFAULT_LOGIT_GAIN: f64 = 1e4;

    pub fn new(
        time_steps: u64,
        lexicon_size: usize,
        learning_rate: f64,
        buffer_size: u64,
        temperature: f64,
        eval_samples: u64,
    ) -> Result<Self> {
        if time_steps == 0 || lexicon_size == 0 || buffer_size == 0 || eval_samples == 0 {
            return Err(Error::invalid(
                "time steps, lexicon size, buffer size and eval samples must all be at least 1",
            ));
        }
        positive_real("learning rate", learning_rate)?;
        positive_real("temperature", temperature)?;
        if buffer_size > time_steps {
            return Err(Error::invalid(format!(
                "buffer size {buffer_size} exceeds time steps {time_steps}, so no update would run"
            )));
        }
        Ok(ToyElsParams {
            time_steps,
            lexicon_size,
            learning_rate,
            buffer_size,
            temperature,
            eval_samples,
            logit_gain: Self::DEFAULT_LOGIT_GAIN,
        })
    }

    pub fn time_steps(&self) -> u64 {
        self.time_steps
    }

    pub fn lexicon_size(&self) -> usize {
        self.lexicon_size
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    pub fn buffer_size(&self) -> u64 {
        self.buffer_size
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn eval_samples(&self) -> u64 {
        self.eval_samples
    }

    pub fn logit_gain(&self) -> f64 {
        self.logit_gain
    }

    /// Parameter updates in one run: whole buffers that fit in the episode budget.
    pub fn n_updates(&self) -> u64 {
        self.time_steps / self.buffer_size
    }

    pub fn with_time_steps(self, v: u64) -> Result<Self> {
        Self::new(
            v,
            self.lexicon_size,
            self.learning_rate,
            self.buffer_size,
            self.temperature,
            self.eval_samples,
        )?
        .with_logit_gain(self.logit_gain)
    }

    pub fn with_lexicon_size(self, v: usize) -> Result<Self> {
        Self::new(
            self.time_steps,
            v,
            self.learning_rate,
            self.buffer_size,
            self.temperature,
            self.eval_samples,
        )?
        .with_logit_gain(self.logit_gain)
    }

    pub fn with_learning_rate(self, v: f64) -> Result<Self> {
        Self::new(
            self.time_steps,
            self.lexicon_size,
            v,
            self.buffer_size,
            self.temperature,
            self.eval_samples,
        )?
        .with_logit_gain(self.logit_gain)
    }

    pub fn with_buffer_size(self, v: u64) -> Result<Self> {
        Self::new(
            self.time_steps,
            self.lexicon_size,
            self.learning_rate,
            v,
            self.temperature,
            self.eval_samples,
        )?
        .with_logit_gain(self.logit_gain)
    }

    pub fn with_temperature(self, v: f64) -> Result<Self> {
        Self::new(
            self.time_steps,
            self.lexicon_size,
            self.learning_rate,
            self.buffer_size,
            v,
            self.eval_samples,
        )?
        .with_logit_gain(self.logit_gain)
    }

    pub fn with_logit_gain(mut self, gain: f64) -> Result<Self> {
        positive_real("logit gain", gain)?;
        self.logit_gain = gain;
        Ok(self)
    }

    pub fn with_eval_samples(self, v: u64) -> Result<Self> {
        Self::new(
            self.time_steps,
            self.lexicon_size,
            self.learning_rate,
            self.buffer_size,
            self.temperature,
            v,
        )?
        .with_logit_gain(self.logit_gain)
    }
}

impl Default for ToyElsParams {
    fn default() -> Self {
        ToyElsParams {
            time_steps: Self::DEFAULT_TIME_STEPS,
            lexicon_size: Self::DEFAULT_LEXICON_SIZE,
            learning_rate: Self::DEFAULT_LEARNING_RATE,
            buffer_size: Self::DEFAULT_BUFFER_SIZE,
            temperature: Self::DEFAULT_TEMPERATURE,
            eval_samples: Self::DEFAULT_EVAL_SAMPLES,
            logit_gain: Self::DEFAULT_LOGIT_GAIN,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToyElsState {
    logits: Vec<f64>,
    updates_applied: u64,
}

impl ToyElsState {
    /// All-zero logits, i.e. the uniform policy.
    pub fn uniform(lexicon_size: usize) -> Self {
        ToyElsState {
            logits: vec![0.0; lexicon_size],
            updates_applied: 0,
        }
    }

    pub fn from_logits(logits: Vec<f64>) -> Result<Self> {
        if logits.is_empty() || logits.iter().any(|l| !l.is_finite()) {
            return Err(Error::invalid(
                "logits must be a non-empty vector of finite reals",
            ));
        }
        Ok(ToyElsState {
            logits,
            updates_applied: 0,
        })
    }

    pub fn logits(&self) -> &[f64] {
        &self.logits
    }

    pub fn updates_applied(&self) -> u64 {
        self.updates_applied
    }

    pub fn policy(&self) -> ProbVector {
        let mut p = vec![0.0; self.logits.len()];
        softmax_into(&self.logits, 1.0, &mut p);
        ProbVector::new(p).expect("softmax output is normalized")
    }
}

/// `out = softmax(z / temperature)`, stabilized by the max logit.
fn softmax_into(z: &[f64], temperature: f64, out: &mut [f64]) {
    let top = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for (o, &v) in out.iter_mut().zip(z) {
        *o = ((v - top) / temperature).exp();
        total += *o;
    }
    for o in out.iter_mut() {
        *o /= total;
    }
}

/// Standard Gumbel variate, `-ln E` with `E ~ Exp(1)`.
#[inline]
fn gumbel<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let e: f64 = rng.sample(Exp1);
    -e.ln()
}

/// Scratch buffers reused across updates.
struct Workspace {
    perturbed: Vec<f64>,
    sample: Vec<f64>,
    policy: Vec<f64>,
    buffer_sum: Vec<f64>,
}

impl Workspace {
    fn new(s: usize) -> Self {
        Workspace {
            perturbed: vec![0.0; s],
            sample: vec![0.0; s],
            policy: vec![0.0; s],
            buffer_sum: vec![0.0; s],
        }
    }
}

/// One outer-loop iteration. `probe` sees the logits and the relaxed message
/// for every buffer entry, before the logits move.
fn update_in_place<R, F>(
    logits: &mut [f64],
    params: &ToyElsParams,
    rng: &mut R,
    ws: &mut Workspace,
    mut probe: F,
) where
    R: Rng + ?Sized,
    F: FnMut(&[f64], &[f64]),
{
    let t = params.temperature;
    softmax_into(logits, 1.0, &mut ws.policy);
    ws.buffer_sum.iter_mut().for_each(|v| *v = 0.0);
    for _ in 0..params.buffer_size {
        for (z, &l) in ws.perturbed.iter_mut().zip(logits.iter()) {
            *z = l + gumbel(rng);
        }
        softmax_into(&ws.perturbed, t, &mut ws.sample);
        probe(logits, &ws.sample);
        for (acc, &y) in ws.buffer_sum.iter_mut().zip(&ws.sample) {
            *acc += y;
        }
    }
    let step = params.logit_gain * params.learning_rate;
    let scale = step / params.buffer_size as f64;
    for ((l, &sum), &p) in logits.iter_mut().zip(&ws.buffer_sum).zip(&ws.policy) {
        // gain * lr * mean_b (y_b - p)
        *l += scale * sum - step * p;
    }
}

fn check_dims(state: &ToyElsState, params: &ToyElsParams) -> Result<()> {
    if state.logits.len() != params.lexicon_size {
        return Err(Error::invalid(format!(
            "state has {} logits but params specify lexicon size {}",
            state.logits.len(),
            params.lexicon_size
        )));
    }
    Ok(())
}

/// Collects `buffer_size` relaxed messages from the frozen logits and takes
/// one ascent step on the mean cross-entropy toward them:
/// `θ += gain · lr · mean_b(y_b − softmax(θ))`.
pub fn toy_update<R: Rng + ?Sized>(
    state: &ToyElsState,
    params: &ToyElsParams,
    rng: &mut R,
) -> Result<ToyElsState> {
    toy_update_with_probe(state, params, rng, |_, _| {})
}

/// [`toy_update`] with a hook observing `(logits, relaxed message)` for each
/// buffer entry.
pub fn toy_update_with_probe<R, F>(
    state: &ToyElsState,
    params: &ToyElsParams,
    rng: &mut R,
    probe: F,
) -> Result<ToyElsState>
where
    R: Rng + ?Sized,
    F: FnMut(&[f64], &[f64]),
{
    check_dims(state, params)?;
    let mut logits = state.logits.clone();
    let mut ws = Workspace::new(logits.len());
    update_in_place(&mut logits, params, rng, &mut ws, probe);
    Ok(ToyElsState {
        logits,
        updates_applied: state.updates_applied + 1,
    })
}

/// Trains from uniform logits for `time_steps / buffer_size` updates.
pub fn toy_train(params: &ToyElsParams, seed: u64) -> Result<ToyElsState> {
    let updates = params.n_updates();
    if updates == 0 {
        return Err(Error::invalid(
            "time steps / buffer size rounds down to zero updates",
        ));
    }
    let mut rng = rng_from_seed(seed);
    let mut state = ToyElsState::uniform(params.lexicon_size);
    let mut ws = Workspace::new(params.lexicon_size);
    for _ in 0..updates {
        update_in_place(&mut state.logits, params, &mut rng, &mut ws, |_, _| {});
    }
    state.updates_applied = updates;
    Ok(state)
}

/// Trains, then estimates word frequencies from `eval_samples` draws of the
/// final policy.
pub fn toy_run(params: &ToyElsParams, seed: u64) -> Result<ProbVector> {
    let state = toy_train(params, seed)?;
    // Evaluation draws use their own stream so the training stream is the
    // same for every eval_samples setting.
    let mut rng = rng_from_seed(crate::rng::mix_seed(seed, 1));
    let policy = state.policy();
    let mut cdf = Vec::with_capacity(policy.len());
    let mut acc = 0.0;
    cdf.extend(policy.as_slice().iter().map(|p| {
        acc += p;
        acc
    }));
    let mut counts = vec![0u64; policy.len()];
    for _ in 0..params.eval_samples {
        let u = rng.random::<f64>() * acc;
        counts[cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)] += 1;
    }
    ProbVector::from_counts(&counts)
}
