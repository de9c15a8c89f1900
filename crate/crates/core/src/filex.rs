//! The fixed-lexicon self-reinforcing process.
//!
//! A weight vector over `S` words starts uniform at `1/S`. Each iteration
//! draws `β` word indices i.i.d. from the normalized weights, frozen for the
//! whole iteration, and adds `α/β` to every drawn word. After `N` iterations
//! the normalized weights are the output distribution.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::ProbVector;
use crate::rng::{rng_from_seed, SimRng};

/// Hyperparameters `(α, β, S, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFilexParams")]
pub struct FilexParams {
    alpha: f64,
    beta: u32,
    lexicon_size: usize,
    n_iters: u32,
}

#[derive(Deserialize)]
struct RawFilexParams {
    alpha: f64,
    beta: u32,
    lexicon_size: usize,
    n_iters: u32,
}

impl TryFrom<RawFilexParams> for FilexParams {
    type Error = Error;

    fn try_from(raw: RawFilexParams) -> Result<Self> {
        FilexParams::new(raw.alpha, raw.beta, raw.lexicon_size, raw.n_iters)
    }
}

impl FilexParams {
    pub const DEFAULT_ALPHA: f64 = 1.0;
    pub const DEFAULT_BETA: u32 = 8;
    pub const DEFAULT_LEXICON_SIZE: usize = 64;
    pub const DEFAULT_N_ITERS: u32 = 1000;

    pub fn new(alpha: f64, beta: u32, lexicon_size: usize, n_iters: u32) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::invalid(format!(
                "alpha must be a positive real, got {alpha}"
            )));
        }
        if beta == 0 {
            return Err(Error::invalid("beta must be at least 1"));
        }
        if lexicon_size == 0 {
            return Err(Error::invalid("lexicon size must be at least 1"));
        }
        if n_iters == 0 {
            return Err(Error::invalid("number of iterations must be at least 1"));
        }
        Ok(FilexParams {
            alpha,
            beta,
            lexicon_size,
            n_iters,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }

    pub fn lexicon_size(&self) -> usize {
        self.lexicon_size
    }

    pub fn n_iters(&self) -> u32 {
        self.n_iters
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.beta, self.lexicon_size, self.n_iters)
    }

    pub fn with_beta(self, beta: u32) -> Result<Self> {
        Self::new(self.alpha, beta, self.lexicon_size, self.n_iters)
    }

    pub fn with_lexicon_size(self, lexicon_size: usize) -> Result<Self> {
        Self::new(self.alpha, self.beta, lexicon_size, self.n_iters)
    }

    pub fn with_n_iters(self, n_iters: u32) -> Result<Self> {
        Self::new(self.alpha, self.beta, self.lexicon_size, n_iters)
    }
}

impl Default for FilexParams {
    fn default() -> Self {
        FilexParams {
            alpha: Self::DEFAULT_ALPHA,
            beta: Self::DEFAULT_BETA,
            lexicon_size: Self::DEFAULT_LEXICON_SIZE,
            n_iters: Self::DEFAULT_N_ITERS,
        }
    }
}

/// Unnormalized weights plus the number of updates applied so far.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightState {
    weights: Vec<f64>,
    iteration: u64,
}

impl WeightState {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    /// L1 norm of the weights; equals `1 + iteration * alpha`.
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn normalized(&self) -> ProbVector {
        ProbVector::from_weights(&self.weights).expect("weights are strictly positive")
    }
}

/// Per-word counts of one iteration's `β` categorical draws.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultinomialDraw {
    counts: Vec<u32>,
}

impl MultinomialDraw {
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn trials(&self) -> u32 {
        self.counts.iter().sum()
    }
}

pub fn init_state(params: &FilexParams) -> WeightState {
    let s = params.lexicon_size;
    WeightState {
        weights: vec![1.0 / s as f64; s],
        iteration: 0,
    }
}

/// Running sums of the weights, used for inverse-CDF lookups.
fn cumulative(weights: &[f64], cdf: &mut Vec<f64>) {
    cdf.clear();
    let mut acc = 0.0;
    cdf.extend(weights.iter().map(|w| {
        acc += w;
        acc
    }));
}

/// Inverse-CDF categorical draw against unnormalized running sums.
#[inline]
fn sample_index<R: Rng + ?Sized>(cdf: &[f64], rng: &mut R) -> usize {
    let total = cdf[cdf.len() - 1];
    let u = rng.random::<f64>() * total;
    // First bucket whose running sum exceeds u; clamp guards the u == total
    // rounding edge.
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

fn check_dims(state: &WeightState, params: &FilexParams) -> Result<()> {
    if state.weights.len() != params.lexicon_size {
        return Err(Error::invalid(format!(
            "state has {} weights but params specify lexicon size {}",
            state.weights.len(),
            params.lexicon_size
        )));
    }
    Ok(())
}

/// Draws `β` indices i.i.d. from the current normalized weights.
pub fn draw_counts<R: Rng + ?Sized>(
    state: &WeightState,
    params: &FilexParams,
    rng: &mut R,
) -> Result<MultinomialDraw> {
    check_dims(state, params)?;
    let mut cdf = Vec::with_capacity(state.weights.len());
    cumulative(&state.weights, &mut cdf);
    let mut counts = vec![0u32; state.weights.len()];
    for _ in 0..params.beta {
        counts[sample_index(&cdf, rng)] += 1;
    }
    Ok(MultinomialDraw { counts })
}

/// One update iteration: `w += α · x / β` with `x ~ Multi(β, w / |w|)`.
pub fn step<R: Rng + ?Sized>(
    state: &WeightState,
    params: &FilexParams,
    rng: &mut R,
) -> Result<WeightState> {
    let draw = draw_counts(state, params, rng)?;
    let increment = params.alpha / params.beta as f64;
    let weights = state
        .weights
        .iter()
        .zip(&draw.counts)
        .map(|(w, &c)| w + increment * c as f64)
        .collect();
    Ok(WeightState {
        weights,
        iteration: state.iteration + 1,
    })
}

/// Final weight state after `n_iters` updates from the uniform start.
pub fn run_state(params: &FilexParams, seed: u64) -> WeightState {
    let mut rng = rng_from_seed(seed);
    run_state_with(params, &mut rng)
}

fn run_state_with(params: &FilexParams, rng: &mut SimRng) -> WeightState {
    let mut state = init_state(params);
    let increment = params.alpha / params.beta as f64;
    let mut cdf = Vec::with_capacity(params.lexicon_size);
    let mut counts = vec![0u32; params.lexicon_size];
    // In-place version of `step`: the running sums are rebuilt once per
    // iteration, so all β draws see the same frozen weights.
    for _ in 0..params.n_iters {
        cumulative(&state.weights, &mut cdf);
        counts.iter_mut().for_each(|c| *c = 0);
        for _ in 0..params.beta {
            counts[sample_index(&cdf, rng)] += 1;
        }
        for (w, &c) in state.weights.iter_mut().zip(&counts) {
            *w += increment * c as f64;
        }
        state.iteration += 1;
    }
    state
}

/// Samples the process once: the normalized weights after `n_iters` updates.
pub fn run(params: &FilexParams, seed: u64) -> ProbVector {
    run_state(params, seed).normalized()
}

/// `run` for each seed, in input order. Seeds are processed in parallel on
/// the current rayon pool; every output depends only on its own seed.
pub fn run_batch(params: &FilexParams, seeds: &[u64]) -> Result<Vec<ProbVector>> {
    if seeds.is_empty() {
        return Err(Error::invalid("seed list is empty"));
    }
    Ok(seeds.par_iter().map(|&seed| run(params, seed)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::shannon_entropy;

    fn params(alpha: f64, beta: u32, s: usize, n: u32) -> FilexParams {
        FilexParams::new(alpha, beta, s, n).unwrap()
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(FilexParams::new(0.0, 1, 1, 1).is_err());
        assert!(FilexParams::new(-1.0, 1, 1, 1).is_err());
        assert!(FilexParams::new(f64::NAN, 1, 1, 1).is_err());
        assert!(FilexParams::new(1.0, 0, 1, 1).is_err());
        assert!(FilexParams::new(1.0, 1, 0, 1).is_err());
        assert!(FilexParams::new(1.0, 1, 1, 0).is_err());
    }

    #[test]
    fn init_is_uniform() {
        let st = init_state(&params(1.0, 8, 4, 10));
        assert_eq!(st.weights(), &[0.25; 4]);
        assert_eq!(st.iteration(), 0);
        assert_eq!(init_state(&params(1.0, 8, 1, 10)).weights(), &[1.0]);
        let st = init_state(&params(1.0, 8, 64, 10));
        assert!(st.weights().iter().all(|&w| w == 0.015625));
        assert_eq!(st.mass(), 1.0);
    }

    #[test]
    fn single_word_step_adds_alpha() {
        let p = params(2.5, 7, 1, 3);
        let mut rng = rng_from_seed(3);
        let st = step(&init_state(&p), &p, &mut rng).unwrap();
        assert!((st.weights()[0] - 3.5).abs() < 1e-12);
        assert_eq!(st.iteration(), 1);
    }

    #[test]
    fn step_rejects_dimension_mismatch() {
        let p4 = params(1.0, 2, 4, 1);
        let p3 = params(1.0, 2, 3, 1);
        let mut rng = rng_from_seed(0);
        let err = step(&init_state(&p4), &p3, &mut rng).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn fair_two_trial_draw_frequencies() {
        let p = params(1.0, 2, 2, 1);
        let st = init_state(&p);
        let mut rng = rng_from_seed(11);
        let mut hist = [0u32; 3];
        let trials = 40_000;
        for _ in 0..trials {
            let d = draw_counts(&st, &p, &mut rng).unwrap();
            assert_eq!(d.trials(), 2);
            hist[d.counts()[0] as usize] += 1;
        }
        for (k, expected) in [0.25, 0.5, 0.25].into_iter().enumerate() {
            let freq = hist[k] as f64 / trials as f64;
            // 5 standard errors of a proportion near 0.5 at 4e4 trials is 0.0125
            assert!((freq - expected).abs() < 0.0125, "k={k} freq={freq}");
        }
    }

    #[test]
    fn run_matches_stepwise_application() {
        let p = params(0.7, 5, 6, 40);
        let mut rng = rng_from_seed(99);
        let mut st = init_state(&p);
        for _ in 0..p.n_iters() {
            st = step(&st, &p, &mut rng).unwrap();
        }
        assert_eq!(st, run_state(&p, 99));
    }

    #[test]
    fn vanishing_alpha_stays_uniform() {
        let out = run(&params(1e-12, 8, 64, 1000), 5);
        assert!(out
            .as_slice()
            .iter()
            .all(|&x| (x - 1.0 / 64.0).abs() < 1e-9));
        assert!((shannon_entropy(&out) - 6.0).abs() < 1e-6);
    }

    #[test]
    fn single_word_output() {
        assert_eq!(run(&params(3.0, 4, 1, 50), 1).as_slice(), &[1.0]);
    }

    #[test]
    fn batch_follows_input_order() {
        let p = params(1.0, 8, 8, 100);
        assert!(run_batch(&p, &[]).is_err());
        assert_eq!(run_batch(&p, &[7]).unwrap(), vec![run(&p, 7)]);
        let seeds = [5u64, 1, 9, 3];
        let shuffled = [9u64, 3, 5, 1];
        let a = run_batch(&p, &seeds).unwrap();
        let b = run_batch(&p, &shuffled).unwrap();
        for (i, s) in shuffled.iter().enumerate() {
            let j = seeds.iter().position(|x| x == s).unwrap();
            assert_eq!(b[i], a[j]);
        }
    }

    #[test]
    fn batch_mean_entropy_below_uniform() {
        let p = params(1.0, 8, 8, 1000);
        let seeds: Vec<u64> = (0..100).collect();
        let outs = run_batch(&p, &seeds).unwrap();
        let mean = outs.iter().map(shannon_entropy).sum::<f64>() / outs.len() as f64;
        assert!(mean < 3.0, "mean entropy {mean}");
    }

    #[test]
    fn params_roundtrip_through_toml_and_validate() {
        let p = params(0.5, 3, 16, 20);
        let text = toml::to_string(&p).unwrap();
        let back: FilexParams = toml::from_str(&text).unwrap();
        assert_eq!(back, p);
        assert!(toml::from_str::<FilexParams>(
            "alpha = 1.0\nbeta = 0\nlexicon_size = 4\nn_iters = 1\n"
        )
        .is_err());
    }
}
