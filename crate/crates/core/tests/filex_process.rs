use filex::filex::{draw_counts, init_state, run, run_batch, run_state, step};
use filex::rng::rng_from_seed;
use filex::stats::shannon_entropy;
use filex::FilexParams;
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// All count vectors of `k` trials over `s` words with their exact
/// multinomial probabilities under uniform weights.
fn multinomial_pmf(s: usize, k: u32) -> Vec<(Vec<u32>, f64)> {
    fn rec(s: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == s - 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for c in 0..=left {
            prefix.push(c);
            rec(s, left - c, prefix, out);
            prefix.pop();
        }
    }
    let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
    let mut vecs = Vec::new();
    rec(s, k, &mut Vec::new(), &mut vecs);
    vecs.into_iter()
        .map(|v| {
            let coeff = fact(k) / v.iter().map(|&c| fact(c)).product::<f64>();
            (v, coeff * (1.0 / s as f64).powi(k as i32))
        })
        .collect()
}

fn chi_square_passes(s: usize, k: u32, alpha: f64, trials: usize, seed: u64) -> bool {
    let params = FilexParams::new(alpha, k, s, 1).unwrap();
    let start = init_state(&params);
    let pmf = multinomial_pmf(s, k);
    let mut observed = vec![0usize; pmf.len()];
    let mut rng = rng_from_seed(seed);
    for _ in 0..trials {
        let next = step(&start, &params, &mut rng).unwrap();
        assert!((next.mass() - (1.0 + alpha)).abs() < 1e-12);
        // Recover the counts from the weight increments.
        let counts: Vec<u32> = next
            .weights()
            .iter()
            .zip(start.weights())
            .map(|(w, w0)| ((w - w0) * k as f64 / alpha).round() as u32)
            .collect();
        let cell = pmf
            .iter()
            .position(|(v, _)| *v == counts)
            .expect("valid count vector");
        observed[cell] += 1;
    }
    let stat: f64 = pmf
        .iter()
        .zip(&observed)
        .map(|((_, p), &o)| {
            let e = p * trials as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dof = (pmf.len() - 1) as f64;
    if dof == 0.0 {
        return stat == 0.0;
    }
    let critical = ChiSquared::new(dof).unwrap().inverse_cdf(0.999);
    stat < critical
}

#[test]
fn step_matches_exact_multinomial() {
    assert!(chi_square_passes(3, 4, 0.5, 100_000, 1));
}

#[test]
fn frozen_draws_equal_one_multinomial_for_small_cases() {
    for s in 1..=3 {
        for k in 1..=4 {
            assert!(
                chi_square_passes(s, k, 1.0, 20_000, (s * 10 + k as usize) as u64),
                "S={s} k={k}"
            );
        }
    }
}

#[test]
fn fair_two_trial_pmf() {
    let pmf = multinomial_pmf(2, 2);
    let probs: Vec<f64> = pmf.iter().map(|(_, p)| *p).collect();
    assert_eq!(probs, vec![0.25, 0.5, 0.25]);
}

#[test]
fn draws_always_sum_to_beta() {
    let params = FilexParams::new(1.0, 13, 7, 1).unwrap();
    let mut rng = rng_from_seed(0);
    let mut state = init_state(&params);
    for _ in 0..50 {
        assert_eq!(draw_counts(&state, &params, &mut rng).unwrap().trials(), 13);
        state = step(&state, &params, &mut rng).unwrap();
    }
}

#[test]
fn more_iterations_lower_mean_entropy() {
    let seeds: Vec<u64> = (0..200).collect();
    let mean = |n: u32| {
        let p = FilexParams::default().with_n_iters(n).unwrap();
        let outs = run_batch(&p, &seeds).unwrap();
        outs.iter().map(shannon_entropy).sum::<f64>() / outs.len() as f64
    };
    assert!(mean(1000) < mean(10));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mass_grows_by_alpha_each_iteration(
        log_alpha in -3.0f64..3.0,
        beta in 1u32..60,
        s in 1usize..80,
        n in 1u32..200,
        seed in any::<u64>(),
    ) {
        let alpha = 10f64.powf(log_alpha);
        let p = FilexParams::new(alpha, beta, s, n).unwrap();
        let st = run_state(&p, seed);
        let expected = 1.0 + n as f64 * alpha;
        prop_assert!((st.mass() - expected).abs() <= 1e-9 * expected);
        prop_assert_eq!(st.iteration(), n as u64);
        prop_assert!(st.weights().iter().all(|&w| w > 0.0));
        let out = run(&p, seed);
        let h = shannon_entropy(&out);
        prop_assert!(h >= 0.0 && h <= (s as f64).log2());
        prop_assert_eq!(run(&p, seed), out);
    }
}
