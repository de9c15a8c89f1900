use filex::rng::rng_from_seed;
use filex::stats::shannon_entropy;
use filex::toy_els::{toy_run, toy_update, ToyElsParams, ToyElsState};

fn mean_entropy(p: &ToyElsParams, seeds: std::ops::Range<u64>) -> f64 {
    let n = seeds.end - seeds.start;
    seeds
        .map(|s| shannon_entropy(&toy_run(p, s).unwrap()))
        .sum::<f64>()
        / n as f64
}

#[test]
fn uniform_logits_have_zero_expected_update() {
    for temperature in [0.3, 1.5, 5.0] {
        let p = ToyElsParams::new(64, 4, 1e-4, 16, temperature, 1).unwrap();
        let start = ToyElsState::uniform(4);
        let trials = 10_000;
        let mut sum = [0.0f64; 4];
        let mut sum_sq = [0.0f64; 4];
        for seed in 0..trials {
            let mut rng = rng_from_seed(seed);
            let next = toy_update(&start, &p, &mut rng).unwrap();
            for (i, d) in next.logits().iter().enumerate() {
                sum[i] += d;
                sum_sq[i] += d * d;
            }
        }
        for i in 0..4 {
            let n = trials as f64;
            let mean = sum[i] / n;
            let sd = (sum_sq[i] / n - mean * mean).sqrt();
            assert!(
                mean.abs() <= 3.0 * sd / n.sqrt(),
                "T={temperature} i={i} mean={mean} sd={sd}"
            );
        }
    }
}

#[test]
fn hot_relaxation_shrinks_the_leading_logit() {
    let p = ToyElsParams::new(10_000, 4, 1.0, 10_000, 1e6, 1).unwrap();
    let start = ToyElsState::from_logits(vec![5.0, 0.0, 0.0, 0.0]).unwrap();
    let decreased = (0..1000)
        .filter(|&seed| {
            let mut rng = rng_from_seed(seed);
            toy_update(&start, &p, &mut rng).unwrap().logits()[0] < 5.0
        })
        .count();
    assert!(decreased as f64 >= 0.999 * 1000.0, "{decreased}");
}

#[test]
fn no_learning_gives_near_uniform_frequencies() {
    let p = ToyElsParams::new(32, 16, 1e-12, 32, 1.5, 10_000).unwrap();
    let h = shannon_entropy(&toy_run(&p, 9).unwrap());
    // Plug-in bias for 16 words and 1e4 draws is about 1e-3 bits.
    assert!(h < 4.0 && h > 4.0 - 0.01, "{h}");
}

#[test]
fn defaults_stay_below_maximum_entropy() {
    let p = ToyElsParams::default();
    let below = (0..100)
        .filter(|&s| shannon_entropy(&toy_run(&p, s).unwrap()) < 6.0)
        .count();
    assert!(below >= 95, "{below}");
}

#[test]
fn higher_learning_rate_drifts_to_a_corner() {
    let fast = ToyElsParams::new(80_000, 8, 0.1, 8, 0.1, 10_000).unwrap();
    let slow = fast.with_learning_rate(1e-3).unwrap();
    let (hf, hs) = (mean_entropy(&fast, 0..50), mean_entropy(&slow, 0..50));
    assert!(hf < hs, "fast {hf} slow {hs}");
}

#[test]
fn outputs_are_valid_distributions() {
    for (s, seed) in [(1usize, 0u64), (5, 1), (64, 2)] {
        let p = ToyElsParams::new(512, s, 3e-3, 64, 0.8, 500).unwrap();
        let out = toy_run(&p, seed).unwrap();
        assert_eq!(out.len(), s);
        let h = shannon_entropy(&out);
        assert!(h >= 0.0 && h <= (s as f64).log2());
        assert_eq!(toy_run(&p, seed).unwrap(), out);
    }
}
