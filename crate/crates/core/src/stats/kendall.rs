use std::cmp::Ordering;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Number of random permutations behind the p-value for `9 <= n <= 50`.
pub const PERMUTATION_COUNT: usize = 100_000;
const EXACT_MAX_N: usize = 8;
const PERMUTATION_MAX_N: usize = 50;
const PERMUTATION_SEED: u64 = 0x6b65_6e64_616c_6c74;
const ZERO_TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(tau: f64) -> Sign {
        if tau.abs() < ZERO_TAU {
            Sign::Zero
        } else if tau > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Negative => '-',
            Sign::Zero => '0',
            Sign::Positive => '+',
        }
    }
}

/// Kendall τ-b with its two-sided p-value under independence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSummary {
    pub tau: f64,
    pub p_value: f64,
    pub n: usize,
    pub sign: Sign,
}

/// Pair counts behind τ-b.
#[derive(Debug, Clone, Copy)]
struct PairCounts {
    /// concordant minus discordant
    score: i64,
    /// pairs not tied in x
    untied_x: i64,
    /// pairs not tied in y
    untied_y: i64,
}

impl PairCounts {
    fn tau(&self) -> f64 {
        self.score as f64 / ((self.untied_x as f64) * (self.untied_y as f64)).sqrt()
    }
}

fn tie_pairs(sorted: &[f64]) -> i64 {
    sorted
        .chunk_by(|a, b| a == b)
        .map(|g| {
            let t = g.len() as i64;
            t * (t - 1) / 2
        })
        .sum()
}

/// Merge sort that returns the number of strictly inverted pairs.
fn sort_counting_swaps(v: &mut [f64], buf: &mut Vec<f64>) -> i64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps =
        sort_counting_swaps(&mut v[..mid], buf) + sort_counting_swaps(&mut v[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[j] < v[i] {
            swaps += (mid - i) as i64;
            buf.push(v[j]);
            j += 1;
        } else {
            buf.push(v[i]);
            i += 1;
        }
    }
    buf.extend_from_slice(&v[i..mid]);
    buf.extend_from_slice(&v[j..n]);
    v.copy_from_slice(buf);
    swaps
}

/// O(n log n) pair counting (Knight's algorithm).
fn pair_counts(xs: &[f64], ys: &[f64]) -> PairCounts {
    let n = xs.len() as i64;
    let total = n * (n - 1) / 2;
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(ys[a].total_cmp(&ys[b])));

    let sorted_x: Vec<f64> = order.iter().map(|&i| xs[i]).collect();
    let mut by_x_y: Vec<f64> = order.iter().map(|&i| ys[i]).collect();
    let x_ties = tie_pairs(&sorted_x);
    let joint_ties: i64 = order
        .chunk_by(|&a, &b| xs[a] == xs[b] && ys[a] == ys[b])
        .map(|g| {
            let t = g.len() as i64;
            t * (t - 1) / 2
        })
        .sum();

    let mut buf = Vec::with_capacity(xs.len());
    let swaps = sort_counting_swaps(&mut by_x_y, &mut buf);
    let y_ties = tie_pairs(&by_x_y);

    PairCounts {
        score: total - x_ties - y_ties + joint_ties - 2 * swaps,
        untied_x: total - x_ties,
        untied_y: total - y_ties,
    }
}

fn split_points(points: &[(f64, f64)]) -> Result<(Vec<f64>, Vec<f64>)> {
    if points.len() < 2 {
        return Err(Error::invalid(format!(
            "kendall tau needs at least 2 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|(x, y)| x.is_nan() || y.is_nan()) {
        return Err(Error::invalid("kendall tau input contains NaN"));
    }
    // Canonical order keeps the seeded permutation p-value independent of
    // how the caller ordered the points.
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Ok(sorted.into_iter().unzip())
}

fn checked_counts(xs: &[f64], ys: &[f64]) -> Result<PairCounts> {
    let counts = pair_counts(xs, ys);
    if counts.untied_x == 0 {
        return Err(Error::UndefinedCorrelation("all x values are tied".into()));
    }
    if counts.untied_y == 0 {
        return Err(Error::UndefinedCorrelation("all y values are tied".into()));
    }
    Ok(counts)
}

/// τ-b alone, without a significance estimate.
pub fn kendall_tau_b(points: &[(f64, f64)]) -> Result<f64> {
    let (xs, ys) = split_points(points)?;
    Ok(checked_counts(&xs, &ys)?.tau())
}

/// Kendall τ-b plus a two-sided p-value.
///
/// The p-value comes from exact enumeration of all `n!` orderings for
/// `n <= 8`, from [`PERMUTATION_COUNT`] seeded random permutations for
/// `n <= 50`, and from the tie-corrected normal approximation above that.
pub fn kendall_tau(points: &[(f64, f64)]) -> Result<CorrelationSummary> {
    let (xs, ys) = split_points(points)?;
    let counts = checked_counts(&xs, &ys)?;
    let tau = counts.tau().clamp(-1.0, 1.0);
    let n = xs.len();
    let p_value = if n <= EXACT_MAX_N {
        exact_p_value(&xs, &ys, counts.score)
    } else if n <= PERMUTATION_MAX_N {
        permutation_p_value(&xs, &ys, counts.score)
    } else {
        normal_p_value(&xs, &ys, counts.score)
    };
    Ok(CorrelationSummary {
        tau,
        p_value: p_value.clamp(0.0, 1.0),
        n,
        sign: Sign::of(tau),
    })
}

fn cmp_sign(a: f64, b: f64) -> i8 {
    match a.partial_cmp(&b) {
        Some(Ordering::Less) => -1,
        Some(Ordering::Greater) => 1,
        _ => 0,
    }
}

/// Concordance score against a fixed x-sign matrix; O(n^2), used for the
/// small-n null distributions.
struct ScoreKernel {
    n: usize,
    x_signs: Vec<i8>,
}

impl ScoreKernel {
    fn new(xs: &[f64]) -> Self {
        let n = xs.len();
        let mut x_signs = vec![0i8; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                x_signs[i * n + j] = cmp_sign(xs[j], xs[i]);
            }
        }
        ScoreKernel { n, x_signs }
    }

    fn score(&self, ys: &[f64]) -> i64 {
        let n = self.n;
        let mut s = 0i64;
        for i in 0..n {
            for j in (i + 1)..n {
                s += (self.x_signs[i * n + j] * cmp_sign(ys[j], ys[i])) as i64;
            }
        }
        s
    }
}

fn exact_p_value(xs: &[f64], ys: &[f64], observed: i64) -> f64 {
    let kernel = ScoreKernel::new(xs);
    let mut perm = ys.to_vec();
    let n = perm.len();
    let (mut extreme, mut total) = (0u64, 0u64);
    let mut tally = |p: &[f64]| {
        total += 1;
        if kernel.score(p).abs() >= observed.abs() {
            extreme += 1;
        }
    };
    // Heap's algorithm, iterative form.
    let mut c = vec![0usize; n];
    tally(&perm);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            tally(&perm);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    extreme as f64 / total as f64
}

fn permutation_p_value(xs: &[f64], ys: &[f64], observed: i64) -> f64 {
    let kernel = ScoreKernel::new(xs);
    let mut rng = rng_from_seed(PERMUTATION_SEED);
    let mut perm = ys.to_vec();
    let mut extreme = 0u64;
    for _ in 0..PERMUTATION_COUNT {
        perm.shuffle(&mut rng);
        if kernel.score(&perm).abs() >= observed.abs() {
            extreme += 1;
        }
    }
    (extreme + 1) as f64 / (PERMUTATION_COUNT + 1) as f64
}

fn tie_group_sizes(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .chunk_by(|a, b| a == b)
        .filter(|g| g.len() > 1)
        .map(|g| g.len() as f64)
        .collect()
}

/// Normal approximation to the null distribution of the score with the
/// standard tie-corrected variance.
fn normal_p_value(xs: &[f64], ys: &[f64], observed: i64) -> f64 {
    let n = xs.len() as f64;
    let tx = tie_group_sizes(xs);
    let ty = tie_group_sizes(ys);
    let sum = |ts: &[f64], f: &dyn Fn(f64) -> f64| ts.iter().map(|&t| f(t)).sum::<f64>();
    let v0 = n * (n - 1.0) * (2.0 * n + 5.0);
    let vt = sum(&tx, &|t| t * (t - 1.0) * (2.0 * t + 5.0));
    let vu = sum(&ty, &|u| u * (u - 1.0) * (2.0 * u + 5.0));
    let v1 = sum(&tx, &|t| t * (t - 1.0)) * sum(&ty, &|u| u * (u - 1.0));
    let v2 = sum(&tx, &|t| t * (t - 1.0) * (t - 2.0)) * sum(&ty, &|u| u * (u - 1.0) * (u - 2.0));
    let var =
        (v0 - vt - vu) / 18.0 + v1 / (2.0 * n * (n - 1.0)) + v2 / (9.0 * n * (n - 1.0) * (n - 2.0));
    if var <= 0.0 {
        return 1.0;
    }
    let z = observed as f64 / var.sqrt();
    erfc(z.abs() / std::f64::consts::SQRT_2)
}
