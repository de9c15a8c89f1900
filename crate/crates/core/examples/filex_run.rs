//! One FiLex run: start uniform, reinforce sampled words, report the result.
//!
//! cargo run --example filex_run -- [seed]

use filex::filex::{init_state, step};
use filex::rng::rng_from_seed;
use filex::stats::shannon_entropy;
use filex::FilexParams;

fn main() -> filex::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .map_or(Ok(0), |s| s.parse())
        .expect("seed must be an integer");
    let params = FilexParams::new(1.0, 8, 16, 500)?;
    let mut rng = rng_from_seed(seed);
    let mut state = init_state(&params);

    println!("iter    mass      entropy");
    for i in 1..=params.n_iters() {
        state = step(&state, &params, &mut rng)?;
        if i.is_power_of_two() || i == params.n_iters() {
            println!(
                "{i:>4}  {:>8.3}  {:>9.4}",
                state.mass(),
                shannon_entropy(&state.normalized())
            );
        }
    }

    let mut probs: Vec<(usize, f64)> = state
        .normalized()
        .into_inner()
        .into_iter()
        .enumerate()
        .collect();
    probs.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("\nmost used words:");
    for (word, p) in probs.iter().take(5) {
        println!("  w{word:<3} {p:.4}");
    }
    println!(
        "max entropy {:.4} bits",
        (params.lexicon_size() as f64).log2()
    );
    Ok(())
}
