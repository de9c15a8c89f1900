//! Train the toy emergent-language agent and watch its word distribution
//! sharpen as the learning rate grows.
//!
//! cargo run --release --example toy_els

use filex::stats::shannon_entropy;
use filex::toy_els::{toy_run, ToyElsParams};

fn main() -> filex::Result<()> {
    let base = ToyElsParams::new(20_000, 32, 1e-3, 64, 1.5, 10_000)?;
    println!(
        "{} updates of {} relaxed samples each",
        base.n_updates(),
        base.buffer_size()
    );
    println!("learning_rate  entropy (bits, mean of 5 seeds)");
    for lr in [1e-4, 1e-3, 1e-2, 1e-1] {
        let p = base.with_learning_rate(lr)?;
        let mut total = 0.0;
        for seed in 0..5 {
            total += shannon_entropy(&toy_run(&p, seed)?);
        }
        println!("{lr:>13.0e}  {:.4}", total / 5.0);
    }
    Ok(())
}
