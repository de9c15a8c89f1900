//! Exact one-sided binomial tail for sign agreement counts.

use filex::stats::binomial_sign_test;

fn main() -> filex::Result<()> {
    for (k, n) in [(5, 5), (4, 5), (15, 20), (20, 20), (60, 100)] {
        println!(
            "P(X >= {k:>2} | n = {n:>3}) = {:.6e}",
            binomial_sign_test(k, n)?
        );
    }
    Ok(())
}
