//! Kendall's tau-b with its p-value, plus the smoothed trend used in plots.

use filex::stats::{default_bandwidth, gaussian_smooth, kendall_tau};

fn main() -> filex::Result<()> {
    // Noisy decreasing relationship on a log-spaced axis, with ties in y.
    let points: Vec<(f64, f64)> = (0..40)
        .map(|i| {
            let x = 10f64.powf(i as f64 / 13.0);
            let y = (6.0 - x.ln() / 2.0 + ((i * 7919) % 11) as f64 / 10.0).round();
            (x, y)
        })
        .collect();

    let s = kendall_tau(&points)?;
    println!(
        "tau-b {:+.4}  p {:.3e}  n {}  sign {}",
        s.tau,
        s.p_value,
        s.n,
        s.sign.symbol()
    );

    let h = default_bandwidth(&points);
    let trend = gaussian_smooth(&points, h, 8)?;
    println!("\nsmoothed (bandwidth {h:.3} in ln x):");
    for (x, y) in trend.xs.iter().zip(&trend.ys) {
        println!("  x {x:>9.3}  y {y:.3}");
    }
    Ok(())
}
