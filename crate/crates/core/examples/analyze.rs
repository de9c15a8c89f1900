//! The whole comparison at reduced size: both suites, correlations, and the
//! sign test across the five matched hyperparameter columns.
//!
//! cargo run --release --example analyze -- [steps]

use filex::analysis::{analyze, DEFAULT_STRONG_THRESHOLD};
use filex::sweep::{default_filex_suite, default_toy_els_suite, run_sweep};

fn main() -> filex::Result<()> {
    let steps = std::env::args()
        .nth(1)
        .map_or(Ok(40), |s| s.parse())
        .expect("steps must be an integer");
    let mut specs = default_filex_suite(0)
        .into_iter()
        .map(|s| s.with_steps(steps))
        .collect::<filex::Result<Vec<_>>>()?;
    specs.extend(default_toy_els_suite(steps, 0)?);

    let mut records = Vec::new();
    for spec in &specs {
        let outcome = run_sweep(spec);
        eprintln!(
            "{}/{}: {} runs",
            spec.target(),
            spec.swept_param(),
            outcome.records.len()
        );
        records.extend(outcome.records);
    }
    let report = analyze(&records, DEFAULT_STRONG_THRESHOLD)?;
    print!("{}", report.render_table());
    Ok(())
}
