//! Run a small sweep over FiLex's alpha and write the CSV and its sidecar.
//!
//! cargo run --release --example sweep -- [out_dir]

use std::path::PathBuf;

use filex::records::write_sweep;
use filex::sweep::run_sweep;
use filex::{FilexParams, Hyperparameter, ParamSet, SweepSpec};

fn main() -> filex::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("filex-sweep"), PathBuf::from);
    std::fs::create_dir_all(&dir)?;

    let defaults = ParamSet::Filex(FilexParams::default().with_n_iters(200)?);
    let spec = SweepSpec::new(Hyperparameter::Alpha, 1e-3, 1e3, 60, false, defaults, 7)?
        .with_repeats(2)?;
    let outcome = run_sweep(&spec);
    let path = write_sweep(&dir, &spec, &outcome)?;

    println!(
        "wrote {} records to {}",
        outcome.records.len(),
        path.display()
    );
    for r in outcome.records.iter().step_by(20) {
        println!(
            "  alpha {:>10.4e}  seed {:>20}  entropy {:.4}",
            r.value, r.seed, r.entropy
        );
    }
    Ok(())
}
