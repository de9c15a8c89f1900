//! Scatter plot with a smoothed trend for FiLex's lexicon-size sweep.
//!
//! cargo run --release --example plot -- [out.svg]

use filex::plot::{render_svg, PlotOptions};
use filex::records::SweepMetadata;
use filex::sweep::{default_filex_suite, run_sweep};
use filex::Hyperparameter;

fn main() -> filex::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "lexicon_size.svg".into());
    let spec = default_filex_suite(0)
        .into_iter()
        .find(|s| s.swept_param() == Hyperparameter::LexiconSize)
        .expect("suite sweeps lexicon size")
        .with_steps(150)?;
    let outcome = run_sweep(&spec);
    let meta = SweepMetadata::new(&spec, &outcome);
    let svg = render_svg(&outcome.records, Some(&meta), &PlotOptions::default())?;
    std::fs::write(&out, svg)?;
    println!("wrote {out}");
    Ok(())
}
