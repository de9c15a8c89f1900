//! The `filex` command-line tool.
//!
//! ```text
//! filex run      --target filex --alpha 1 --beta 8 --lexicon-size 64 --n-iters 1000 --seed 0
//! filex sweep    --suite filex --out runs/
//! filex analyze  runs/*.csv --out report.toml
//! filex plot     runs/filex_alpha.csv --out alpha.svg
//! ```
//!
//! `--config FILE` reads a TOML file whose keys (`seed`, `steps`, `workers`,
//! `bandwidth`, `strong_threshold`, `out`) fill any flag not given on the
//! command line. Exit codes: 0 success, 1 usage or parameter error, 2 I/O
//! error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::analysis::{analyze, DEFAULT_STRONG_THRESHOLD};
use crate::error::Error;
use crate::filex::FilexParams;
use crate::plot::{render_svg, PlotOptions};
use crate::records::{read_metadata_for, read_records_file, write_sweep};
use crate::stats::shannon_entropy;
use crate::sweep::{
    default_filex_suite, default_toy_els_suite, run_sweep, run_sweep_with_workers, Hyperparameter,
    ParamSet, SweepSpec, Target, DEFAULT_TOY_STEPS,
};
use crate::toy_els::ToyElsParams;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "filex",
    version,
    about = "Fixed-lexicon process and toy emergent-language sweeps"
)]
pub struct Cli {
    /// TOML file providing defaults for the common flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample one run and print its distribution and entropy
    Run(RunArgs),
    /// Execute sweeps and write record files
    Sweep(SweepArgs),
    /// Correlate records and test sign agreement
    Analyze(AnalyzeArgs),
    /// Draw one sweep as an SVG scatter plot
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Filex,
    ToyEls,
}

impl From<TargetArg> for Target {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::Filex => Target::Filex,
            TargetArg::ToyEls => Target::ToyEls,
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_enum, default_value = "filex")]
    pub target: TargetArg,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<u32>,
    #[arg(long)]
    pub lexicon_size: Option<usize>,
    #[arg(long)]
    pub n_iters: Option<u32>,
    #[arg(long)]
    pub time_steps: Option<u64>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub buffer_size: Option<u64>,
    #[arg(long)]
    pub temperature: Option<f64>,
    #[arg(long)]
    pub eval_samples: Option<u64>,
    #[arg(long)]
    pub logit_gain: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Built-in suite to run
    #[arg(long, value_enum, conflicts_with = "spec")]
    pub suite: Option<TargetArg>,
    /// TOML file holding a single sweep spec
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Run only this hyperparameter's sweep from the suite
    #[arg(long)]
    pub param: Option<String>,
    /// Grid points per sweep
    #[arg(long)]
    pub steps: Option<usize>,
    /// Base seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (defaults to all cores)
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Record files (both targets)
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[arg(long)]
    pub strong_threshold: Option<f64>,
    /// Where to write the TOML report
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Record file of a single sweep
    pub file: PathBuf,
    /// Kernel bandwidth in natural-log units of the hyperparameter
    #[arg(long)]
    pub bandwidth: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Keys accepted in `--config` files.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub steps: Option<usize>,
    pub workers: Option<usize>,
    pub bandwidth: Option<f64>,
    pub strong_threshold: Option<f64>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_IO,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Io(_)) {
            EXIT_IO
        } else {
            EXIT_USAGE
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn io_context(path: &Path) -> impl Fn(Error) -> CliError + '_ {
    move |e| {
        let mut err = CliError::from(e);
        err.message = format!("{}: {}", path.display(), err.message);
        err
    }
}

fn build_params(args: &RunArgs) -> Result<ParamSet, Error> {
    match args.target {
        TargetArg::Filex => {
            let d = FilexParams::default();
            Ok(ParamSet::Filex(FilexParams::new(
                args.alpha.unwrap_or(d.alpha()),
                args.beta.unwrap_or(d.beta()),
                args.lexicon_size.unwrap_or(d.lexicon_size()),
                args.n_iters.unwrap_or(d.n_iters()),
            )?))
        }
        TargetArg::ToyEls => {
            let d = ToyElsParams::default();
            Ok(ParamSet::ToyEls(
                ToyElsParams::new(
                    args.time_steps.unwrap_or(d.time_steps()),
                    args.lexicon_size.unwrap_or(d.lexicon_size()),
                    args.learning_rate.unwrap_or(d.learning_rate()),
                    args.buffer_size.unwrap_or(d.buffer_size()),
                    args.temperature.unwrap_or(d.temperature()),
                    args.eval_samples.unwrap_or(d.eval_samples()),
                )?
                .with_logit_gain(args.logit_gain.unwrap_or(d.logit_gain()))?,
            ))
        }
    }
}

fn describe(params: &ParamSet) -> String {
    match params {
        ParamSet::Filex(p) => format!(
            "filex alpha={} beta={} lexicon_size={} n_iters={}",
            p.alpha(),
            p.beta(),
            p.lexicon_size(),
            p.n_iters()
        ),
        ParamSet::ToyEls(p) => format!(
            "toy_els time_steps={} lexicon_size={} learning_rate={} buffer_size={} temperature={} eval_samples={} logit_gain={}",
            p.time_steps(),
            p.lexicon_size(),
            p.learning_rate(),
            p.buffer_size(),
            p.temperature(),
            p.eval_samples(),
            p.logit_gain()
        ),
    }
}

pub fn cmd_run(args: &RunArgs, cfg: &FileConfig, out: &mut dyn Write) -> CliResult<()> {
    let params = build_params(args)?;
    let seed = args.seed.or(cfg.seed).unwrap_or(0);
    let probs = params.simulate(seed)?;
    let line: Vec<String> = probs
        .as_slice()
        .iter()
        .map(|p| format!("{p:.17}"))
        .collect();
    writeln!(out, "# {} seed={seed}", describe(&params))
        .and_then(|_| writeln!(out, "probs {}", line.join(" ")))
        .and_then(|_| writeln!(out, "entropy {:.17}", shannon_entropy(&probs)))
        .map_err(|e| CliError::io(e.to_string()))
}

fn suite_specs(args: &SweepArgs, cfg: &FileConfig) -> CliResult<Vec<SweepSpec>> {
    let seed = args.seed.or(cfg.seed).unwrap_or(0);
    let steps = args.steps.or(cfg.steps);
    let mut specs = match (&args.suite, &args.spec) {
        (Some(TargetArg::Filex), _) => default_filex_suite(seed),
        (Some(TargetArg::ToyEls), _) => default_toy_els_suite(DEFAULT_TOY_STEPS, seed)?,
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
            let spec: SweepSpec = toml::from_str(&text)
                .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            let spec = match args.seed.or(cfg.seed) {
                Some(s) => spec.with_base_seed(s),
                None => spec,
            };
            vec![spec]
        }
        (None, None) => return Err(CliError::usage("sweep needs --suite or --spec")),
    };
    if let Some(name) = &args.param {
        let hp: Hyperparameter = name.parse()?;
        specs.retain(|s| s.swept_param() == hp);
        if specs.is_empty() {
            return Err(CliError::usage(format!(
                "no sweep over `{name}` in this suite"
            )));
        }
    }
    if let Some(steps) = steps {
        specs = specs
            .into_iter()
            .map(|s| s.with_steps(steps))
            .collect::<Result<_, _>>()?;
    }
    Ok(specs)
}

pub fn cmd_sweep(
    args: &SweepArgs,
    cfg: &FileConfig,
    out: &mut dyn Write,
) -> CliResult<Vec<PathBuf>> {
    let specs = suite_specs(args, cfg)?;
    let dir = args
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .ok_or_else(|| CliError::usage("sweep needs --out DIR"))?;
    fs::create_dir_all(&dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?;
    let workers = args.workers.or(cfg.workers);
    if workers == Some(0) {
        return Err(CliError::usage("--workers must be at least 1"));
    }
    let mut written = Vec::new();
    for spec in &specs {
        let outcome = match workers {
            Some(w) => run_sweep_with_workers(spec, w)?,
            None => run_sweep(spec),
        };
        let path = write_sweep(&dir, spec, &outcome).map_err(io_context(&dir))?;
        writeln!(
            out,
            "{}: {} records, {} skipped",
            path.display(),
            outcome.records.len(),
            outcome.skipped.len()
        )
        .map_err(|e| CliError::io(e.to_string()))?;
        written.push(path);
    }
    Ok(written)
}

pub fn cmd_analyze(
    args: &AnalyzeArgs,
    cfg: &FileConfig,
    out: &mut dyn Write,
) -> CliResult<crate::analysis::AnalysisReport> {
    let mut records = Vec::new();
    for path in &args.files {
        records.extend(read_records_file(path).map_err(io_context(path))?);
    }
    let threshold = args
        .strong_threshold
        .or(cfg.strong_threshold)
        .unwrap_or(DEFAULT_STRONG_THRESHOLD);
    let report = analyze(&records, threshold)?;
    out.write_all(report.render_table().as_bytes())
        .map_err(|e| CliError::io(e.to_string()))?;
    if let Some(path) = args.out.as_ref().or(cfg.out.as_ref()) {
        fs::write(path, report.to_toml())
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    }
    Ok(report)
}

pub fn cmd_plot(args: &PlotArgs, cfg: &FileConfig, out: &mut dyn Write) -> CliResult<PathBuf> {
    let records = read_records_file(&args.file).map_err(io_context(&args.file))?;
    if records.is_empty() {
        return Err(CliError::usage(format!(
            "{}: no records to plot",
            args.file.display()
        )));
    }
    let meta = read_metadata_for(&args.file).map_err(io_context(&args.file))?;
    let opts = PlotOptions {
        bandwidth: args.bandwidth.or(cfg.bandwidth),
        max_entropy: None,
    };
    let svg = render_svg(&records, meta.as_ref(), &opts)?;
    let path = args
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| args.file.with_extension("svg"));
    fs::write(&path, svg).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    writeln!(out, "{}", path.display()).map_err(|e| CliError::io(e.to_string()))?;
    Ok(path)
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match &cli.command {
        Command::Run(a) => cmd_run(a, &cfg, out),
        Command::Sweep(a) => cmd_sweep(a, &cfg, out).map(|_| ()),
        Command::Analyze(a) => cmd_analyze(a, &cfg, out).map(|_| ()),
        Command::Plot(a) => cmd_plot(a, &cfg, out).map(|_| ()),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}
