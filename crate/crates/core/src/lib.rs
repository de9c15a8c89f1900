//! Simulation and analysis lab for FiLex, a fixed-lexicon variant of the
//! Chinese restaurant process, and for a softmax self-reinforcement agent
//! that plays the role of an emergent-language system.
//!
//! The crate samples both processes, sweeps one hyperparameter at a time on
//! a logarithmic grid, and checks whether the hyperparameter–entropy rank
//! correlations of the two agree in sign.
//!
//! - [`filex`]: the stochastic process itself.
//! - [`toy_els`]: the Gumbel-Softmax agent.
//! - [`stats`]: entropy, Kendall τ-b, binomial sign test, kernel smoothing.
//! - [`sweep`]: grids, seeds and parallel sweep execution.
//! - [`records`], [`analysis`], [`plot`]: file formats, correlation report, SVG charts.
//! - [`cli`]: the `filex` command-line tool.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod filex;
pub mod plot;
pub mod prob;
pub mod records;
pub mod rng;
pub mod stats;
pub mod sweep;
pub mod toy_els;

pub use error::{Error, Result};
pub use filex::{FilexParams, MultinomialDraw, WeightState};
pub use prob::ProbVector;
pub use stats::{CorrelationSummary, Sign, TrendCurve};
pub use sweep::{Hyperparameter, ParamSet, RunRecord, SweepSpec, Target};
pub use toy_els::{ToyElsParams, ToyElsState};
