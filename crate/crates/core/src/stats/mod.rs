//! Entropy, rank correlation, sign tests and kernel trend smoothing.

mod binomial;
mod entropy;
mod kendall;
mod smooth;

pub use binomial::binomial_sign_test;
pub use entropy::shannon_entropy;
pub use kendall::{kendall_tau, kendall_tau_b, CorrelationSummary, Sign, PERMUTATION_COUNT};
pub use smooth::{default_bandwidth, gaussian_smooth, TrendCurve, DEFAULT_GRID_SIZE};
