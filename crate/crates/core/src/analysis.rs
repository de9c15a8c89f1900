//! Correlation matrix and sign-match tests.
//!
//! Every `(target, hyperparameter)` group of records gets a Kendall τ-b.
//! Each toy-agent column is then paired with the process hyperparameter it
//! corresponds to, and the number of sign agreements is tested against the
//! coin-flip null with a one-sided binomial test.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{binomial_sign_test, kendall_tau, CorrelationSummary};
use crate::sweep::{Hyperparameter, RunRecord, Target};

pub const DEFAULT_STRONG_THRESHOLD: f64 = 0.2;

/// A column of the correlation table: an agent hyperparameter and the
/// process hyperparameter that plays the same role.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Correspondence {
    pub column: &'static str,
    pub toy: Hyperparameter,
    pub filex: Hyperparameter,
}

/// Buffer size and temperature both map onto β.
pub const CORRESPONDENCES: [Correspondence; 5] = [
    Correspondence {
        column: "Time Steps",
        toy: Hyperparameter::TimeSteps,
        filex: Hyperparameter::NIters,
    },
    Correspondence {
        column: "Lexicon Size",
        toy: Hyperparameter::LexiconSize,
        filex: Hyperparameter::LexiconSize,
    },
    Correspondence {
        column: "Learning Rate",
        toy: Hyperparameter::LearningRate,
        filex: Hyperparameter::Alpha,
    },
    Correspondence {
        column: "Buffer Size",
        toy: Hyperparameter::BufferSize,
        filex: Hyperparameter::Beta,
    },
    Correspondence {
        column: "Temperature",
        toy: Hyperparameter::Temperature,
        filex: Hyperparameter::Beta,
    },
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupCorrelation {
    pub target: Target,
    pub param: Hyperparameter,
    #[serde(flatten)]
    pub summary: CorrelationSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub column: String,
    pub toy_param: Hyperparameter,
    pub filex_param: Hyperparameter,
    pub toy_tau: f64,
    pub filex_tau: f64,
    pub sign_match: bool,
    pub strong_match: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignTest {
    pub matches: u64,
    pub trials: u64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongSignTest {
    pub threshold: f64,
    pub matches: u64,
    pub trials: u64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub sign_test: SignTest,
    pub strong_sign_test: StrongSignTest,
    pub correlation: Vec<GroupCorrelation>,
    pub comparison: Vec<Comparison>,
}

/// Builds the report. Both targets must have records for every column.
pub fn analyze(records: &[RunRecord], strong_threshold: f64) -> Result<AnalysisReport> {
    if !(0.0..=1.0).contains(&strong_threshold) {
        return Err(Error::invalid(format!(
            "strong threshold must lie in [0, 1], got {strong_threshold}"
        )));
    }
    let mut groups: BTreeMap<(Target, Hyperparameter), Vec<(f64, f64)>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.target, r.param))
            .or_default()
            .push((r.value, r.entropy));
    }

    let mut missing = Vec::new();
    for c in &CORRESPONDENCES {
        for key in [(Target::ToyEls, c.toy), (Target::Filex, c.filex)] {
            let label = format!("{}/{}", key.0, key.1);
            if !groups.contains_key(&key) && !missing.contains(&label) {
                missing.push(label);
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingRecords(missing));
    }

    let mut correlation = Vec::with_capacity(groups.len());
    let mut by_key = BTreeMap::new();
    for (&(target, param), points) in &groups {
        let summary = kendall_tau(points)
            .map_err(|e| Error::UndefinedCorrelation(format!("{target}/{param}: {e}")))?;
        by_key.insert((target, param), summary);
        correlation.push(GroupCorrelation {
            target,
            param,
            summary,
        });
    }

    let comparison: Vec<Comparison> = CORRESPONDENCES
        .iter()
        .map(|c| {
            let toy = by_key[&(Target::ToyEls, c.toy)];
            let filex = by_key[&(Target::Filex, c.filex)];
            let sign_match = toy.sign == filex.sign;
            Comparison {
                column: c.column.to_string(),
                toy_param: c.toy,
                filex_param: c.filex,
                toy_tau: toy.tau,
                filex_tau: filex.tau,
                sign_match,
                strong_match: sign_match
                    && toy.tau.abs() >= strong_threshold
                    && filex.tau.abs() >= strong_threshold,
            }
        })
        .collect();

    let trials = comparison.len() as u64;
    let matches = comparison.iter().filter(|c| c.sign_match).count() as u64;
    let strong = comparison.iter().filter(|c| c.strong_match).count() as u64;
    Ok(AnalysisReport {
        sign_test: SignTest {
            matches,
            trials,
            p_value: binomial_sign_test(matches, trials)?,
        },
        strong_sign_test: StrongSignTest {
            threshold: strong_threshold,
            matches: strong,
            trials,
            p_value: binomial_sign_test(strong, trials)?,
        },
        correlation,
        comparison,
    })
}

impl AnalysisReport {
    pub fn summary(&self, target: Target, param: Hyperparameter) -> Option<&CorrelationSummary> {
        self.correlation
            .iter()
            .find(|g| g.target == target && g.param == param)
            .map(|g| &g.summary)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("analysis report: {e}")))
    }

    /// Human-readable correlation table.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let width = 18;
        let _ = write!(out, "{:<10}", "");
        for c in &CORRESPONDENCES {
            let _ = write!(out, "{:>width$}", c.column);
        }
        out.push('\n');
        for (label, target) in [("FiLex", Target::Filex), ("Toy ELS", Target::ToyEls)] {
            let _ = write!(out, "{label:<10}");
            for c in &CORRESPONDENCES {
                let param = if target == Target::Filex {
                    c.filex
                } else {
                    c.toy
                };
                let cell = match self.summary(target, param) {
                    Some(s) => format!("{:+.2} (p={:.0e})", s.tau, s.p_value),
                    None => "-".to_string(),
                };
                let _ = write!(out, "{cell:>width$}");
            }
            out.push('\n');
        }
        let _ = write!(out, "{:<10}", "match");
        for c in &self.comparison {
            let _ = write!(out, "{:>width$}", if c.sign_match { "yes" } else { "NO" });
        }
        out.push('\n');
        let _ = writeln!(
            out,
            "sign matches: {}/{} (one-sided binomial p = {:.6})",
            self.sign_test.matches, self.sign_test.trials, self.sign_test.p_value
        );
        let _ = writeln!(
            out,
            "matches with |tau| >= {}: {}/{} (one-sided binomial p = {:.6})",
            self.strong_sign_test.threshold,
            self.strong_sign_test.matches,
            self.strong_sign_test.trials,
            self.strong_sign_test.p_value
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sweep(target: Target, param: Hyperparameter, slope: f64) -> Vec<RunRecord> {
        (1..=60)
            .map(|i| RunRecord {
                target,
                param,
                value: i as f64,
                seed: i as u64,
                // Mostly monotone with a little wobble so |tau| < 1.
                entropy: slope * i as f64
                    - if i % 7 == 0 {
                        5.0 * slope.signum()
                    } else {
                        0.0
                    },
            })
            .collect()
    }

    fn full(signs: [f64; 5], filex: [f64; 4]) -> Vec<RunRecord> {
        let mut v = Vec::new();
        for (c, s) in CORRESPONDENCES.iter().zip(signs) {
            v.extend(sweep(Target::ToyEls, c.toy, s));
        }
        for (hp, s) in [
            Hyperparameter::NIters,
            Hyperparameter::LexiconSize,
            Hyperparameter::Alpha,
            Hyperparameter::Beta,
        ]
        .into_iter()
        .zip(filex)
        {
            v.extend(sweep(Target::Filex, hp, s));
        }
        v
    }

    #[test]
    fn all_signs_match() {
        let recs = full([-1.0, 1.0, -1.0, 1.0, 1.0], [-1.0, 1.0, -1.0, 1.0]);
        let rep = analyze(&recs, DEFAULT_STRONG_THRESHOLD).unwrap();
        assert_eq!(rep.sign_test.matches, 5);
        assert_eq!(rep.sign_test.trials, 5);
        assert_eq!(rep.sign_test.p_value, 0.03125);
        assert_eq!(rep.strong_sign_test.matches, 5);
        assert_eq!(rep.correlation.len(), 9);
    }

    #[test]
    fn beta_column_is_compared_twice() {
        let recs = full([-1.0, 1.0, -1.0, -1.0, 1.0], [-1.0, 1.0, -1.0, 1.0]);
        let rep = analyze(&recs, DEFAULT_STRONG_THRESHOLD).unwrap();
        assert_eq!(rep.sign_test.matches, 4);
        assert!(!rep.comparison[3].sign_match);
        assert!(rep.comparison[4].sign_match);
        assert_eq!(rep.comparison[3].filex_param, Hyperparameter::Beta);
        assert_eq!(rep.comparison[4].filex_param, Hyperparameter::Beta);
        assert_eq!(rep.sign_test.p_value, 6.0 / 32.0);
    }

    #[test]
    fn weak_correlations_fail_strong_test() {
        let mut recs = full([-1.0, 1.0, -1.0, 1.0, 1.0], [-1.0, 1.0, -1.0, 1.0]);
        // Replace the toy temperature sweep by a nearly flat one.
        recs.retain(|r| !(r.target == Target::ToyEls && r.param == Hyperparameter::Temperature));
        recs.extend((1..=60).map(|i| RunRecord {
            target: Target::ToyEls,
            param: Hyperparameter::Temperature,
            value: i as f64,
            seed: 0,
            entropy: if i % 2 == 0 {
                i as f64
            } else {
                100.0 - i as f64
            },
        }));
        let rep = analyze(&recs, DEFAULT_STRONG_THRESHOLD).unwrap();
        let temp = &rep.comparison[4];
        assert!(temp.toy_tau.abs() < 0.2);
        assert!(!temp.strong_match);
        assert!(rep.strong_sign_test.matches < rep.sign_test.matches || !temp.sign_match);
    }

    #[test]
    fn missing_counterparts_are_listed() {
        let mut recs = full([-1.0, 1.0, -1.0, 1.0, 1.0], [-1.0, 1.0, -1.0, 1.0]);
        recs.retain(|r| r.param != Hyperparameter::Beta && r.param != Hyperparameter::TimeSteps);
        match analyze(&recs, 0.2) {
            Err(Error::MissingRecords(list)) => {
                assert_eq!(
                    list,
                    vec!["toy_els/time_steps".to_string(), "filex/beta".to_string()]
                );
            }
            other => panic!("expected missing records, got {other:?}"),
        }
    }

    #[test]
    fn order_insensitive_and_serializable() {
        let mut recs = full([-1.0, 1.0, -1.0, 1.0, 1.0], [-1.0, 1.0, -1.0, 1.0]);
        let a = analyze(&recs, 0.2).unwrap();
        recs.reverse();
        let b = analyze(&recs, 0.2).unwrap();
        assert_eq!(a, b);
        let back = AnalysisReport::from_toml(&a.to_toml()).unwrap();
        assert_eq!(back, a);
        assert!(a.render_table().contains("sign matches: 5/5"));
    }
}
