//! Check verdicts, residual bookkeeping and report rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::sampling::SampleSet;

/// Default tolerance on normalized residuals.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    HypothesisNotMet,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::HypothesisNotMet => "hypothesis-not-met",
        }
    }
}

/// One named residual inside a check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakdown {
    pub name: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub verdict: Verdict,
    pub max_residual: f64,
    pub tolerance: f64,
    pub points: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub breakdown: Vec<Breakdown>,
}

impl CheckReport {
    /// Pass iff every residual is within `tolerance`.
    pub fn from_residuals(check: &str, tolerance: f64, samples: &SampleSet, residuals: Vec<(String, f64)>) -> CheckReport {
        let max_residual = residuals.iter().fold(0.0f64, |m, (_, r)| worst(m, *r));
        CheckReport {
            check: check.to_string(),
            verdict: if max_residual <= tolerance {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            max_residual,
            tolerance,
            points: samples.len(),
            seed: samples.seed,
            breakdown: to_breakdown(residuals),
        }
    }

    /// The check's hypotheses failed; `residuals` are the hypothesis residuals.
    pub fn hypothesis_not_met(
        check: &str,
        tolerance: f64,
        samples: &SampleSet,
        residuals: Vec<(String, f64)>,
    ) -> CheckReport {
        let max_residual = residuals.iter().fold(0.0f64, |m, (_, r)| worst(m, *r));
        CheckReport {
            check: check.to_string(),
            verdict: Verdict::HypothesisNotMet,
            max_residual,
            tolerance,
            points: samples.len(),
            seed: samples.seed,
            breakdown: to_breakdown(residuals),
        }
    }

    /// Verdict-agreement check: passes iff all booleans agree. The residual
    /// is 0 on agreement and 1 otherwise; the breakdown lists the residual
    /// behind each boolean.
    pub fn agreement(check: &str, tolerance: f64, samples: &SampleSet, verdicts: Vec<(String, bool, f64)>) -> CheckReport {
        let agree = verdicts.windows(2).all(|w| w[0].1 == w[1].1);
        let max_residual = if agree { 0.0 } else { 1.0 };
        CheckReport {
            check: check.to_string(),
            verdict: if agree { Verdict::Pass } else { Verdict::Fail },
            max_residual,
            tolerance,
            points: samples.len(),
            seed: samples.seed,
            breakdown: verdicts
                .into_iter()
                .map(|(name, holds, residual)| Breakdown {
                    name: format!("{name} [{}]", if holds { "holds" } else { "fails" }),
                    residual,
                })
                .collect(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn residual_of(&self, name: &str) -> Option<f64> {
        self.breakdown
            .iter()
            .find(|b| b.name == name || b.name.starts_with(&format!("{name} [")))
            .map(|b| b.residual)
    }
}

fn to_breakdown(residuals: Vec<(String, f64)>) -> Vec<Breakdown> {
    residuals
        .into_iter()
        .map(|(name, residual)| Breakdown { name, residual })
        .collect()
}

/// Maximum that treats NaN as the worst possible value.
pub fn worst(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::INFINITY
    } else {
        a.max(b)
    }
}

/// Running maximum of residuals.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Residual(f64);

impl Residual {
    pub fn new() -> Residual {
        Residual(0.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn record(&mut self, r: f64) {
        self.0 = worst(self.0, r);
    }

    /// Difference of two component arrays, normalized by
    /// `max(1, largest |component| involved)`.
    pub fn compare(&mut self, a: &[f64], b: &[f64]) {
        debug_assert_eq!(a.len(), b.len());
        let mut diff = 0.0f64;
        let mut scale = 1.0f64;
        for (x, y) in a.iter().zip(b) {
            diff = worst(diff, (x - y).abs());
            scale = scale.max(x.abs()).max(y.abs());
        }
        self.record(diff / scale);
    }

    /// Absolute size of a quantity that should vanish.
    pub fn zero(&mut self, a: &[f64]) {
        for x in a {
            self.record(x.abs());
        }
    }
}

/// JSON array of reports, pretty-printed.
pub fn to_json(reports: &[CheckReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

/// Markdown table of reports.
pub fn to_markdown(reports: &[CheckReport]) -> String {
    let mut out = String::from("| check | verdict | max residual | tolerance | points | seed |\n|---|---|---|---|---|---|\n");
    for r in reports {
        let _ = writeln!(
            out,
            "| {} | {} | {:.3e} | {:.1e} | {} | {} |",
            r.check,
            r.verdict.as_str(),
            r.max_residual,
            r.tolerance,
            r.points,
            r.seed
        );
    }
    for r in reports.iter().filter(|r| !r.breakdown.is_empty()) {
        let _ = writeln!(out, "\n**{}**\n", r.check);
        for b in &r.breakdown {
            let _ = writeln!(out, "- {}: {:.3e}", b.name, b.residual);
        }
    }
    out
}
