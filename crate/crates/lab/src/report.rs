//! JSON run reports.
//!
//! Reports are fully determined by flags and seeds: identical invocations
//! produce byte-identical JSON. Timing therefore goes to the stderr summary
//! only, never into the report.

use std::collections::BTreeMap;

use serde::Serialize;

/// One named numeric check with its tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Target value when one exists (vanishing checks target 0).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// A check that a value hits a target within tolerance.
    pub fn target(name: impl Into<String>, value: f64, expected: f64, tol: f64) -> Check {
        Check { name: name.into(), value, expected: Some(expected), tolerance: tol, passed: (value - expected).abs() <= tol }
    }

    /// A check that a residual is at most the tolerance.
    pub fn residual(name: impl Into<String>, value: f64, tol: f64) -> Check {
        Check { name: name.into(), value, expected: None, tolerance: tol, passed: value <= tol }
    }

    /// A check that a value is at least the given bound (genericity and
    /// independence witnesses).
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Check {
        Check { name: name.into(), value, expected: Some(bound), tolerance: 0.0, passed: value >= bound }
    }
}

/// Machine-readable outcome of one CLI subcommand.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub subcommand: String,
    /// Flags exactly as resolved (sorted keys for stable serialization).
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl RunReport {
    pub fn new(subcommand: &str) -> RunReport {
        RunReport {
            schema: 1,
            subcommand: subcommand.into(),
            parameters: BTreeMap::new(),
            checks: Vec::new(),
            passed: true,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.parameters.insert(key.into(), value.into());
    }

    pub fn push(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human summary table for stderr.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("== {} ==\n", self.subcommand));
        for c in &self.checks {
            let status = if c.passed { "pass" } else { "FAIL" };
            match c.expected {
                Some(e) => out.push_str(&format!(
                    "  [{status}] {:<44} {:>14.6e} (target {:.6e} ± {:.1e})\n",
                    c.name, c.value, e, c.tolerance
                )),
                None => out.push_str(&format!(
                    "  [{status}] {:<44} {:>14.6e} (≤ {:.1e})\n",
                    c.name, c.value, c.tolerance
                )),
            }
        }
        out.push_str(&format!("  => {}\n", if self.passed { "ALL PASS" } else { "FAILURES" }));
        out
    }
}
