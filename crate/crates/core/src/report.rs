//! Machine-readable reports: named residuals with declared tolerances and an
//! aggregate verdict. Serialization is deterministic (ordered fields, ordered
//! entries, shortest-round-trip floats).

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// One measured quantity. `value <= tolerance` is a pass; quantities that are
/// bounded from below are encoded as defects (threshold - measured, clamped at
/// zero) with tolerance 0.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualEntry {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
}

impl ResidualEntry {
    pub fn new(name: impl Into<String>, value: f64, tolerance: f64) -> ResidualEntry {
        ResidualEntry {
            name: name.into(),
            value,
            tolerance,
        }
    }

    /// Entry for a quantity that must stay at or above `threshold`.
    pub fn lower_bound(name: impl Into<String>, measured: f64, threshold: f64) -> ResidualEntry {
        ResidualEntry {
            name: name.into(),
            value: (threshold - measured).max(0.0),
            tolerance: 0.0,
        }
    }

    pub fn pass(&self) -> bool {
        self.value.is_finite() && self.value <= self.tolerance
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub inputs: serde_json::Value,
    pub outputs: serde_json::Value,
    pub residuals: Vec<ResidualEntry>,
    pub verdict: String,
}

impl Report {
    pub fn new(
        command: impl Into<String>,
        inputs: serde_json::Value,
        outputs: serde_json::Value,
        residuals: Vec<ResidualEntry>,
    ) -> Report {
        let verdict = if residuals.iter().all(ResidualEntry::pass) {
            "pass"
        } else {
            "fail"
        };
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            inputs,
            outputs,
            residuals,
            verdict: verdict.to_string(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// Aligned human-readable table of the residuals.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let width = self
            .residuals
            .iter()
            .map(|r| r.name.len())
            .max()
            .unwrap_or(4)
            .max(4);
        out.push_str(&format!(
            "{:<width$}  {:>13}  {:>10}  status\n",
            "name", "value", "tolerance"
        ));
        for r in &self.residuals {
            out.push_str(&format!(
                "{:<width$}  {:>13.6e}  {:>10.1e}  {}\n",
                r.name,
                r.value,
                r.tolerance,
                if r.pass() { "ok" } else { "FAIL" }
            ));
        }
        out.push_str(&format!("verdict: {}\n", self.verdict));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_tolerances() {
        let r = Report::new(
            "t",
            serde_json::json!({}),
            serde_json::json!({}),
            vec![
                ResidualEntry::new("a", 1e-12, 1e-10),
                ResidualEntry::lower_bound("b", 2.0, 1e-6),
            ],
        );
        assert!(r.passed());
        let r = Report::new(
            "t",
            serde_json::json!({}),
            serde_json::json!({}),
            vec![ResidualEntry::new("a", 1e-9, 1e-10)],
        );
        assert!(!r.passed());
    }

    #[test]
    fn serialization_is_deterministic() {
        let mk = || {
            Report::new(
                "t",
                serde_json::json!({"x": 0.1}),
                serde_json::json!({"y": [1.0, 2.0]}),
                vec![ResidualEntry::new("a", 1.0 / 3.0, 1e-10)],
            )
        };
        assert_eq!(mk().to_json(), mk().to_json());
    }
}
