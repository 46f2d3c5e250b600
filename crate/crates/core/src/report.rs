//! Machine-readable campaign reports.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub passed: bool,
    pub detail: Value,
}

/// Outcome of one campaign. Checks are kept sorted by id; `runtime_ms` is
/// only filled in on request so that reports stay byte-identical otherwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub campaign: String,
    /// SHA-256 of the canonical JSON of the campaign inputs.
    pub inputs_digest: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

pub fn digest(inputs: &Value) -> String {
    let text = serde_json::to_string(inputs).expect("JSON values serialize");
    hex::encode(Sha256::digest(text.as_bytes()))
}

impl Report {
    pub fn new(campaign: &str, inputs: &Value) -> Self {
        Report {
            campaign: campaign.to_string(),
            inputs_digest: digest(inputs),
            passed: true,
            checks: Vec::new(),
            runtime_ms: None,
        }
    }

    pub fn check(&mut self, id: &str, passed: bool, detail: Value) {
        self.passed &= passed;
        let check = Check { id: id.to_string(), passed, detail };
        let at = self.checks.partition_point(|c| c.id <= check.id);
        self.checks.insert(at, check);
    }

    /// Folds sub-reports into one, prefixing check ids with the campaign
    /// names.
    pub fn merge(campaign: &str, inputs: &Value, parts: Vec<Report>) -> Self {
        let mut out = Report::new(campaign, inputs);
        for part in parts {
            for c in part.checks {
                out.check(&format!("{}.{}", part.campaign, c.id), c.passed, c.detail);
            }
        }
        out
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_human(&self) -> String {
        let width = self.checks.iter().map(|c| c.id.len()).max().unwrap_or(0);
        let mut out = format!("campaign {}  digest {}\n", self.campaign, &self.inputs_digest[..16]);
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "  {mark}  {:width$}  {}", c.id, c.detail);
        }
        let _ = writeln!(out, "{}", if self.passed { "all checks passed" } else { "VIOLATIONS FOUND" });
        if let Some(ms) = self.runtime_ms {
            let _ = writeln!(out, "runtime {ms} ms");
        }
        out
    }
}
