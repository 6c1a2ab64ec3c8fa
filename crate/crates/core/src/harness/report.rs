//! `report.json` layout.

use serde::Serialize;
use serde_json::Value as Json;

use super::config::ResolvedConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Less,
    Greater,
    Between,
    Equal,
}

/// One pass/fail assertion with the threshold it was held to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub comparison: Comparison,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    pub passed: bool,
}

impl Check {
    pub fn less(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            comparison: Comparison::Less,
            threshold,
            upper: None,
            passed: value < threshold,
        }
    }

    pub fn greater(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            comparison: Comparison::Greater,
            threshold,
            upper: None,
            passed: value > threshold,
        }
    }

    /// `value == 0` exactly.
    pub fn exact(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            comparison: Comparison::Equal,
            threshold: 0.0,
            upper: None,
            passed: value == 0.0,
        }
    }

    /// `lo <= value <= hi`.
    pub fn between(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            value,
            comparison: Comparison::Between,
            threshold: lo,
            upper: Some(hi),
            passed: value >= lo && value <= hi,
        }
    }
}

/// Wall-clock data; everything outside this block is deterministic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunInfo {
    pub timestamp_unix: u64,
    pub elapsed_secs: f64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub experiment: String,
    pub claim: String,
    pub config: ResolvedConfig,
    pub checks: Vec<Check>,
    pub results: Json,
    pub artifacts: Vec<String>,
    pub passed: bool,
    pub run: RunInfo,
}

impl Report {
    /// Deterministic checks and timing checks together.
    pub fn all_passed(&self) -> bool {
        self.passed && self.run.passed
    }

    /// The report with the `run` block removed, for reproducibility
    /// comparisons.
    pub fn deterministic_json(&self) -> Json {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Json::Object(m) = &mut v {
            m.remove("run");
        }
        v
    }
}
