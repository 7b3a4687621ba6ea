//! Versioned JSON report.

use serde::{Deserialize, Serialize};

use crate::calibration::CalibrationResult;
use crate::cost::CostCurve;
use crate::curve::{auucc, Curve, GainReport, Rule};
use crate::inference::TestResult;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool_version: String,
    pub inputs: Vec<InputDigest>,
    pub seed: Option<u64>,
}

impl Default for Metadata {
    fn default() -> Self {
        Metadata {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: Vec::new(),
            seed: None,
        }
    }
}

/// A curve with its area under both rules. Areas are absent when the curve
/// has a miss floor and the full area diverges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSummary {
    pub name: String,
    pub curve: Curve,
    pub auucc_rect: Option<f64>,
    pub auucc_trap: Option<f64>,
}

impl CurveSummary {
    pub fn new(name: impl Into<String>, curve: Curve) -> Self {
        CurveSummary {
            name: name.into(),
            auucc_rect: auucc(&curve, Rule::Rectangular).ok(),
            auucc_trap: auucc(&curve, Rule::Trapezoidal).ok(),
            curve,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub metadata: Metadata,
    pub curves: Vec<CurveSummary>,
    pub gain: Option<GainReport>,
    pub test: Option<TestResult>,
    pub calibration: Option<CalibrationResult>,
    pub cost: Option<CostCurve>,
}

impl Report {
    pub fn new(metadata: Metadata) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            metadata,
            curves: Vec::new(),
            gain: None,
            test: None,
            calibration: None,
            cost: None,
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}
