use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::{SampleDefaults, Scenario, Tolerances};
use crate::error::{Error, Result};
use crate::metric_core::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// measured <= predicted
    #[serde(rename = "<=")]
    AtMost,
    /// measured >= predicted
    #[serde(rename = ">=")]
    AtLeast,
    /// measured is finite
    #[serde(rename = "finite")]
    Finite,
    /// measured is zero (a violation count)
    #[serde(rename = "zero")]
    Zero,
}

/// One measured constant held against its predicted bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub name: String,
    pub measured: f64,
    pub predicted: Option<f64>,
    pub relation: Relation,
    pub pass: bool,
}

impl Comparison {
    pub fn at_most(name: &str, measured: f64, predicted: f64) -> Self {
        Self::new(name, measured, Some(predicted), Relation::AtMost, measured <= predicted)
    }

    pub fn at_least(name: &str, measured: f64, predicted: f64) -> Self {
        Self::new(name, measured, Some(predicted), Relation::AtLeast, measured >= predicted)
    }

    pub fn finite(name: &str, measured: f64) -> Self {
        Self::new(name, measured, None, Relation::Finite, measured.is_finite())
    }

    pub fn zero(name: &str, count: usize) -> Self {
        Self::new(name, count as f64, Some(0.0), Relation::Zero, count == 0)
    }

    fn new(name: &str, measured: f64, predicted: Option<f64>, relation: Relation, pass: bool) -> Self {
        Comparison {
            name: name.to_string(),
            measured,
            predicted,
            relation,
            pass,
        }
    }
}

/// A point tuple exhibiting a violation (or the extremal sample of a failed bound).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub label: String,
    pub vertices: Vec<usize>,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub index: usize,
    pub id: String,
    pub subject: String,
    pub status: CheckStatus,
    pub comparisons: Vec<Comparison>,
    /// Extra measured values that are not compared against a bound.
    pub measured: BTreeMap<String, f64>,
    pub samples: BTreeMap<String, usize>,
    pub skipped_degenerate: usize,
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    pub fn comparison(&self, name: &str) -> Option<&Comparison> {
        self.comparisons.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub scenario: Scenario,
    pub seed: u64,
    pub resolutions: BTreeMap<String, f64>,
    pub tolerances: Tolerances,
    pub sample_defaults: SampleDefaults,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

impl Report {
    /// Process exit status for this report: 0 when every check passed, else 1.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// One row per (check, compared constant).
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["check_index", "check_id", "subject", "constant", "measured", "predicted", "relation", "pass"])?;
        for c in &self.checks {
            for cmp in &c.comparisons {
                let relation = serde_json::to_value(cmp.relation)?;
                w.write_record([
                    c.index.to_string(),
                    c.id.clone(),
                    c.subject.clone(),
                    cmp.name.clone(),
                    format!("{:?}", cmp.measured),
                    cmp.predicted.map(|p| format!("{p:?}")).unwrap_or_default(),
                    relation.as_str().unwrap_or_default().to_string(),
                    cmp.pass.to_string(),
                ])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::config(format!("format must be json or csv, got {other}"))),
        }
    }
}

pub fn emit_report(report: &Report, format: ReportFormat, path: &Path) -> Result<()> {
    let body = match format {
        ReportFormat::Json => report.to_json()?,
        ReportFormat::Csv => report.to_csv()?,
    };
    let mut f = std::fs::File::create(path)?;
    f.write_all(body.as_bytes())?;
    Ok(())
}
