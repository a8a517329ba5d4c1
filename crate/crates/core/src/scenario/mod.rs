//! Scenario files, check runner and reports.
//!
//! A scenario names domains, deformations and mappings, then lists checks to
//! run against them. Every check reports measured values, the bound it is held
//! to, and witnesses for failures.

mod checks;
mod report;
mod run;

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::ledger::{LedgerInputs, LemmaId};
use crate::mapping::PlaneMap;
use crate::metric_core::{LengthGraphImport, Point, ShapeSpec};

pub use report::{emit_report, CheckResult, CheckStatus, Comparison, Relation, Report, ReportFormat, Witness};
pub use run::{run_scenario, RunOptions};

pub const SCHEMA_VERSION: u32 = 1;

/// Default sample sizes, recorded in every report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleDefaults {
    pub pairs: usize,
    pub balls: usize,
    pub quadruples: usize,
}

pub const DEFAULTS: SampleDefaults = SampleDefaults {
    pairs: 10_000,
    balls: 1_000,
    quadruples: 1_000,
};

fn default_pairs() -> usize {
    DEFAULTS.pairs
}
fn default_balls() -> usize {
    DEFAULTS.balls
}
fn default_quadruples() -> usize {
    DEFAULTS.quadruples
}
fn default_pool() -> usize {
    60
}
fn default_triples() -> usize {
    10_000
}
fn default_tuples() -> usize {
    100_000
}
fn default_centers() -> usize {
    100
}
fn default_epsilon() -> f64 {
    0.2
}
fn default_rel_tol() -> f64 {
    0.02
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    pub seed: u64,
    #[serde(default)]
    pub domains: Vec<DomainEntry>,
    #[serde(default)]
    pub deformations: Vec<DeformationEntry>,
    #[serde(default)]
    pub mappings: Vec<MappingEntry>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// A named shape (`kind` one of the built-in shapes) or a raw length graph
/// (`kind: "graph"`, `params` a graph import).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainEntry {
    pub name: String,
    pub kind: String,
    #[serde(default)]
    pub params: Value,
    #[serde(default)]
    pub resolution: Option<f64>,
    #[serde(default)]
    pub band: Option<f64>,
    /// Declared quasiconvexity constant (default 1 for planar shapes).
    #[serde(default)]
    pub quasiconvexity: Option<f64>,
}

#[derive(Debug, Clone)]
pub(crate) enum DomainSource {
    Shape(ShapeSpec),
    Graph(LengthGraphImport),
}

impl DomainEntry {
    pub(crate) fn source(&self, resolution_override: Option<f64>) -> Result<DomainSource> {
        let ctx = |e: serde_json::Error| Error::config(format!("domain {}: {e}", self.name));
        if self.kind == "graph" {
            let g: LengthGraphImport = serde_json::from_value(self.params.clone()).map_err(ctx)?;
            return Ok(DomainSource::Graph(g));
        }
        let resolution = resolution_override
            .or(self.resolution)
            .ok_or_else(|| Error::config(format!("domain {}: missing field `resolution`", self.name)))?;
        let mut obj = serde_json::json!({
            "kind": self.kind,
            "params": self.params,
            "resolution": resolution,
        });
        if let Some(b) = self.band {
            obj["band"] = b.into();
        }
        let spec: ShapeSpec = serde_json::from_value(obj).map_err(ctx)?;
        spec.validate()
            .map_err(|e| Error::config(format!("domain {}: {e}", self.name)))?;
        Ok(DomainSource::Shape(spec))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasePoint {
    /// Planar point; the nearest vertex (bhk) or boundary sample (sphericalization) is used.
    At(Point),
    /// `"deepest"`: the vertex farthest from the boundary.
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeformationKind {
    Bhk,
    Sphericalization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformationEntry {
    pub name: String,
    pub domain: String,
    pub kind: DeformationKind,
    pub base_point: BasePoint,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

/// Either a built-in map sampled on `source` with image shape `target`, or the
/// identity from a domain onto one of its deformations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingEntry {
    pub name: String,
    #[serde(default)]
    pub source: Option<String>,
    #[serde(default)]
    pub map: Option<PlaneMap>,
    #[serde(default)]
    pub target: Option<Value>,
    #[serde(default)]
    pub deformation: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Multiplier on every predicted bound.
    pub slack: f64,
    /// Divisor of the containment radius; values below 1 enlarge the ball.
    pub containment_slack: f64,
    /// Absolute tolerance for metric axioms and the base-point identity.
    pub exact: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            slack: 1.05,
            containment_slack: 1.0,
            exact: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    /// Symmetry, identity and triangle inequality of every metric on a space.
    MetricAxioms {
        space: String,
        #[serde(default = "default_triples")]
        triples: usize,
        #[serde(default = "default_pool")]
        pool: usize,
    },
    /// `k(from, to)` against a known value.
    QhCalibration {
        domain: String,
        from: Point,
        to: Point,
        expected: f64,
        #[serde(default = "default_rel_tol")]
        tolerance: f64,
    },
    LemmaB {
        domain: String,
        #[serde(default = "default_pairs")]
        pairs: usize,
    },
    BallContainment {
        domain: String,
        #[serde(default = "default_centers")]
        centers: usize,
    },
    BasepointIdentity {
        space: String,
        #[serde(default = "default_tuples")]
        tuples: usize,
        #[serde(default = "default_pool")]
        pool: usize,
    },
    Hyperbolicity {
        domain: String,
        #[serde(default = "default_pool")]
        pool: usize,
        #[serde(default = "default_quadruples")]
        quadruples: usize,
    },
    Uniformity {
        domain: String,
        #[serde(default = "default_balls")]
        pairs: usize,
    },
    BhkDiameter {
        deformation: String,
    },
    BhkComparability {
        deformation: String,
        #[serde(default = "default_comparability_pool")]
        pool: usize,
    },
    BasepointChange {
        deformations: [String; 2],
        #[serde(default = "default_pool")]
        pool: usize,
        #[serde(default = "default_quadruples")]
        quadruples: usize,
    },
    Sphericalization {
        deformation: String,
        #[serde(default = "default_pool")]
        pool: usize,
        #[serde(default = "default_quadruples")]
        quadruples: usize,
        #[serde(default = "default_balls")]
        pairs: usize,
    },
    Theorem1Chain {
        mapping: String,
        lambda: f64,
        #[serde(default = "default_balls")]
        balls: usize,
        #[serde(default = "default_pairs")]
        pairs: usize,
    },
    Theorem2Chain {
        mapping: String,
        t0: f64,
        #[serde(default = "default_balls")]
        balls: usize,
        #[serde(default = "default_pairs")]
        pairs: usize,
    },
    StepBound {
        mapping: String,
        q: f64,
        #[serde(default = "default_balls")]
        balls: usize,
        #[serde(default = "default_balls")]
        pairs: usize,
    },
    Quasimobius {
        mapping: String,
        #[serde(default = "default_pool")]
        pool: usize,
        #[serde(default = "default_quadruples")]
        quadruples: usize,
        /// Bound on the slope, compared without slack.
        #[serde(default)]
        max_slope: Option<f64>,
    },
    GlobalQs {
        mapping: String,
        #[serde(default = "default_balls")]
        pairs: usize,
    },
    MappingReport {
        mapping: String,
        lambda: f64,
        t0: f64,
        q: f64,
        #[serde(default = "default_balls")]
        balls: usize,
        #[serde(default = "default_pairs")]
        pairs: usize,
        #[serde(default = "default_pool")]
        pool: usize,
        #[serde(default = "default_quadruples")]
        quadruples: usize,
        /// Require every estimator to return its neutral value exactly.
        #[serde(default)]
        neutral: bool,
    },
    Ledger {
        lemma: LemmaId,
        inputs: LedgerInputs,
    },
}

fn default_comparability_pool() -> usize {
    46
}

impl CheckSpec {
    pub fn id(&self) -> &'static str {
        match self {
            CheckSpec::MetricAxioms { .. } => "metric_axioms",
            CheckSpec::QhCalibration { .. } => "qh_calibration",
            CheckSpec::LemmaB { .. } => "lemma_b",
            CheckSpec::BallContainment { .. } => "ball_containment",
            CheckSpec::BasepointIdentity { .. } => "basepoint_identity",
            CheckSpec::Hyperbolicity { .. } => "hyperbolicity",
            CheckSpec::Uniformity { .. } => "uniformity",
            CheckSpec::BhkDiameter { .. } => "bhk_diameter",
            CheckSpec::BhkComparability { .. } => "bhk_comparability",
            CheckSpec::BasepointChange { .. } => "basepoint_change",
            CheckSpec::Sphericalization { .. } => "sphericalization",
            CheckSpec::Theorem1Chain { .. } => "theorem1_chain",
            CheckSpec::Theorem2Chain { .. } => "theorem2_chain",
            CheckSpec::StepBound { .. } => "step_bound",
            CheckSpec::Quasimobius { .. } => "quasimobius",
            CheckSpec::GlobalQs { .. } => "global_qs",
            CheckSpec::MappingReport { .. } => "mapping_report",
            CheckSpec::Ledger { .. } => "ledger",
        }
    }

    /// The space, deformation or mapping the check reads.
    pub fn subject(&self) -> String {
        match self {
            CheckSpec::MetricAxioms { space, .. } | CheckSpec::BasepointIdentity { space, .. } => space.clone(),
            CheckSpec::QhCalibration { domain, .. }
            | CheckSpec::LemmaB { domain, .. }
            | CheckSpec::BallContainment { domain, .. }
            | CheckSpec::Hyperbolicity { domain, .. }
            | CheckSpec::Uniformity { domain, .. } => domain.clone(),
            CheckSpec::BhkDiameter { deformation } => deformation.clone(),
            CheckSpec::BhkComparability { deformation, .. } | CheckSpec::Sphericalization { deformation, .. } => {
                deformation.clone()
            }
            CheckSpec::BasepointChange { deformations, .. } => deformations.join(","),
            CheckSpec::Theorem1Chain { mapping, .. }
            | CheckSpec::Theorem2Chain { mapping, .. }
            | CheckSpec::StepBound { mapping, .. }
            | CheckSpec::Quasimobius { mapping, .. }
            | CheckSpec::GlobalQs { mapping, .. }
            | CheckSpec::MappingReport { mapping, .. } => mapping.clone(),
            CheckSpec::Ledger { lemma, .. } => serde_json::to_value(lemma)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default(),
        }
    }
}

fn unit_open(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::config(format!("{field} must lie in (0, 1), got {v}")))
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| Error::config(format!("scenario: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read scenario {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Check names resolve and parameters lie in range.
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::config(format!(
                "schema: unsupported version {}, expected {SCHEMA_VERSION}",
                self.schema
            )));
        }
        let mut names = BTreeSet::new();
        let mut unique = |n: &str| {
            if names.insert(n.to_string()) {
                Ok(())
            } else {
                Err(Error::config(format!("name {n} is used twice")))
            }
        };
        let domains: BTreeSet<&str> = self.domains.iter().map(|d| d.name.as_str()).collect();
        for d in &self.domains {
            unique(&d.name)?;
            d.source(Some(d.resolution.unwrap_or(1.0)))?;
            if let Some(c) = d.quasiconvexity {
                if !(c >= 1.0) {
                    return Err(Error::config(format!("domain {}: quasiconvexity must be >= 1", d.name)));
                }
            }
        }
        let need_domain = |n: &str, who: &str| {
            if domains.contains(n) {
                Ok(())
            } else {
                Err(Error::config(format!("{who}: unknown domain {n}")))
            }
        };
        let deformations: BTreeSet<&str> = self.deformations.iter().map(|d| d.name.as_str()).collect();
        for d in &self.deformations {
            unique(&d.name)?;
            need_domain(&d.domain, &format!("deformation {}", d.name))?;
            if d.kind == DeformationKind::Bhk {
                unit_open(&format!("deformation {}: epsilon", d.name), d.epsilon)?;
            }
            if let BasePoint::Named(n) = &d.base_point {
                if n != "deepest" {
                    return Err(Error::config(format!("deformation {}: unknown base_point {n}", d.name)));
                }
            }
        }
        let need_deformation = |n: &str, who: &str| {
            if deformations.contains(n) {
                Ok(())
            } else {
                Err(Error::config(format!("{who}: unknown deformation {n}")))
            }
        };
        let mappings: BTreeSet<&str> = self.mappings.iter().map(|m| m.name.as_str()).collect();
        for m in &self.mappings {
            unique(&m.name)?;
            let who = format!("mapping {}", m.name);
            match (&m.source, &m.map, &m.target, &m.deformation) {
                (Some(s), Some(f), Some(_), None) => {
                    need_domain(s, &who)?;
                    f.validate().map_err(|e| Error::config(format!("{who}: {e}")))?;
                }
                (None, None, None, Some(d)) => need_deformation(d, &who)?,
                _ => {
                    return Err(Error::config(format!(
                        "{who}: give either source, map and target, or deformation"
                    )))
                }
            }
        }
        let need_mapping = |n: &str, who: &str| {
            if mappings.contains(n) {
                Ok(())
            } else {
                Err(Error::config(format!("{who}: unknown mapping {n}")))
            }
        };
        let need_space = |n: &str, who: &str| {
            if domains.contains(n) || deformations.contains(n) {
                Ok(())
            } else {
                Err(Error::config(format!("{who}: unknown space {n}")))
            }
        };
        for (i, c) in self.checks.iter().enumerate() {
            let who = format!("checks[{i}] ({})", c.id());
            match c {
                CheckSpec::MetricAxioms { space, .. } | CheckSpec::BasepointIdentity { space, .. } => {
                    need_space(space, &who)?
                }
                CheckSpec::QhCalibration { domain, tolerance, .. } => {
                    need_domain(domain, &who)?;
                    if !(*tolerance > 0.0) {
                        return Err(Error::config(format!("{who}: tolerance must be positive")));
                    }
                }
                CheckSpec::LemmaB { domain, .. }
                | CheckSpec::BallContainment { domain, .. }
                | CheckSpec::Hyperbolicity { domain, .. }
                | CheckSpec::Uniformity { domain, .. } => need_domain(domain, &who)?,
                CheckSpec::BhkDiameter { deformation }
                | CheckSpec::BhkComparability { deformation, .. }
                | CheckSpec::Sphericalization { deformation, .. } => need_deformation(deformation, &who)?,
                CheckSpec::BasepointChange { deformations, .. } => {
                    for d in deformations {
                        need_deformation(d, &who)?;
                    }
                }
                CheckSpec::Theorem1Chain { mapping, lambda, .. } => {
                    need_mapping(mapping, &who)?;
                    unit_open(&format!("{who}: lambda"), *lambda)?;
                }
                CheckSpec::Theorem2Chain { mapping, t0, .. } => {
                    need_mapping(mapping, &who)?;
                    if !(*t0 > 0.0 && *t0 <= 1.0) {
                        return Err(Error::config(format!("{who}: t0 must lie in (0, 1], got {t0}")));
                    }
                }
                CheckSpec::StepBound { mapping, q, .. } => {
                    need_mapping(mapping, &who)?;
                    unit_open(&format!("{who}: q"), *q)?;
                }
                CheckSpec::Quasimobius { mapping, pool, .. } => {
                    need_mapping(mapping, &who)?;
                    if *pool < 4 {
                        return Err(Error::config(format!("{who}: pool must hold at least 4 points")));
                    }
                }
                CheckSpec::GlobalQs { mapping, .. } => need_mapping(mapping, &who)?,
                CheckSpec::MappingReport { mapping, lambda, t0, q, pool, .. } => {
                    need_mapping(mapping, &who)?;
                    unit_open(&format!("{who}: lambda"), *lambda)?;
                    unit_open(&format!("{who}: q"), *q)?;
                    if !(*t0 > 0.0 && *t0 <= 1.0) {
                        return Err(Error::config(format!("{who}: t0 must lie in (0, 1], got {t0}")));
                    }
                    if *pool < 4 {
                        return Err(Error::config(format!("{who}: pool must hold at least 4 points")));
                    }
                }
                CheckSpec::Ledger { lemma, inputs } => {
                    crate::ledger::predicted_constants(*lemma, *inputs)
                        .map_err(|e| Error::config(format!("{who}: {e}")))?;
                }
            }
        }
        let t = &self.tolerances;
        if !(t.slack > 0.0 && t.containment_slack > 0.0 && t.exact >= 0.0) {
            return Err(Error::config("tolerances: slack factors must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(checks: &str) -> String {
        format!(
            r#"{{"schema":1,"seed":1,
            "domains":[{{"name":"disk","kind":"disk","params":{{"radius":1.0}},"resolution":0.1}}],
            "checks":[{checks}]}}"#
        )
    }

    #[test]
    fn parses_minimal() {
        let s = Scenario::from_json(&minimal(r#"{"id":"lemma_b","domain":"disk","pairs":10}"#)).unwrap();
        assert_eq!(s.checks.len(), 1);
        assert_eq!(s.tolerances, Tolerances::default());
    }

    #[test]
    fn unknown_domain_is_config_error() {
        let e = Scenario::from_json(&minimal(r#"{"id":"lemma_b","domain":"square"}"#)).unwrap_err();
        assert!(e.is_config());
        assert!(e.to_string().contains("square"));
    }

    #[test]
    fn lambda_out_of_range_names_field() {
        let text = r#"{"schema":1,"seed":1,
            "domains":[{"name":"disk","kind":"disk","params":{"radius":1.0},"resolution":0.1}],
            "mappings":[{"name":"id","source":"disk","map":{"id":"identity"},
                         "target":{"kind":"disk","params":{"radius":1.0}}}],
            "checks":[{"id":"theorem1_chain","mapping":"id","lambda":1.5}]}"#;
        let e = Scenario::from_json(text).unwrap_err();
        assert!(e.to_string().contains("lambda"), "{e}");
    }

    #[test]
    fn unknown_field_rejected() {
        let e = Scenario::from_json(&minimal(r#"{"id":"lemma_b","domain":"disk","pears":10}"#)).unwrap_err();
        assert!(e.to_string().contains("pears"), "{e}");
    }

    #[test]
    fn wrong_schema_rejected() {
        let e = Scenario::from_json(r#"{"schema":2,"seed":1}"#).unwrap_err();
        assert!(e.to_string().contains("schema"));
    }
}
