use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use log::info;

use super::checks::{run_check, Outcome};
use super::report::{CheckResult, CheckStatus, Report};
use super::{BasePoint, DeformationKind, DomainSource, Scenario, DEFAULTS, SCHEMA_VERSION};
use crate::deformations::{nearest_boundary_sample, DeformedSpace};
use crate::error::{Error, Result};
use crate::mapping::{builtin_mapping, MappingPair};
use crate::metric_core::{build_grid_domain, DomainSample, ShapeSpec};
use crate::quasihyperbolic::QuasihyperbolicMetric;
use crate::sampling::rng;

/// Command-line overrides applied on top of the scenario file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub resolution_override: Option<f64>,
    /// Record wall-clock times in the report (breaks byte-identical output).
    pub timings: bool,
}

pub(crate) struct Space {
    pub k: Arc<QuasihyperbolicMetric>,
}

impl Space {
    pub fn domain(&self) -> &Arc<DomainSample> {
        self.k.base()
    }
}

pub(crate) struct Deformed {
    pub domain: String,
    pub space: Arc<DeformedSpace>,
}

pub(crate) struct Context {
    pub domains: BTreeMap<String, Space>,
    pub deformations: BTreeMap<String, Deformed>,
    pub mappings: BTreeMap<String, MappingPair>,
    pub tolerances: super::Tolerances,
}

fn build_domain(entry: &super::DomainEntry, h: Option<f64>) -> Result<Space> {
    let d = match entry.source(h)? {
        DomainSource::Shape(spec) => build_grid_domain(&spec)?,
        DomainSource::Graph(g) => g.build(&entry.name)?,
    };
    let d = match entry.quasiconvexity {
        Some(c) => d.with_quasiconvexity(c)?,
        None => d,
    };
    Ok(Space {
        k: Arc::new(QuasihyperbolicMetric::new(Arc::new(d))),
    })
}

fn build_deformation(entry: &super::DeformationEntry, base: &Space) -> Result<DeformedSpace> {
    let d = base.domain();
    let ctx = |e: Error| Error::config(format!("deformation {}: {e}", entry.name));
    match entry.kind {
        DeformationKind::Bhk => {
            let w = match &entry.base_point {
                BasePoint::At(p) => d.nearest_vertex(*p),
                BasePoint::Named(_) => d.deepest_vertex(),
            };
            DeformedSpace::bhk(base.k.clone(), w, entry.epsilon).map_err(ctx)
        }
        DeformationKind::Sphericalization => {
            let p = match &entry.base_point {
                BasePoint::At(p) => nearest_boundary_sample(d, *p),
                BasePoint::Named(n) => {
                    return Err(Error::config(format!(
                        "deformation {}: sphericalization needs a boundary point, got {n}",
                        entry.name
                    )))
                }
            }
            .ok_or_else(|| Error::config(format!("deformation {}: domain has no boundary samples", entry.name)))?;
            DeformedSpace::sphericalize(d.clone(), p).map_err(ctx)
        }
    }
}

fn target_spec(entry: &super::MappingEntry, value: &serde_json::Value, source: &Space) -> Result<ShapeSpec> {
    let mut v = value.clone();
    if let Some(obj) = v.as_object_mut() {
        if !obj.contains_key("resolution") {
            obj.insert("resolution".into(), source.domain().resolution().into());
        }
    }
    let spec: ShapeSpec = serde_json::from_value(v)
        .map_err(|e| Error::config(format!("mapping {}: target: {e}", entry.name)))?;
    spec.validate()
        .map_err(|e| Error::config(format!("mapping {}: target: {e}", entry.name)))?;
    Ok(spec)
}

impl Context {
    fn build(s: &Scenario, opts: &RunOptions) -> Result<Context> {
        let mut domains = BTreeMap::new();
        for e in &s.domains {
            info!("building domain {}", e.name);
            domains.insert(e.name.clone(), build_domain(e, opts.resolution_override)?);
        }
        let mut deformations = BTreeMap::new();
        for e in &s.deformations {
            info!("building deformation {}", e.name);
            let space = build_deformation(e, &domains[&e.domain])?;
            deformations.insert(
                e.name.clone(),
                Deformed {
                    domain: e.domain.clone(),
                    space: Arc::new(space),
                },
            );
        }
        let mut mappings = BTreeMap::new();
        for e in &s.mappings {
            info!("building mapping {}", e.name);
            let m = match (&e.source, &e.map, &e.target, &e.deformation) {
                (Some(src), Some(f), Some(t), None) => {
                    let source = &domains[src];
                    let spec = target_spec(e, t, source)?;
                    builtin_mapping(&e.name, f.clone(), source.k.clone(), &spec)
                        .map_err(|err| Error::config(format!("mapping {}: {err}", e.name)))?
                }
                (None, None, None, Some(def)) => {
                    let deformed = &deformations[def];
                    let source = &domains[&deformed.domain];
                    let target = Arc::new(deformed.space.to_domain()?);
                    let target_k = Arc::new(QuasihyperbolicMetric::new(target));
                    MappingPair::identity_between(&e.name, source.k.clone(), target_k)?
                }
                _ => unreachable!("validated"),
            };
            mappings.insert(e.name.clone(), m);
        }
        Ok(Context {
            domains,
            deformations,
            mappings,
            tolerances: s.tolerances,
        })
    }
}

/// Per-check seed derived from the scenario seed and the check position.
fn check_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Build every space and run the checks in scenario order.
///
/// Configuration problems (unknown names, bad parameters, empty or
/// disconnected grids) abort with an error; failures inside a check are
/// recorded in that check's result.
pub fn run_scenario(scenario: &Scenario, opts: &RunOptions) -> Result<Report> {
    scenario.validate()?;
    let started = Instant::now();
    let mut scenario = scenario.clone();
    if let Some(seed) = opts.seed {
        scenario.seed = seed;
    }
    if let Some(h) = opts.resolution_override {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::config(format!("resolution override must be positive, got {h}")));
        }
    }
    let ctx = Context::build(&scenario, opts)?;
    let mut checks = Vec::with_capacity(scenario.checks.len());
    for (index, spec) in scenario.checks.iter().enumerate() {
        info!("check {index}: {} on {}", spec.id(), spec.subject());
        let t = Instant::now();
        let mut r = rng(check_seed(scenario.seed, index));
        let outcome = run_check(&ctx, spec, &mut r);
        let mut result = CheckResult {
            index,
            id: spec.id().to_string(),
            subject: spec.subject(),
            status: CheckStatus::Pass,
            comparisons: Vec::new(),
            measured: BTreeMap::new(),
            samples: BTreeMap::new(),
            skipped_degenerate: 0,
            witnesses: Vec::new(),
            error: None,
            runtime_ms: opts.timings.then(|| t.elapsed().as_secs_f64() * 1e3),
        };
        match outcome {
            Ok(Outcome {
                comparisons,
                measured,
                samples,
                skipped,
                witnesses,
            }) => {
                let pass = comparisons.iter().all(|c| c.pass);
                result.status = if pass { CheckStatus::Pass } else { CheckStatus::Fail };
                result.comparisons = comparisons;
                result.measured = measured;
                result.samples = samples;
                result.skipped_degenerate = skipped;
                result.witnesses = witnesses;
                debug_assert!(pass || !result.witnesses.is_empty(), "{} failed without a witness", result.id);
            }
            Err(e) => {
                result.status = CheckStatus::Error;
                result.error = Some(e.to_string());
            }
        }
        checks.push(result);
    }
    let resolutions = ctx
        .domains
        .iter()
        .map(|(n, s)| (n.clone(), s.domain().resolution()))
        .collect();
    Ok(Report {
        schema: SCHEMA_VERSION,
        seed: scenario.seed,
        tolerances: scenario.tolerances,
        scenario,
        resolutions,
        sample_defaults: DEFAULTS,
        passed: checks.iter().all(CheckResult::passed),
        checks,
        runtime_ms: opts.timings.then(|| started.elapsed().as_secs_f64() * 1e3),
    })
}
