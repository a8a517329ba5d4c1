//! One PASS/FAIL line per acceptance criterion, at the stated tolerances.
//!
//! Lines are written straight to stdout so they show up without `--nocapture`.

use std::cell::OnceCell;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use qhgeo::deformations::{verify_lemma_f_c, DeformedSpace};
use qhgeo::mapping::{
    builtin_mapping, estimate_quasimobius, mapping_class_report, MappingClassReport, MappingPair, PlaneMap,
    ReportParams,
};
use qhgeo::sampling::{continuous_pool, rng, sample_distinct_tuples, sample_pairs, sample_vertices};
use qhgeo::scenario::{run_scenario, CheckResult, Report, RunOptions, Scenario};
use qhgeo::{build_grid_domain, QuasihyperbolicMetric, Shape, ShapeSpec};

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn run_file(name: &str) -> Report {
    let s = Scenario::load(&scenario_path(name)).unwrap();
    run_scenario(&s, &RunOptions::default()).unwrap()
}

fn run_text(text: &str) -> Report {
    run_scenario(&Scenario::from_json(text).unwrap(), &RunOptions::default()).unwrap()
}

fn checks<'a>(r: &'a Report, id: &str) -> Vec<&'a CheckResult> {
    r.checks.iter().filter(|c| c.id == id).collect()
}

/// Pass iff every check with `id` passed and there is at least one.
fn all_pass(r: &Report, id: &str) -> (bool, String) {
    let cs = checks(r, id);
    let failed: Vec<String> = cs.iter().filter(|c| !c.passed()).map(|c| c.subject.clone()).collect();
    (!cs.is_empty() && failed.is_empty(), format!("{} {id} checks, failed: {failed:?}", cs.len()))
}

fn measured(c: &CheckResult, name: &str) -> f64 {
    c.comparison(name).map(|x| x.measured).unwrap_or(f64::NAN)
}

struct Ledger {
    failed: Vec<usize>,
}

impl Ledger {
    fn record(&mut self, n: usize, title: &str, f: impl FnOnce() -> (bool, String)) {
        let t = Instant::now();
        let (pass, detail) = f();
        let line = format!(
            "criterion {n:>2} {} {title}: {detail} [{:.1} s]\n",
            if pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
        std::io::stdout().write_all(line.as_bytes()).unwrap();
        if !pass {
            self.failed.push(n);
        }
    }
}

const ALL_METRICS: &str = r#"{
  "schema": 1, "seed": 101,
  "domains": [
    { "name": "disk", "kind": "disk", "params": { "radius": 1.0 }, "resolution": 0.02 },
    { "name": "half_plane", "kind": "half-plane-truncation", "params": { "truncation_radius": 3.0 }, "resolution": 0.04 }
  ],
  "deformations": [
    { "name": "bhk", "domain": "disk", "kind": "bhk", "base_point": "deepest", "epsilon": 0.2 },
    { "name": "sphere", "domain": "half_plane", "kind": "sphericalization", "base_point": [0.0, 0.0] }
  ],
  "checks": [
    { "id": "metric_axioms", "space": "disk" },
    { "id": "metric_axioms", "space": "bhk" },
    { "id": "metric_axioms", "space": "sphere" },
    { "id": "basepoint_identity", "space": "disk" },
    { "id": "basepoint_identity", "space": "bhk" },
    { "id": "basepoint_identity", "space": "sphere" }
  ]
}"#;

fn containment_scenario(slack: f64) -> String {
    format!(
        r#"{{
  "schema": 1, "seed": 4,
  "domains": [
    {{ "name": "disk", "kind": "disk", "params": {{ "radius": 1.0 }}, "resolution": 0.02 }},
    {{ "name": "square", "kind": "square", "params": {{ "side": 1.0 }}, "resolution": 0.02 }},
    {{ "name": "l_shape", "kind": "l-shape", "params": {{ "arm_width": 0.5, "arm_length": 1.0 }}, "resolution": 0.02 }},
    {{ "name": "annulus", "kind": "annulus", "params": {{ "inner_radius": 0.5, "outer_radius": 1.0 }}, "resolution": 0.02 }}
  ],
  "checks": [
    {{ "id": "ball_containment", "domain": "disk" }},
    {{ "id": "ball_containment", "domain": "square" }},
    {{ "id": "ball_containment", "domain": "l_shape" }},
    {{ "id": "ball_containment", "domain": "annulus" }}
  ],
  "tolerances": {{ "containment_slack": {slack} }}
}}"#
    )
}

/// `|k - exact|` between the snapped endpoints, and against the nominal value.
fn calibration_errors(shape: Shape, h: f64, a: [f64; 2], b: [f64; 2], exact: impl Fn([f64; 2], [f64; 2]) -> f64) -> (f64, f64) {
    let d = Arc::new(build_grid_domain(&ShapeSpec::new(shape, h)).unwrap());
    let k = QuasihyperbolicMetric::new(d.clone());
    let (x, y) = (d.nearest_vertex(a), d.nearest_vertex(b));
    let v = k.distance(x, y);
    ((v - exact(d.point(x), d.point(y))).abs(), (v - exact(a, b)).abs() / exact(a, b))
}

fn criterion_2() -> (bool, String) {
    let disk = |p: [f64; 2], q: [f64; 2]| ((1.0 - p[0].hypot(p[1])) / (1.0 - q[0].hypot(q[1]))).ln().abs();
    let vertical = |p: [f64; 2], q: [f64; 2]| (q[1] / p[1]).ln().abs();
    let radial = |p: [f64; 2], q: [f64; 2]| (q[0].hypot(q[1]) / p[0].hypot(p[1])).ln().abs();
    let cases: [(&str, Shape, [f64; 2], [f64; 2], &dyn Fn([f64; 2], [f64; 2]) -> f64); 3] = [
        ("disk", Shape::Disk { radius: 1.0, center: [0.0, 0.0] }, [0.0, 0.0], [0.5, 0.0], &disk),
        ("half-plane", Shape::HalfPlane { truncation_radius: 3.0 }, [0.0, 1.0], [0.0, std::f64::consts::E], &vertical),
        ("punctured", Shape::PuncturedPlane { truncation_radius: 2.5 }, [0.5, 0.0], [2.0, 0.0], &radial),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, shape, a, b, f) in cases {
        let (e1, rel1) = calibration_errors(shape.clone(), 0.01, a, b, f);
        let (e2, _) = calibration_errors(shape, 0.005, a, b, f);
        ok &= rel1 <= 0.02 && e2 < e1;
        detail.push(format!("{name} rel {rel1:.2e}, err {e1:.1e} -> {e2:.1e}"));
    }
    (ok, detail.join("; "))
}

fn criterion_7() -> (bool, String) {
    let c = |h: f64| {
        let d = Arc::new(build_grid_domain(&ShapeSpec::disk(1.0, h)).unwrap());
        let k = Arc::new(QuasihyperbolicMetric::new(d.clone()));
        let s = DeformedSpace::bhk(k, d.deepest_vertex(), 0.2).unwrap();
        let pool = continuous_pool(&d, 46, 0.05, &mut rng(17));
        let r = verify_lemma_f_c(&s, &pool).unwrap();
        (r.constant, r.tested)
    };
    let ((a, n), (b, _)) = (c(0.02), c(0.01));
    let drift = (a - b).abs() / a;
    (
        a.is_finite() && b.is_finite() && n >= 1000 && drift < 0.1,
        format!("C = {a:.4} (h = 0.02), {b:.4} (h = 0.01), drift {:.2}%, {n} pairs", 100.0 * drift),
    )
}

fn report_for(m: &MappingPair, seed: u64) -> MappingClassReport {
    let n = m.source().num_points();
    let mut r = rng(seed);
    let centers = sample_vertices(n, 150, &mut r);
    let pairs = sample_pairs(n, 1500, &mut r);
    let points = sample_vertices(n, 40, &mut r);
    let quadruples = sample_distinct_tuples::<4, _>(points.len(), 500, &mut r);
    mapping_class_report(
        m,
        &ReportParams { lambda: 0.4, t0: 0.5, q: 0.5, centers, pairs, points, quadruples },
    )
    .unwrap()
}

/// Every scalar output except the `C_x` table.
fn scalars(r: &MappingClassReport) -> Vec<f64> {
    let lb = r.local_bilipschitz.as_ref().unwrap();
    let qi = r.quasi_isometry.as_ref().unwrap();
    vec![
        r.partial_lipschitz.as_ref().unwrap().constant,
        r.relative.as_ref().unwrap().constant,
        r.semisolid.as_ref().unwrap().constant,
        lb.l1,
        r.local_quasisymmetry.as_ref().unwrap().constant,
        r.qh_bilipschitz.as_ref().unwrap().constant,
        qi.l,
        qi.c,
        r.quasimobius.as_ref().unwrap().slope,
        r.global_qs.as_ref().map_or(f64::NAN, |g| g.c0),
    ]
}

fn criterion_12() -> (bool, String) {
    let src = || {
        let d = Arc::new(build_grid_domain(&ShapeSpec::disk(1.0, 0.04)).unwrap());
        Arc::new(QuasihyperbolicMetric::new(d))
    };
    let identity = builtin_mapping("id", PlaneMap::Identity, src(), &ShapeSpec::disk(1.0, 0.04)).unwrap();
    let id = report_for(&identity, 1);
    let neutral = scalars(&id);
    let id_ok = neutral.iter().take(9).enumerate().all(|(i, &v)| if i == 7 { v == 0.0 } else { v == 1.0 });

    let f = builtin_mapping(
        "automorphism",
        PlaneMap::DiskAutomorphism { a: [0.3, -0.2] },
        src(),
        &ShapeSpec::disk(1.0, 0.04),
    )
    .unwrap();
    let base = report_for(&f, 2);
    let cx = |r: &MappingClassReport| r.local_bilipschitz.as_ref().unwrap().cx.clone();
    let mut invariance_ok = true;
    let mut worst: f64 = 0.0;
    for (s, post) in [(2.0, true), (2.0, false), (3.0, true)] {
        let g = if post { f.post_scaled(s).unwrap() } else { f.pre_scaled(s).unwrap() };
        let r = report_for(&g, 2);
        for (a, b) in scalars(&base).iter().zip(scalars(&r)) {
            let rel = if *a == b { 0.0 } else { (a - b).abs() / a.abs().max(b.abs()) };
            worst = worst.max(rel);
        }
        let factor = if post { s } else { 1.0 / s };
        for ((ka, a), (kb, b)) in cx(&base).iter().zip(cx(&r).iter()) {
            let rel = (a * factor - b).abs() / b.abs();
            invariance_ok &= ka == kb;
            worst = worst.max(rel);
        }
    }
    invariance_ok &= worst <= 1e-12;

    let d = Arc::new(build_grid_domain(&ShapeSpec::disk(1.0, 0.04)).unwrap());
    let k = Arc::new(QuasihyperbolicMetric::new(d.clone()));
    let inversion = PlaneMap::Mobius { a: [0.0, 0.0], b: [1.0, 0.0], c: [1.0, 0.0], d: [-2.0, 0.0] };
    let target = ShapeSpec::new(Shape::Disk { radius: 1.0 / 3.0, center: [-2.0 / 3.0, 0.0] }, 0.04);
    let m = builtin_mapping("inversion", inversion, k, &target).unwrap();
    let mut r = rng(9);
    let pool = sample_vertices(d.num_points(), 60, &mut r);
    let quads = sample_distinct_tuples::<4, _>(pool.len(), 1000, &mut r);
    let slope = estimate_quasimobius(&m, &pool, &quads).slope;
    let mobius_ok = (slope - 1.0).abs() <= 1e-9;

    (
        id_ok && invariance_ok && mobius_ok,
        format!(
            "identity neutral {id_ok}, similarity max relative change {worst:.1e}, 1/(z-2) slope - 1 = {:.1e}",
            slope - 1.0
        ),
    )
}

fn criterion_13() -> (bool, String) {
    let s = Scenario::load(&scenario_path("theorem1_disk_automorphism.json")).unwrap();
    let a = run_scenario(&s, &RunOptions::default()).unwrap().to_json().unwrap();
    let b = run_scenario(&s, &RunOptions::default()).unwrap().to_json().unwrap();
    let other = run_scenario(&s, &RunOptions { seed: Some(s.seed + 1), ..Default::default() })
        .unwrap()
        .to_json()
        .unwrap();
    (a == b && a != other, format!("{} bytes identical: {}, other seed differs: {}", a.len(), a == b, a != other))
}

#[test]
fn acceptance_criteria() {
    let mut l = Ledger { failed: Vec::new() };
    // shared runs are timed with the first criterion that reads them
    let metrics = OnceCell::new();
    let metrics = || metrics.get_or_init(|| run_text(ALL_METRICS));
    let calibration = OnceCell::new();
    let deformations = OnceCell::new();
    let deformations = || deformations.get_or_init(|| run_file("deformations.json"));
    let theorem1 = OnceCell::new();
    let theorem1 = || theorem1.get_or_init(|| run_file("theorem1_disk_automorphism.json"));

    l.record(1, "metric axioms on ambient, graph, k, BHK and sphericalized metrics", || {
        all_pass(metrics(), "metric_axioms")
    });
    l.record(2, "quasihyperbolic calibration at h = 0.01, error shrinks at h/2", criterion_2);
    l.record(3, "distance bound by (e^k - 1) d(x) on disk, square, L-shape", || {
        let cs = checks(calibration.get_or_init(|| run_file("calibration.json")), "lemma_b");
        let pairs: usize = cs.iter().map(|c| c.samples["pairs"]).sum();
        let ok = cs.len() == 3 && cs.iter().all(|c| c.passed() && c.samples["pairs"] >= 10_000);
        (ok, format!("{} shapes, {pairs} pairs, zero violations: {ok}", cs.len()))
    });
    l.record(4, "ball containment at r = 2d/(2+c), witness when slack < 1", || {
        let good = run_text(&containment_scenario(1.0));
        let bad = run_text(&containment_scenario(0.5));
        let (ok, detail) = all_pass(&good, "ball_containment");
        let witnessed = bad.checks.iter().all(|c| !c.passed() && !c.witnesses.is_empty());
        (ok && witnessed, format!("{detail}; slack 0.5 witnesses in every shape: {witnessed}"))
    });
    l.record(5, "base-point identity residual", || {
        let cs = checks(metrics(), "basepoint_identity");
        let worst = cs
            .iter()
            .flat_map(|c| c.comparisons.iter().map(|x| x.measured))
            .fold(0.0, f64::max);
        let tuples: usize = cs.iter().map(|c| c.samples["tuples"]).sum();
        let ok = cs.iter().all(|c| c.passed()) && cs.len() == 3;
        (ok, format!("max residual {worst:.1e} over {tuples} tuples in 5 metrics"))
    });
    l.record(6, "BHK diameter <= 2/eps and d(w) >= 1/(e eps)", || {
        let cs = checks(deformations(), "bhk_diameter");
        let values: Vec<String> = cs
            .iter()
            .map(|c| format!("{} diam {:.3}", c.subject, measured(c, "diameter_upper")))
            .collect();
        (cs.len() == 3 && cs.iter().all(|c| c.passed()), values.join(", "))
    });
    l.record(7, "BHK comparability finite, drift under h/2 below 10%", criterion_7);
    l.record(8, "sphericalization quasimobius slope and qh biLipschitz constant", || {
        let c = checks(deformations(), "sphericalization")[0];
        (
            c.passed(),
            format!(
                "slope {:.6} <= 16.8, M {:.3} <= {:.1}",
                measured(c, "quasimobius_slope"),
                measured(c, "qh_bilipschitz_M"),
                c.comparison("qh_bilipschitz_M").and_then(|x| x.predicted).unwrap_or(f64::NAN)
            ),
        )
    });
    l.record(9, "theorem-1 chain on the disk automorphism a = 0.5", || {
        let c = checks(theorem1(), "theorem1_chain")[0];
        (
            c.passed(),
            format!(
                "c1 {:.3}, c2 {:.3}, L {:.3}",
                measured(c, "relative_c1"),
                measured(c, "semisolid_c2"),
                measured(c, "partial_lipschitz_L")
            ),
        )
    });
    l.record(10, "theorem-2 chain on the disk automorphism a = 0.5", || {
        let c = checks(theorem1(), "theorem2_chain")[0];
        (
            c.passed(),
            format!(
                "L1 {:.3}, local QS slope {:.3}, L {:.3}",
                measured(c, "local_bilipschitz_L1"),
                measured(c, "local_qs_slope"),
                measured(c, "partial_lipschitz_L")
            ),
        )
    });
    l.record(11, "quasihyperbolic step bound on disk automorphism and power map", || {
        let power = run_file("power_map_step_bound.json");
        let cs: Vec<&CheckResult> = checks(theorem1(), "step_bound").into_iter().chain(checks(&power, "step_bound")).collect();
        let pairs: Vec<f64> = cs.iter().map(|c| measured(c, "pairs_within_t1")).collect();
        (cs.len() == 2 && cs.iter().all(|c| c.passed()), format!("pairs within t1: {pairs:?}, zero violations"))
    });
    l.record(12, "neutral identity, similarity invariance, Mobius slope", criterion_12);
    l.record(13, "byte-identical reports for identical scenario and seed", criterion_13);

    assert!(l.failed.is_empty(), "failed criteria: {:?}", l.failed);
}
