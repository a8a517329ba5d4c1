use std::collections::BTreeMap;
use std::f64::consts::E;

use super::report::{Comparison, Witness};
use super::run::{Context, Space};
use super::CheckSpec;
use crate::deformations::{basepoint_change_distortion, nearest_boundary_sample, verify_lemma_f_c, DeformedSpace};
use crate::error::{Error, Result};
use crate::hyperbolicity::{basepoint_identity_residual, hyperbolicity_report};
use crate::ledger::{local_q1, predicted_constants, relative_t1, step_bound, step_t1};
use crate::mapping::{
    ambient_table, check_global_qs_hypotheses, closure_diameter, cross_ratio_slope, estimate_local_bilipschitz,
    estimate_local_quasisymmetry, estimate_partial_lipschitz, estimate_qh_bilipschitz, estimate_quasimobius,
    estimate_relative, estimate_semisolid, mapping_class_report, LocalWitness, MappingPair, ReportParams,
};
use crate::metric_core::{
    check_ball_containment, check_metric_axioms, lemma_c_radius, truncation_sensitivity, DistanceTable,
    DomainSample, Point,
};
use crate::quasihyperbolic::{estimate_uniformity, verify_lemma_b, QuasihyperbolicMetric};
use crate::sampling::{continuous_pool, sample_distinct_tuples, sample_pairs, sample_tuples, sample_vertices, SampleRng};

/// Everything a check contributes to its report entry.
#[derive(Default)]
pub(crate) struct Outcome {
    pub comparisons: Vec<Comparison>,
    pub measured: BTreeMap<String, f64>,
    pub samples: BTreeMap<String, usize>,
    pub skipped: usize,
    pub witnesses: Vec<Witness>,
}

impl Outcome {
    fn compare(&mut self, c: Comparison) -> bool {
        let pass = c.pass;
        self.comparisons.push(c);
        pass
    }

    fn measure(&mut self, name: &str, v: f64) {
        self.measured.insert(name.to_string(), v);
    }

    fn sample(&mut self, name: &str, n: usize) {
        self.samples.insert(name.to_string(), n);
    }

    fn witness(&mut self, label: &str, d: &DomainSample, vertices: &[usize]) {
        self.witnesses.push(vertex_witness(label, d, vertices));
    }

    fn local_witness(&mut self, label: &str, w: &Option<LocalWitness>) {
        if let Some(w) = w {
            self.witnesses.push(Witness {
                label: label.to_string(),
                vertices: vec![w.center],
                points: w.points.clone(),
            });
        }
    }
}

fn vertex_witness(label: &str, d: &DomainSample, vertices: &[usize]) -> Witness {
    Witness {
        label: label.to_string(),
        vertices: vertices.to_vec(),
        points: match d.coords() {
            Some(c) => vertices.iter().map(|&v| c[v]).collect(),
            None => Vec::new(),
        },
    }
}

fn pool(d: &DomainSample, count: usize, rng: &mut SampleRng) -> Vec<usize> {
    continuous_pool(d, count, 0.0, rng)
}

/// Metric tables over `pool` for a named space: ambient, graph length and `k`
/// for a domain; the deformed metric for a deformation.
fn space_tables(ctx: &Context, name: &str, pool_size: usize, rng: &mut SampleRng) -> (Vec<(String, DistanceTable)>, Vec<usize>, std::sync::Arc<DomainSample>) {
    if let Some(s) = ctx.domains.get(name) {
        let d = s.domain();
        let p = pool(d, pool_size, rng);
        let tables = vec![
            ("ambient".to_string(), ambient_table(d, &p)),
            ("length".to_string(), d.length_metric().table(&p)),
            ("k".to_string(), s.k.table(&p)),
        ];
        return (tables, p, d.clone());
    }
    let def = &ctx.deformations[name];
    let d = def.space.base().clone();
    let p = pool(&d, pool_size, rng);
    let label = if def.space.is_bhk() { "bhk" } else { "sphericalized_chain" };
    (vec![(label.to_string(), def.space.table(&p))], p, d)
}

fn metric_axioms(ctx: &Context, space: &str, triples: usize, pool_size: usize, rng: &mut SampleRng) -> Outcome {
    let mut o = Outcome::default();
    let (tables, p, d) = space_tables(ctx, space, pool_size, rng);
    o.sample("pool", p.len());
    o.sample("triples", triples);
    for (name, t) in tables {
        let r = check_metric_axioms(&t, triples, ctx.tolerances.exact, rng);
        if !o.compare(Comparison::zero(&format!("violations_{name}"), r.violations.len())) {
            let v = &r.violations[0];
            let verts: Vec<usize> = v.points.iter().map(|&i| p[i]).collect();
            o.witness(&format!("{name}: {:?} excess {:e}", v.kind, v.excess), &d, &verts);
        }
    }
    o
}

fn basepoint_identity(ctx: &Context, space: &str, tuples: usize, pool_size: usize, rng: &mut SampleRng) -> Outcome {
    let mut o = Outcome::default();
    let (tables, p, d) = space_tables(ctx, space, pool_size, rng);
    o.sample("pool", p.len());
    o.sample("tuples", tuples);
    for (name, t) in tables {
        let mut worst = (0.0, [0usize; 6]);
        for q in sample_tuples::<6, _>(t.len(), tuples, rng) {
            let r = basepoint_identity_residual(&t, q[0], q[1], q[2], q[3], q[4], q[5]);
            if r > worst.0 {
                worst = (r, q);
            }
        }
        if !o.compare(Comparison::at_most(&format!("residual_{name}"), worst.0, ctx.tolerances.exact)) {
            let verts: Vec<usize> = worst.1.iter().map(|&i| p[i]).collect();
            o.witness(&format!("{name}: (x, y, z, u, o, w)"), &d, &verts);
        }
    }
    o
}

fn qh_calibration(s: &Space, from: Point, to: Point, expected: f64, tolerance: f64) -> Outcome {
    let mut o = Outcome::default();
    let d = s.domain();
    let (x, y) = (d.nearest_vertex(from), d.nearest_vertex(to));
    let k = s.k.distance(x, y);
    let rel = (k - expected).abs() / expected.abs();
    o.measure("k", k);
    o.measure("expected", expected);
    if !o.compare(Comparison::at_most("relative_error", rel, tolerance)) {
        o.witness("snapped endpoints", d, &[x, y]);
    }
    o
}

fn lemma_b(ctx: &Context, s: &Space, pairs: usize, rng: &mut SampleRng) -> Outcome {
    let mut o = Outcome::default();
    let d = s.domain();
    let pairs = sample_pairs(d.num_points(), pairs, rng);
    let r = verify_lemma_b(&s.k, &pairs, ctx.tolerances.slack);
    o.sample("pairs", r.tested);
    o.sample("linear_pairs", r.linear_tested);
    o.compare(Comparison::zero("violations", r.violations.len()));
    for v in r.violations.iter().take(5) {
        o.witness(&format!("{:?}: {} > {}", v.inequality, v.lhs, v.rhs), d, &[v.x, v.y]);
    }
    o
}

fn ball_containment(ctx: &Context, s: &Space, centers: usize, rng: &mut SampleRng) -> Outcome {
    let mut o = Outcome::default();
    let d = s.domain();
    let centers = sample_vertices(d.num_points(), centers, rng);
    let mut bad = 0;
    let mut scanned = 0;
    for &x in &centers {
        let r = check_ball_containment(d, x, lemma_c_radius(d, x, ctx.tolerances.containment_slack));
        scanned += r.scanned;
        if !r.contained {
            bad += 1;
            if o.witnesses.len() < 5 {
                let mut w = vertex_witness(&format!("ball radius {} leaves the domain", r.radius), d, &[x]);
                w.points.extend(r.violation);
                o.witnesses.push(w);
            }
        }
    }
    o.sample("centers", centers.len());
    o.sample("scanned_points", scanned);
    o.compare(Comparison::zero("violations", bad));
    o
}

fn uniformity_constant(d: &DomainSample, k: &QuasihyperbolicMetric, pairs: usize, rng: &mut SampleRng) -> (f64, Option<(usize, usize)>) {
    let pairs = sample_pairs(d.num_points(), pairs, rng);
    let u = estimate_uniformity(d, k, &pairs);
    (u.constant_a, u.worst_pair)
}

fn hyperbolicity(s: &Space, pool_size: usize, quads: usize, rng: &mut SampleRng) -> Outcome {
    let mut o = Outcome::default();
    let d = s.domain();
    let p = pool(d, pool_size, rng);
    let quads = sample_tuples::<4, _>(p.len(), quads, rng);
    let r = hyperbolicity_report(d, &s.k, &p, &quads, d.deepest_vertex());
    o.sample("pool", p.len());
    o.sample("quadruples", r.quadruples_tested);
    o.compare(Comparison::finite("delta", r.delta));
    o.compare(Comparison::finite("starlikeness_K", r.starlikeness_k.unwrap_or(f64::NAN)));
    if let Some(q) = r.worst_quadruple {
        o.witness("largest four-point defect", d, &q);
    }
    o
}

fn uniformity(s: &Space, pairs: usize, rng: &mut SampleRng) -> Outcome {
    let mut o = Outcome::default();
    let (a, worst) = uniformity_constant(s.domain(), &s.k, pairs, rng);
    o.sample("pairs", pairs);
    o.compare(Comparison::finite("A", a));
    if let Some((x, y)) = worst {
        o.witness("worst pair", s.domain(), &[x, y]);
    }
    o
}

fn bhk_parts(space: &DeformedSpace) -> Result<(usize, f64)> {
    match *space.params() {
        crate::deformations::DeformationParams::Bhk { base_point, epsilon } => Ok((base_point, epsilon)),
        _ => Err(Error::config("check needs a bhk deformation")),
    }
}

fn bhk_diameter(ctx: &Context, space: &DeformedSpace) -> Result<Outcome> {
    let mut o = Outcome::default();
    let (w, eps) = bhk_parts(space)?;
    let slack = ctx.tolerances.slack;
    let (lower, upper) = space.diameter_bounds();
    o.measure("diameter_lower", lower);
    let tree = space.metric().multi_source(&[(w, 0.0)]);
    let far = (0..tree.dist.len()).max_by(|&a, &b| tree.dist[a].total_cmp(&tree.dist[b])).unwrap_or(w);
    if !o.compare(Comparison::at_most("diameter_upper", upper, 2.0 / eps * slack)) {
        o.witness("base point and farthest vertex", space.base(), &[w, far]);
    }
    let dw = space.boundary_distance(w);
    if !o.compare(Comparison::at_least("base_boundary_distance", dw, 1.0 / (eps * E) / slack)) {
        o.witness("base point", space.base(), &[w]);
    }
    Ok(o)
}

fn bhk_comparability(space: &DeformedSpace, pool_size: usize, rng: &mut SampleRng) -> Result<Outcome> {
    let mut o = Outcome::default();
    let p = pool(space.base(), pool_size, rng);
    let r = verify_lemma_f_c(space, &p)?;
    o.sample("pairs", r.tested);
    o.skipped = r.skipped;
    o.measure("min_ratio", r.min_ratio);
    o.measure("max_ratio", r.max_ratio);
    o.compare(Comparison::finite("C", r.constant));
    if let Some((x, y)) = r.worst_pair {
        o.witness("extremal pair", space.base(), &[x, y]);
    }
    Ok(o)
}

fn basepoint_change(ctx: &Context, names: &[String; 2], pool_size: usize, quads: usize, rng: &mut SampleRng) -> Result<Outcome> {
    let mut o = Outcome::default();
    let (a, b) = (&ctx.deformations[&names[0]].space, &ctx.deformations[&names[1]].space);
    let p = pool(a.base(), pool_size, rng);
    if p.len() < 4 {
        return Err(Error::NoValidSample("basepoint change needs at least 4 pool points".into()));
    }
    let quads = sample_distinct_tuples::<4, _>(p.len(), quads, rng);
    let r = basepoint_change_distortion(a, b, &p, &quads)?;
    o.sample("quadruples", r.tested);
    o.skipped = r.skipped;
    o.compare(Comparison::finite("slope", r.slope));
    if let Some(q) = r.worst {
        let verts: Vec<usize> = q.iter().map(|&i| p[i]).collect();
        o.witness("extremal quadruple", a.base(), &verts);
    }
    Ok(o)
}

fn sphericalization(ctx: &Context, name: &str, pool_size: usize, quads: usize, pairs: usize, rng: &mut SampleRng) -> Result<Outcome> {
    let mut o = Outcome::default();
    let def = &ctx.deformations[name];
    let space = &def.space;
    if space.is_bhk() {
        return Err(Error::config("sphericalization check needs a sphericalization"));
    }
    let base = &ctx.domains[&def.domain];
    let d = base.domain();
    let slack = ctx.tolerances.slack;
    let p = pool(d, pool_size, rng);
    if p.len() < 4 {
        return Err(Error::NoValidSample("sphericalization needs at least 4 pool points".into()));
    }
    let quasi = space.quasimetric_table(&p);
    let chain = space.table(&p);
    let (mut lo, mut hi) = ((f64::INFINITY, (0, 0)), (0.0f64, (0, 0)));
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            let r = chain.get(i, j) / quasi.get(i, j);
            if r < lo.0 {
                lo = (r, (i, j));
            }
            if r > hi.0 {
                hi = (r, (i, j));
            }
        }
    }
    if !o.compare(Comparison::at_least("chain_over_quasimetric_min", lo.0, 0.25 / slack)) {
        o.witness("pair below quarter", d, &[p[lo.1 .0], p[lo.1 .1]]);
    }
    if !o.compare(Comparison::at_most("chain_over_quasimetric_max", hi.0, 1.0 + ctx.tolerances.exact)) {
        o.witness("pair above quasimetric", d, &[p[hi.1 .0], p[hi.1 .1]]);
    }
    let quads = sample_distinct_tuples::<4, _>(p.len(), quads, rng);
    let slope = cross_ratio_slope(&ambient_table(d, &p), &chain, &quads);
    o.sample("quadruples", slope.tested);
    o.skipped = slope.skipped;
    if !o.compare(Comparison::at_most("quasimobius_slope", slope.slope, 16.0 * slack)) {
        let verts: Vec<usize> = slope.worst.unwrap_or_default().iter().map(|&i| p[i]).collect();
        o.witness("extremal quadruple", d, &verts);
    }
    let (a, _) = uniformity_constant(d, &base.k, pairs, rng);
    o.measure("A", a);
    let target = std::sync::Arc::new(space.to_domain()?);
    let m = MappingPair::identity_between(name, base.k.clone(), std::sync::Arc::new(QuasihyperbolicMetric::new(target)))?;
    let pair_sample = sample_pairs(d.num_points(), pairs, rng);
    let mq = estimate_qh_bilipschitz(&m, &pair_sample);
    o.sample("pairs", mq.tested);
    if !o.compare(Comparison::at_most("qh_bilipschitz_M", mq.constant, 80.0 * a * slack)) {
        let (x, y) = mq.worst_pair.unwrap_or_default();
        o.witness("extremal pair", d, &[x, y]);
    }
    Ok(o)
}

fn centers(m: &MappingPair, balls: usize, rng: &mut SampleRng) -> Vec<usize> {
    sample_vertices(m.source().num_points(), balls, rng)
}

fn theorem1_chain(ctx: &Context, m: &MappingPair, lambda: f64, balls: usize, pairs: usize, rng: &mut SampleRng) -> Result<Outcome> {
    let mut o = Outcome::default();
    let slack = ctx.tolerances.slack;
    let c = m.source().quasiconvexity();
    let cs = centers(m, balls, rng);
    let pairs = sample_pairs(m.source().num_points(), pairs, rng);
    o.sample("balls", cs.len());

    let l = estimate_partial_lipschitz(m, lambda, &cs)?;
    let c1 = estimate_relative(m, lambda, &cs)?;
    o.measure("L", l.constant);
    o.skipped += l.skipped + c1.skipped;
    if !o.compare(Comparison::at_most("relative_c1", c1.constant, l.constant * slack)) {
        o.local_witness("relative extremal ball", &c1.witness);
    }

    let t1 = relative_t1(c, c1.constant, lambda);
    let c2 = estimate_semisolid(m, &pairs);
    o.sample("pairs", c2.tested);
    o.measure("t1", t1);
    if !o.compare(Comparison::at_most("semisolid_c2", c2.constant, 24.0 * c * c1.constant / t1 * slack)) {
        o.witness("semisolid extremal pair", m.source(), &[c2.worst_pair.unwrap_or_default().0, c2.worst_pair.unwrap_or_default().1]);
    }

    let lambda2 = 1.0 / (36.0 * c * c * c2.constant);
    o.measure("lambda_semisolid", lambda2);
    let l2 = estimate_partial_lipschitz(m, lambda2, &cs)?;
    o.skipped += l2.skipped;
    if !o.compare(Comparison::at_most("partial_lipschitz_L", l2.constant, 24.0 * c * c2.constant * slack)) {
        o.local_witness("partial Lipschitz extremal ball", &l2.witness);
    }
    Ok(o)
}

fn theorem2_chain(ctx: &Context, m: &MappingPair, t0: f64, balls: usize, pairs: usize, rng: &mut SampleRng) -> Result<Outcome> {
    let mut o = Outcome::default();
    let slack = ctx.tolerances.slack;
    let c = m.source().quasiconvexity();
    let cs = centers(m, balls, rng);
    let pairs = sample_pairs(m.source().num_points(), pairs, rng);
    o.sample("balls", cs.len());

    let c1 = estimate_relative(m, t0, &cs)?;
    let theta1 = t0 / (8.0 * c1.constant);
    o.measure("c1", c1.constant);
    o.measure("theta1", theta1);
    let lb = estimate_local_bilipschitz(m, theta1, &cs)?;
    o.skipped += c1.skipped + lb.skipped;
    if !o.compare(Comparison::at_most("local_bilipschitz_L1", lb.l1, 4.0 * c1.constant * slack)) {
        o.local_witness("local biLipschitz extremal ball", &lb.witness);
    }

    let qs = estimate_local_quasisymmetry(m, theta1, &cs)?;
    o.skipped += qs.skipped;
    if !o.compare(Comparison::at_most("local_qs_slope", qs.constant, lb.l1 * lb.l1 * slack)) {
        o.local_witness("local quasisymmetry extremal triple", &qs.witness);
    }

    let c2 = estimate_semisolid(m, &pairs);
    let q1 = local_q1(c, theta1);
    let lambda = q1 / (2.0 * c * c2.constant);
    o.sample("pairs", c2.tested);
    o.measure("c2", c2.constant);
    o.measure("q1", q1);
    o.measure("lambda", lambda);
    let l = estimate_partial_lipschitz(m, lambda, &cs)?;
    o.skipped += l.skipped;
    if !o.compare(Comparison::at_most("partial_lipschitz_L", l.constant, 8.0 * c * c2.constant / q1 * slack)) {
        o.local_witness("partial Lipschitz extremal ball", &l.witness);
    }
    Ok(o)
}

fn step_bound_check(ctx: &Context, m: &MappingPair, q: f64, balls: usize, pairs: usize, rng: &mut SampleRng) -> Result<Outcome> {
    let mut o = Outcome::default();
    let cs = centers(m, balls, rng);
    let (a_src, _) = uniformity_constant(m.source(), m.source_k(), pairs, rng);
    let (a_tgt, _) = uniformity_constant(m.target(), m.target_k(), pairs, rng);
    let a = a_src.max(a_tgt);
    let eta = estimate_local_quasisymmetry(m, q, &cs)?;
    let t1 = step_t1(a, q, eta.constant);
    let bound = step_bound(a) * ctx.tolerances.slack;
    o.measure("A", a);
    o.measure("eta_slope", eta.constant);
    o.measure("t1", t1);
    let r = crate::mapping::verify_step_bound(m, t1, bound, &cs);
    o.sample("pairs", r.tested);
    o.measure("max_image_k", r.max_image);
    o.compare(Comparison::zero("violations", r.violations.len()));
    for v in r.violations.iter().take(5) {
        o.witness(&format!("k = {} maps to {}", v.k, v.k_image), m.source(), &[v.x, v.y]);
    }
    if !o.compare(Comparison::at_least("pairs_within_t1", r.tested as f64, 1.0)) {
        let deepest = m.source().deepest_vertex();
        o.witness("no vertex pair within t1; grid step exceeds t1 even at the deepest vertex", m.source(), &[deepest]);
    }
    Ok(o)
}

fn quasimobius(m: &MappingPair, pool_size: usize, quads: usize, max_slope: Option<f64>, rng: &mut SampleRng) -> Result<Outcome> {
    let mut o = Outcome::default();
    let p = pool(m.source(), pool_size, rng);
    if p.len() < 4 {
        return Err(Error::NoValidSample("quasimobius needs at least 4 pool points".into()));
    }
    let quads = sample_distinct_tuples::<4, _>(p.len(), quads, rng);
    let r = estimate_quasimobius(m, &p, &quads);
    o.sample("quadruples", r.tested);
    o.skipped = r.skipped;
    let pass = match max_slope {
        Some(b) => o.compare(Comparison::at_most("slope", r.slope, b)),
        None => o.compare(Comparison::finite("slope", r.slope)),
    };
    if !pass || r.worst.is_some() {
        if let Some(q) = r.worst {
            o.witness("extremal quadruple", m.source(), &q);
        }
    }
    Ok(o)
}

/// `diam / d(w)` of a sphericalization of `d` about the boundary sample nearest the origin.
fn sphericalized_c0(d: &std::sync::Arc<DomainSample>) -> Result<f64> {
    let p = nearest_boundary_sample(d, [0.0, 0.0]).ok_or_else(|| Error::config("no boundary samples"))?;
    let s = DeformedSpace::sphericalize(d.clone(), p)?;
    let sd = s.to_domain()?;
    let w = sd.deepest_vertex();
    Ok(sd.diameter() / sd.boundary_distance(w))
}

fn global_qs(ctx: &Context, m: &MappingPair, pairs: usize, rng: &mut SampleRng) -> Result<Outcome> {
    let mut o = Outcome::default();
    match check_global_qs_hypotheses(m) {
        Ok(g) => {
            let (a_src, _) = uniformity_constant(m.source(), m.source_k(), pairs, rng);
            let (a_tgt, _) = uniformity_constant(m.target(), m.target_k(), pairs, rng);
            let a = a_src.max(a_tgt);
            o.measure("A", a);
            o.measure("diameter", g.diameter);
            o.measure("target_diameter", g.target_diameter);
            if !o.compare(Comparison::at_most("C0", g.c0, 4.0 * a * ctx.tolerances.slack)) {
                o.witness("deepest point", m.source(), &[g.w]);
            }
        }
        Err(Error::Unbounded(_)) => {
            for (side, d) in [("source", m.source()), ("target", m.target())] {
                if d.is_bounded() {
                    o.measure(&format!("C0_{side}"), closure_diameter(d) / d.boundary_distance(d.deepest_vertex()));
                    continue;
                }
                let c0 = sphericalized_c0(d)?;
                o.compare(Comparison::finite(&format!("C0_{side}_sphericalized"), c0));
                if let Some(spec) = d.shape().filter(|_| side == "source") {
                    let t = truncation_sensitivity(spec, |dd| {
                        sphericalized_c0(&dd).unwrap_or(f64::NAN)
                    })?;
                    o.measure("truncation_relative_change", t.relative_change);
                    o.measure("truncation_stable", if t.stable { 1.0 } else { 0.0 });
                }
            }
        }
        Err(e) => return Err(e),
    }
    Ok(o)
}

fn mapping_report(m: &MappingPair, spec: &CheckSpec, rng: &mut SampleRng) -> Result<Outcome> {
    let CheckSpec::MappingReport { lambda, t0, q, balls, pairs, pool: pool_size, quadruples, neutral, .. } = *spec else {
        unreachable!()
    };
    let mut o = Outcome::default();
    let cs = centers(m, balls, rng);
    let pair_sample = sample_pairs(m.source().num_points(), pairs, rng);
    let p = pool(m.source(), pool_size, rng);
    let quads = sample_distinct_tuples::<4, _>(p.len(), quadruples, rng);
    let r = mapping_class_report(
        m,
        &ReportParams {
            lambda,
            t0,
            q,
            centers: cs,
            pairs: pair_sample,
            points: p,
            quadruples: quads,
        },
    )?;
    o.skipped = r.skipped_degenerate;
    let mut values = vec![
        ("partial_bilipschitz_L", r.partial_lipschitz.as_ref().map(|e| e.constant)),
        ("relative_c1", r.relative.as_ref().map(|e| e.constant)),
        ("semisolid_c2", r.semisolid.as_ref().map(|e| e.constant)),
        ("local_bilipschitz_L1", r.local_bilipschitz.as_ref().map(|e| e.l1)),
        ("local_qs_slope", r.local_quasisymmetry.as_ref().map(|e| e.constant)),
        ("qh_bilipschitz_M", r.qh_bilipschitz.as_ref().map(|e| e.constant)),
        ("quasi_isometry_L", r.quasi_isometry.as_ref().map(|e| e.l)),
        ("quasimobius_slope", r.quasimobius.as_ref().map(|e| e.slope)),
    ];
    if let Some(g) = &r.global_qs {
        o.measure("C0", g.c0);
    }
    if let Some(lb) = &r.local_bilipschitz {
        let cx: Vec<f64> = lb.cx.values().copied().collect();
        o.measure("C_x_min", cx.iter().copied().fold(f64::INFINITY, f64::min));
        o.measure("C_x_max", cx.iter().copied().fold(0.0, f64::max));
    }
    let qi_c = r.quasi_isometry.as_ref().map_or(0.0, |q| q.c);
    for (name, v) in values.drain(..) {
        let v = v.unwrap_or(f64::NAN);
        let pass = if neutral {
            o.compare(Comparison::at_most(name, v, 1.0))
        } else {
            o.compare(Comparison::finite(name, v))
        };
        if !pass {
            let w = match name {
                "partial_bilipschitz_L" => r.partial_lipschitz.as_ref().and_then(|e| e.witness.clone()),
                "relative_c1" => r.relative.as_ref().and_then(|e| e.witness.clone()),
                "local_bilipschitz_L1" => r.local_bilipschitz.as_ref().and_then(|e| e.witness.clone()),
                "local_qs_slope" => r.local_quasisymmetry.as_ref().and_then(|e| e.witness.clone()),
                _ => None,
            };
            match w {
                Some(w) => o.local_witness(name, &Some(w)),
                None => {
                    let pair = match name {
                        "semisolid_c2" => r.semisolid.as_ref().and_then(|e| e.worst_pair),
                        _ => r.qh_bilipschitz.as_ref().and_then(|e| e.worst_pair),
                    };
                    let (x, y) = pair.unwrap_or_default();
                    o.witness(name, m.source(), &[x, y]);
                }
            }
        }
    }
    if neutral {
        if !o.compare(Comparison::at_most("quasi_isometry_C", qi_c, 0.0)) {
            let (x, y) = r.qh_bilipschitz.as_ref().and_then(|e| e.worst_pair).unwrap_or_default();
            o.witness("quasi-isometry extremal pair", m.source(), &[x, y]);
        }
    } else {
        o.measure("quasi_isometry_C", qi_c);
    }
    Ok(o)
}

fn ledger(spec: &CheckSpec) -> Result<Outcome> {
    let CheckSpec::Ledger { lemma, inputs } = spec else { unreachable!() };
    let l = predicted_constants(*lemma, *inputs)?;
    let mut o = Outcome::default();
    for (k, v) in &l.derived {
        o.compare(Comparison::finite(k, *v));
    }
    Ok(o)
}

pub(crate) fn run_check(ctx: &Context, spec: &CheckSpec, rng: &mut SampleRng) -> Result<Outcome> {
    match spec {
        CheckSpec::MetricAxioms { space, triples, pool } => Ok(metric_axioms(ctx, space, *triples, *pool, rng)),
        CheckSpec::QhCalibration { domain, from, to, expected, tolerance } => {
            Ok(qh_calibration(&ctx.domains[domain], *from, *to, *expected, *tolerance))
        }
        CheckSpec::LemmaB { domain, pairs } => Ok(lemma_b(ctx, &ctx.domains[domain], *pairs, rng)),
        CheckSpec::BallContainment { domain, centers } => Ok(ball_containment(ctx, &ctx.domains[domain], *centers, rng)),
        CheckSpec::BasepointIdentity { space, tuples, pool } => Ok(basepoint_identity(ctx, space, *tuples, *pool, rng)),
        CheckSpec::Hyperbolicity { domain, pool, quadruples } => {
            Ok(hyperbolicity(&ctx.domains[domain], *pool, *quadruples, rng))
        }
        CheckSpec::Uniformity { domain, pairs } => Ok(uniformity(&ctx.domains[domain], *pairs, rng)),
        CheckSpec::BhkDiameter { deformation } => bhk_diameter(ctx, &ctx.deformations[deformation].space),
        CheckSpec::BhkComparability { deformation, pool } => {
            bhk_comparability(&ctx.deformations[deformation].space, *pool, rng)
        }
        CheckSpec::BasepointChange { deformations, pool, quadruples } => {
            basepoint_change(ctx, deformations, *pool, *quadruples, rng)
        }
        CheckSpec::Sphericalization { deformation, pool, quadruples, pairs } => {
            sphericalization(ctx, deformation, *pool, *quadruples, *pairs, rng)
        }
        CheckSpec::Theorem1Chain { mapping, lambda, balls, pairs } => {
            theorem1_chain(ctx, &ctx.mappings[mapping], *lambda, *balls, *pairs, rng)
        }
        CheckSpec::Theorem2Chain { mapping, t0, balls, pairs } => {
            theorem2_chain(ctx, &ctx.mappings[mapping], *t0, *balls, *pairs, rng)
        }
        CheckSpec::StepBound { mapping, q, balls, pairs } => {
            step_bound_check(ctx, &ctx.mappings[mapping], *q, *balls, *pairs, rng)
        }
        CheckSpec::Quasimobius { mapping, pool, quadruples, max_slope } => {
            quasimobius(&ctx.mappings[mapping], *pool, *quadruples, *max_slope, rng)
        }
        CheckSpec::GlobalQs { mapping, pairs } => global_qs(ctx, &ctx.mappings[mapping], *pairs, rng),
        CheckSpec::MappingReport { mapping, .. } => mapping_report(&ctx.mappings[mapping], spec, rng),
        CheckSpec::Ledger { .. } => ledger(spec),
    }
}
