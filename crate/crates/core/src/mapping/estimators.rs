use std::collections::BTreeMap;

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use super::MappingPair;
use crate::error::{Error, Result};
use crate::metric_core::{euclid, Ambient, DistanceTable, DomainSample, FiniteMetric, Point};

/// Radii of the probe rings, as fractions of the ball radius.
pub const RING_FRACTIONS: [f64; 4] = [0.25, 0.5, 0.75, 0.99];
/// Probe points per ring.
pub const RING_POINTS: usize = 8;
/// Cap on grid vertices used per ball when no analytic map is available.
const MAX_BALL_VERTICES: usize = 33;

/// Degeneracy threshold `1e-9 * diam`.
pub fn delta_min(diameter: f64) -> f64 {
    1e-9 * diameter
}

/// Points sampled in `B(center, radius)`: the center, then rings.
pub fn ball_probes(center: Point, radius: f64) -> Vec<Point> {
    let mut out = Vec::with_capacity(1 + RING_FRACTIONS.len() * RING_POINTS);
    out.push(center);
    for (ring, &f) in RING_FRACTIONS.iter().enumerate() {
        let r = radius * f;
        for k in 0..RING_POINTS {
            let t = std::f64::consts::TAU * (k as f64 + 0.25 * ring as f64) / RING_POINTS as f64;
            out.push([center[0] + r * t.cos(), center[1] + r * t.sin()]);
        }
    }
    out
}

/// Distances among the points of one ball, before and after the map.
struct Ball {
    center: usize,
    points: Vec<Point>,
    n: usize,
    d: Vec<f64>,
    dp: Vec<f64>,
    /// `d_G(x)` and `d_{G'}(f(x))`.
    dg: f64,
    dgp: f64,
}

impl Ball {
    fn d(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    fn dp(&self, i: usize, j: usize) -> f64 {
        self.dp[i * self.n + j]
    }
}

fn analytic_ball(m: &MappingPair, x: usize, factor: f64) -> Option<Ball> {
    let map = m.map()?;
    let (src, tgt) = (m.source(), m.target());
    if !matches!(tgt.ambient(), Ambient::Euclidean) || src.coords().is_none() {
        return None;
    }
    let dg = src.boundary_distance(x);
    let points: Vec<Point> = ball_probes(src.point(x), factor * dg)
        .into_iter()
        .enumerate()
        .filter(|&(i, p)| i == 0 || src.contains_point(p).unwrap_or(true))
        .map(|(_, p)| p)
        .collect();
    // the center image is the target vertex itself
    let images: Vec<Point> = points
        .iter()
        .enumerate()
        .map(|(i, &p)| if i == 0 { tgt.point(m.forward(x)) } else { map.apply(p) })
        .collect();
    let n = points.len();
    let mut d = vec![0.0; n * n];
    let mut dp = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = euclid(points[i], points[j]);
            dp[i * n + j] = euclid(images[i], images[j]);
        }
    }
    Some(Ball {
        center: x,
        points,
        n,
        d,
        dp,
        dg,
        dgp: tgt.boundary_distance(m.forward(x)),
    })
}

fn vertex_ball(m: &MappingPair, x: usize, factor: f64) -> Ball {
    let (src, tgt) = (m.source(), m.target());
    let dg = src.boundary_distance(x);
    let r = factor * dg;
    let inside: Vec<usize> = match src.ambient() {
        Ambient::Intrinsic => {
            let mut near: Vec<usize> = src
                .length_metric()
                .ball(x, r)
                .into_iter()
                .filter(|&(v, dv)| v != x && dv < r)
                .map(|(v, _)| v)
                .collect();
            near.sort_unstable();
            near
        }
        _ => (0..src.num_points())
            .filter(|&v| v != x && src.ambient_distance(x, v) < r)
            .collect(),
    };
    let stride = inside.len().div_ceil(MAX_BALL_VERTICES - 1).max(1);
    let mut verts = vec![x];
    verts.extend(inside.into_iter().step_by(stride));
    let n = verts.len();
    let images: Vec<usize> = verts.iter().map(|&v| m.forward(v)).collect();
    let d = ambient_block(src, &verts);
    let dp = ambient_block(tgt, &images);
    let points = match src.coords() {
        Some(c) => verts.iter().map(|&v| c[v]).collect(),
        None => Vec::new(),
    };
    Ball {
        center: x,
        points,
        n,
        d,
        dp,
        dg,
        dgp: tgt.boundary_distance(m.forward(x)),
    }
}

/// Row-major ambient distances among `verts`. Intrinsic distances come from
/// searches that stop at the farthest vertex, oriented like
/// [`DomainSample::ambient_distance`] so the values agree bit for bit.
fn ambient_block(d: &DomainSample, verts: &[usize]) -> Vec<f64> {
    let n = verts.len();
    let mut out = vec![0.0; n * n];
    if !matches!(d.ambient(), Ambient::Intrinsic) {
        for i in 0..n {
            for j in (i + 1)..n {
                let a = d.ambient_distance(verts[i], verts[j]);
                out[i * n + j] = a;
                out[j * n + i] = a;
            }
        }
        return out;
    }
    for i in 0..n {
        let later: Vec<usize> = (0..n).filter(|&j| verts[j] > verts[i]).collect();
        let targets: Vec<usize> = later.iter().map(|&j| verts[j]).collect();
        let row = d.length_metric().distances_to(verts[i], &targets);
        for (&j, a) in later.iter().zip(row) {
            out[i * n + j] = a;
            out[j * n + i] = a;
        }
    }
    out
}

fn ball(m: &MappingPair, x: usize, factor: f64) -> Ball {
    analytic_ball(m, x, factor).unwrap_or_else(|| vertex_ball(m, x, factor))
}

/// A point tuple attached to a reported maximum.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct LocalWitness {
    pub center: usize,
    /// Planar coordinates of the tuple, center first (empty for non-planar spaces).
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalEstimate {
    pub constant: f64,
    pub witness: Option<LocalWitness>,
    pub tested: usize,
    pub skipped: usize,
    pub balls: usize,
}

impl LocalEstimate {
    fn neutral() -> Self {
        LocalEstimate {
            constant: 1.0,
            witness: None,
            tested: 0,
            skipped: 0,
            balls: 0,
        }
    }

    fn merge(mut self, other: LocalEstimate) -> Self {
        if other.witness.is_some() && (self.witness.is_none() || other.constant > self.constant) {
            self.constant = other.constant;
            self.witness = other.witness;
        }
        self.tested += other.tested;
        self.skipped += other.skipped;
        self.balls += other.balls;
        self
    }
}

fn witness(b: &Ball, idx: &[usize]) -> LocalWitness {
    LocalWitness {
        center: b.center,
        points: if b.points.is_empty() {
            Vec::new()
        } else {
            idx.iter().map(|&i| b.points[i]).collect()
        },
    }
}

fn check_unit_interval(name: &str, v: f64, closed_top: bool) -> Result<()> {
    let ok = v > 0.0 && (v < 1.0 || (closed_top && v == 1.0));
    if ok {
        Ok(())
    } else {
        let range = if closed_top { "(0, 1]" } else { "(0, 1)" };
        Err(Error::config(format!("{name} must lie in {range}, got {v}")))
    }
}

/// Run `per_ball` over every center in parallel and merge in center order.
fn over_balls(
    m: &MappingPair,
    centers: &[usize],
    factor: f64,
    what: &str,
    per_ball: impl Fn(&Ball, f64) -> LocalEstimate + Sync,
) -> Result<LocalEstimate> {
    let tol = delta_min(m.source().diameter());
    let parts: Vec<LocalEstimate> = centers
        .par_iter()
        .map(|&x| per_ball(&ball(m, x, factor), tol))
        .collect();
    let est = parts.into_iter().fold(LocalEstimate::neutral(), LocalEstimate::merge);
    if est.tested == 0 {
        return Err(Error::NoValidSample(format!(
            "{what}: no valid sample in {} balls of radius factor {factor}; use a larger radius or a finer grid",
            centers.len()
        )));
    }
    if est.skipped > 0 {
        warn!("{what}: skipped {} degenerate samples", est.skipped);
    }
    Ok(est)
}

/// ∂-Lipschitz constant at `λ`: max over `y, z ∈ B(x, λ d_G(x))` of
/// `[d'(f y, f z) / d_{G'}(f x)] / [d(y, z) / d_G(x)]`.
pub fn estimate_partial_lipschitz(m: &MappingPair, lambda: f64, centers: &[usize]) -> Result<LocalEstimate> {
    check_unit_interval("lambda", lambda, false)?;
    over_balls(m, centers, lambda, "partial lipschitz", |b, tol| {
        let mut e = LocalEstimate::neutral();
        e.balls = 1;
        for i in 0..b.n {
            for j in (i + 1)..b.n {
                if b.d(i, j) < tol {
                    e.skipped += 1;
                    continue;
                }
                let r = (b.dp(i, j) / b.dgp) / (b.d(i, j) / b.dg);
                e.tested += 1;
                if e.witness.is_none() || r > e.constant {
                    e.constant = r;
                    e.witness = Some(witness(b, &[0, i, j]));
                }
            }
        }
        e
    })
}

/// ∂-biLipschitz data: the larger of the forward and inverse ∂-Lipschitz constants.
pub fn estimate_partial_bilipschitz(m: &MappingPair, lambda: f64, centers: &[usize]) -> Result<LocalEstimate> {
    let fwd = estimate_partial_lipschitz(m, lambda, centers)?;
    let inv_centers: Vec<usize> = centers.iter().map(|&x| m.forward(x)).collect();
    let inv = estimate_partial_lipschitz(&m.inverse(), lambda, &inv_centers)?;
    Ok(fwd.merge(inv))
}

/// Relative slope `c_1` at `t_0`: max over `y ∈ B(x, t_0 d_G(x))` of
/// `[d'(f x, f y) / d_{G'}(f x)] / [d(x, y) / d_G(x)]`.
pub fn estimate_relative(m: &MappingPair, t0: f64, centers: &[usize]) -> Result<LocalEstimate> {
    check_unit_interval("t0", t0, true)?;
    // t0 = 1 reaches the boundary; probes stay at 0.99 of the radius
    over_balls(m, centers, t0, "relative", |b, tol| {
        let mut e = LocalEstimate::neutral();
        e.balls = 1;
        for j in 1..b.n {
            if b.d(0, j) < tol {
                e.skipped += 1;
                continue;
            }
            let r = (b.dp(0, j) / b.dgp) / (b.d(0, j) / b.dg);
            e.tested += 1;
            if e.witness.is_none() || r > e.constant {
                e.constant = r;
                e.witness = Some(witness(b, &[0, j]));
            }
        }
        e
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalBiLipschitz {
    pub l1: f64,
    /// Per-center median ratio `C_x`.
    pub cx: BTreeMap<usize, f64>,
    pub witness: Option<LocalWitness>,
    pub tested: usize,
    pub skipped: usize,
    pub skipped_balls: usize,
}

/// Local biLipschitz data at `q`: `C_x` is the median of `d'(f y, f z) / d(y, z)`
/// over pairs in `B(x, q d_G(x))`; `L_1` bounds every ratio within `[C_x/L_1, L_1 C_x]`.
pub fn estimate_local_bilipschitz(m: &MappingPair, q: f64, centers: &[usize]) -> Result<LocalBiLipschitz> {
    check_unit_interval("q", q, false)?;
    let tol = delta_min(m.source().diameter());
    let parts: Vec<Option<(f64, f64, Option<LocalWitness>, usize, usize)>> = centers
        .par_iter()
        .map(|&x| {
            let b = ball(m, x, q);
            let mut ratios = Vec::new();
            let mut idx = Vec::new();
            let mut skipped = 0;
            for i in 0..b.n {
                for j in (i + 1)..b.n {
                    if b.d(i, j) < tol || b.dp(i, j) < tol {
                        skipped += 1;
                        continue;
                    }
                    ratios.push(b.dp(i, j) / b.d(i, j));
                    idx.push((i, j));
                }
            }
            if ratios.is_empty() {
                return None;
            }
            let mut sorted = ratios.clone();
            sorted.sort_by(f64::total_cmp);
            let k = sorted.len();
            let cx = if k % 2 == 1 {
                sorted[k / 2]
            } else {
                0.5 * (sorted[k / 2 - 1] + sorted[k / 2])
            };
            let mut l1 = 1.0;
            let mut w = None;
            for (r, &(i, j)) in ratios.iter().zip(&idx) {
                let v = (r / cx).max(cx / r);
                if w.is_none() || v > l1 {
                    l1 = v;
                    w = Some(witness(&b, &[0, i, j]));
                }
            }
            Some((cx, l1, w, ratios.len(), skipped))
        })
        .collect();
    let mut out = LocalBiLipschitz {
        l1: 1.0,
        cx: BTreeMap::new(),
        witness: None,
        tested: 0,
        skipped: 0,
        skipped_balls: 0,
    };
    for (&x, part) in centers.iter().zip(parts) {
        match part {
            None => out.skipped_balls += 1,
            Some((cx, l1, w, tested, skipped)) => {
                out.cx.insert(x, cx);
                if out.witness.is_none() || l1 > out.l1 {
                    out.l1 = l1;
                    out.witness = w;
                }
                out.tested += tested;
                out.skipped += skipped;
            }
        }
    }
    if out.tested == 0 {
        return Err(Error::NoValidSample(format!(
            "local biLipschitz: every ball at q = {q} has fewer than 2 points"
        )));
    }
    Ok(out)
}

/// Linear local quasisymmetry slope at `q`: max over balls and triples
/// `(x, a, b)` in the ball of `[d'(fx, fa) / d'(fx, fb)] / [d(x, a) / d(x, b)]`.
pub fn estimate_local_quasisymmetry(m: &MappingPair, q: f64, centers: &[usize]) -> Result<LocalEstimate> {
    check_unit_interval("q", q, false)?;
    over_balls(m, centers, q, "local quasisymmetry", |b, tol| {
        let mut e = LocalEstimate::neutral();
        e.balls = 1;
        for i in 0..b.n {
            // the best triple at i pairs the largest and smallest ratio d'/d
            let mut hi: Option<(f64, usize)> = None;
            let mut lo: Option<(f64, usize)> = None;
            let mut valid = 0usize;
            for j in 0..b.n {
                if j == i {
                    continue;
                }
                if b.d(i, j) < tol || b.dp(i, j) < tol {
                    e.skipped += 1;
                    continue;
                }
                valid += 1;
                let r = b.dp(i, j) / b.d(i, j);
                if hi.is_none_or(|(v, _)| r > v) {
                    hi = Some((r, j));
                }
                if lo.is_none_or(|(v, _)| r < v) {
                    lo = Some((r, j));
                }
            }
            if valid < 2 {
                continue;
            }
            let ((rh, a), (rl, c)) = (hi.unwrap(), lo.unwrap());
            e.tested += valid * (valid - 1);
            let s = if a == c { 1.0 } else { rh / rl };
            if e.witness.is_none() || s > e.constant {
                e.constant = s;
                e.witness = Some(witness(b, &[i, a, c]));
            }
        }
        e
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PairEstimate {
    pub constant: f64,
    pub worst_pair: Option<(usize, usize)>,
    pub tested: usize,
    pub skipped: usize,
}

/// Non-degenerate pairs, their `k` and `k'` distances, and the skip count.
type KPairs = (Vec<(usize, usize)>, Vec<f64>, Vec<f64>, usize);

fn k_pairs(m: &MappingPair, pairs: &[(usize, usize)]) -> KPairs {
    let valid: Vec<(usize, usize)> = pairs.iter().copied().filter(|(x, y)| x != y).collect();
    let skipped = pairs.len() - valid.len();
    let images: Vec<(usize, usize)> = valid.iter().map(|&(x, y)| (m.forward(x), m.forward(y))).collect();
    let k = m.source_k().pair_distances(&valid);
    let kp = m.target_k().pair_distances(&images);
    (valid, k, kp, skipped)
}

fn max_over_pairs(valid: &[(usize, usize)], values: impl Iterator<Item = f64>, skipped: usize) -> PairEstimate {
    let mut e = PairEstimate {
        constant: 1.0,
        worst_pair: None,
        tested: valid.len(),
        skipped,
    };
    for (&p, v) in valid.iter().zip(values) {
        if e.worst_pair.is_none() || v > e.constant {
            e.constant = v;
            e.worst_pair = Some(p);
        }
    }
    e
}

/// Linear semisolid slope `c_2 = max k'(f x, f y) / k(x, y)`.
pub fn estimate_semisolid(m: &MappingPair, pairs: &[(usize, usize)]) -> PairEstimate {
    semisolid_from(&k_pairs(m, pairs))
}

fn semisolid_from((valid, k, kp, skipped): &KPairs) -> PairEstimate {
    max_over_pairs(valid, k.iter().zip(kp).map(|(a, b)| b / a), *skipped)
}

/// Quasihyperbolic biLipschitz constant `M`, both directions.
pub fn estimate_qh_bilipschitz(m: &MappingPair, pairs: &[(usize, usize)]) -> PairEstimate {
    qh_bilipschitz_from(&k_pairs(m, pairs))
}

fn qh_bilipschitz_from((valid, k, kp, skipped): &KPairs) -> PairEstimate {
    max_over_pairs(valid, k.iter().zip(kp).map(|(a, b)| (b / a).max(a / b)), *skipped)
}

#[derive(Debug, Clone, Serialize)]
pub struct QuasiIsometry {
    /// Slope at additive constant 0.
    pub l: f64,
    /// Additive constant at slope 1.
    pub c: f64,
    pub tested: usize,
    pub skipped: usize,
}

/// Quasi-isometry fits for `k' ∘ f` against `k`.
pub fn estimate_quasi_isometry(m: &MappingPair, pairs: &[(usize, usize)]) -> QuasiIsometry {
    quasi_isometry_from(&k_pairs(m, pairs))
}

fn quasi_isometry_from((valid, k, kp, skipped): &KPairs) -> QuasiIsometry {
    let mut qi = QuasiIsometry {
        l: 1.0,
        c: 0.0,
        tested: valid.len(),
        skipped: *skipped,
    };
    for (a, b) in k.iter().zip(kp) {
        qi.c = qi.c.max((b - a).abs());
        qi.l = qi.l.max((b / a).max(a / b));
    }
    qi
}

#[derive(Debug, Clone, Serialize)]
pub struct StepBoundViolation {
    pub x: usize,
    pub y: usize,
    pub k: f64,
    pub k_image: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepBoundReport {
    pub t1: f64,
    pub bound: f64,
    pub tested: usize,
    pub max_image: f64,
    pub violations: Vec<StepBoundViolation>,
}

/// Check `k'(f x, f y) <= bound` for every vertex `y` with `0 < k(x, y) <= t_1`,
/// `x` ranging over `centers`.
pub fn verify_step_bound(m: &MappingPair, t1: f64, bound: f64, centers: &[usize]) -> StepBoundReport {
    let parts: Vec<(usize, f64, Vec<StepBoundViolation>)> = centers
        .par_iter()
        .map(|&x| {
            let near: Vec<(usize, f64)> = m.source_k().metric().ball(x, t1).into_iter().filter(|&(y, _)| y != x).collect();
            let images: Vec<usize> = near.iter().map(|&(y, _)| m.forward(y)).collect();
            let img = m.target_k().metric().distances_to(m.forward(x), &images);
            let mut tested = 0;
            let mut max_image: f64 = 0.0;
            let mut bad = Vec::new();
            for (&(y, k), &kp) in near.iter().zip(&img) {
                tested += 1;
                max_image = max_image.max(kp);
                if kp > bound {
                    bad.push(StepBoundViolation { x, y, k, k_image: kp });
                }
            }
            (tested, max_image, bad)
        })
        .collect();
    let mut r = StepBoundReport {
        t1,
        bound,
        tested: 0,
        max_image: 0.0,
        violations: Vec::new(),
    };
    for (t, mx, bad) in parts {
        r.tested += t;
        r.max_image = r.max_image.max(mx);
        r.violations.extend(bad);
    }
    r
}

/// Cross-ratio `d(x,z) d(y,w) / (d(x,y) d(z,w))`.
pub fn cross_ratio<M: FiniteMetric + ?Sized>(m: &M, q: [usize; 4]) -> f64 {
    let [x, y, z, w] = q;
    m.dist(x, z) * m.dist(y, w) / (m.dist(x, y) * m.dist(z, w))
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeReport {
    /// Linear envelope `max(cr'/cr, cr/cr')`.
    pub slope: f64,
    pub worst: Option<[usize; 4]>,
    pub tested: usize,
    pub skipped: usize,
    /// `(cr, cr')` per tested quadruple, in input order.
    #[serde(skip)]
    pub scatter: Vec<(f64, f64)>,
}

/// Linear quasimöbius envelope of the identity from `src` to `dst` on quadruples
/// of table indices. Quadruples with a distance below `1e-9 * diam` in either
/// table are skipped.
pub fn cross_ratio_slope(src: &DistanceTable, dst: &DistanceTable, quadruples: &[[usize; 4]]) -> SlopeReport {
    let (t0, t1) = (delta_min(src.diameter()), delta_min(dst.diameter()));
    let mut r = SlopeReport {
        slope: 1.0,
        worst: None,
        tested: 0,
        skipped: 0,
        scatter: Vec::with_capacity(quadruples.len()),
    };
    for &q in quadruples {
        let [x, y, z, w] = q;
        let degenerate = [(x, y), (z, w), (x, z), (y, w)]
            .iter()
            .any(|&(a, b)| src.get(a, b) < t0 || dst.get(a, b) < t1);
        if degenerate {
            r.skipped += 1;
            continue;
        }
        let (a, b) = (cross_ratio(src, q), cross_ratio(dst, q));
        r.tested += 1;
        r.scatter.push((a, b));
        let s = (b / a).max(a / b);
        if r.worst.is_none() || s > r.slope {
            r.slope = s;
            r.worst = Some(q);
        }
    }
    if r.skipped > 0 {
        warn!("cross-ratio slope: skipped {} degenerate quadruples", r.skipped);
    }
    r
}

/// Quasimöbius envelope of `f` on quadruples drawn from `points` (indices into
/// `points`), using ambient distances on both sides.
pub fn estimate_quasimobius(m: &MappingPair, points: &[usize], quadruples: &[[usize; 4]]) -> SlopeReport {
    let (src, tgt) = (m.source(), m.target());
    let images: Vec<usize> = points.iter().map(|&x| m.forward(x)).collect();
    let t0 = ambient_table(src, points);
    let t1 = ambient_table(tgt, &images);
    let mut r = cross_ratio_slope(&t0, &t1, quadruples);
    if let Some(q) = r.worst.as_mut() {
        for v in q.iter_mut() {
            *v = points[*v];
        }
    }
    r
}

/// Ambient distances among `points`.
pub fn ambient_table(d: &DomainSample, points: &[usize]) -> DistanceTable {
    match d.ambient() {
        Ambient::Intrinsic => d.length_metric().table(points),
        _ => DistanceTable::from_fn(points.to_vec(), |i, j| d.ambient_distance(points[i], points[j])),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GlobalQsHypotheses {
    pub c0: f64,
    /// Deepest source vertex and its image.
    pub w: usize,
    pub w_image: usize,
    pub diameter: f64,
    pub target_diameter: f64,
}

/// Diameter of the closure: analytic when the shape knows it.
pub fn closure_diameter(d: &DomainSample) -> f64 {
    d.shape().and_then(|s| s.shape.diameter()).unwrap_or_else(|| d.diameter())
}

/// `C_0 = max(diam G / d_G(w), diam G' / d_{G'}(f w))` with `w` the deepest
/// source vertex. Refuses unbounded spaces.
pub fn check_global_qs_hypotheses(m: &MappingPair) -> Result<GlobalQsHypotheses> {
    let (src, tgt) = (m.source(), m.target());
    for d in [src, tgt] {
        if !d.is_bounded() {
            return Err(Error::Unbounded(format!(
                "{} is unbounded; sphericalize it before global checks",
                d.label()
            )));
        }
    }
    let w = src.deepest_vertex();
    let wi = m.forward(w);
    let (diam, diam_t) = (closure_diameter(src), closure_diameter(tgt));
    Ok(GlobalQsHypotheses {
        c0: (diam / src.boundary_distance(w)).max(diam_t / tgt.boundary_distance(wi)),
        w,
        w_image: wi,
        diameter: diam,
        target_diameter: diam_t,
    })
}

/// All estimator outputs for one map.
#[derive(Debug, Clone, Serialize)]
pub struct MappingClassReport {
    pub partial_lipschitz: Option<LocalEstimate>,
    pub relative: Option<LocalEstimate>,
    pub semisolid: Option<PairEstimate>,
    pub local_bilipschitz: Option<LocalBiLipschitz>,
    pub local_quasisymmetry: Option<LocalEstimate>,
    pub qh_bilipschitz: Option<PairEstimate>,
    pub quasi_isometry: Option<QuasiIsometry>,
    pub quasimobius: Option<SlopeReport>,
    pub global_qs: Option<GlobalQsHypotheses>,
    pub skipped_degenerate: usize,
}

/// Parameters for [`mapping_class_report`].
#[derive(Debug, Clone)]
pub struct ReportParams {
    pub lambda: f64,
    pub t0: f64,
    pub q: f64,
    pub centers: Vec<usize>,
    pub pairs: Vec<(usize, usize)>,
    pub points: Vec<usize>,
    pub quadruples: Vec<[usize; 4]>,
}

/// Run every estimator. Bounded-only checks are left empty for unbounded spaces.
pub fn mapping_class_report(m: &MappingPair, p: &ReportParams) -> Result<MappingClassReport> {
    let partial = estimate_partial_bilipschitz(m, p.lambda, &p.centers)?;
    let relative = estimate_relative(m, p.t0, &p.centers)?;
    let local = estimate_local_bilipschitz(m, p.q, &p.centers)?;
    let lqs = estimate_local_quasisymmetry(m, p.q, &p.centers)?;
    let kp = k_pairs(m, &p.pairs);
    let semisolid = semisolid_from(&kp);
    let qh = qh_bilipschitz_from(&kp);
    let qi = quasi_isometry_from(&kp);
    let qm = estimate_quasimobius(m, &p.points, &p.quadruples);
    let global = match check_global_qs_hypotheses(m) {
        Ok(g) => Some(g),
        Err(Error::Unbounded(_)) => None,
        Err(e) => return Err(e),
    };
    let skipped_degenerate = partial.skipped + relative.skipped + local.skipped + lqs.skipped + qh.skipped + qm.skipped;
    Ok(MappingClassReport {
        partial_lipschitz: Some(partial),
        relative: Some(relative),
        semisolid: Some(semisolid),
        local_bilipschitz: Some(local),
        local_quasisymmetry: Some(lqs),
        qh_bilipschitz: Some(qh),
        quasi_isometry: Some(qi),
        quasimobius: Some(qm),
        global_qs: global,
        skipped_degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::{builtin_mapping, PlaneMap};
    use crate::metric_core::{build_grid_domain, ShapeSpec};
    use crate::quasihyperbolic::QuasihyperbolicMetric;
    use crate::sampling::{rng, sample_distinct_tuples, sample_pairs, sample_vertices};
    use std::sync::Arc;

    fn disk_map(map: PlaneMap, target: ShapeSpec, h: f64) -> MappingPair {
        let d = Arc::new(build_grid_domain(&ShapeSpec::disk(1.0, h)).unwrap());
        builtin_mapping("f", map, Arc::new(QuasihyperbolicMetric::new(d)), &target).unwrap()
    }

    #[test]
    fn probes_lie_in_ball() {
        let p = ball_probes([0.1, 0.2], 0.3);
        assert_eq!(p.len(), 33);
        assert!(p.iter().all(|&q| euclid(q, [0.1, 0.2]) < 0.3));
    }

    #[test]
    fn identity_is_neutral() {
        let m = disk_map(PlaneMap::Identity, ShapeSpec::disk(1.0, 0.05), 0.05);
        let n = m.source().num_points();
        let mut r = rng(3);
        let centers = sample_vertices(n, 40, &mut r);
        let pairs = sample_pairs(n, 300, &mut r);
        assert_eq!(estimate_partial_bilipschitz(&m, 0.3, &centers).unwrap().constant, 1.0);
        assert_eq!(estimate_relative(&m, 0.3, &centers).unwrap().constant, 1.0);
        let lb = estimate_local_bilipschitz(&m, 0.3, &centers).unwrap();
        assert_eq!(lb.l1, 1.0);
        assert!(lb.cx.values().all(|&c| c == 1.0));
        assert_eq!(estimate_local_quasisymmetry(&m, 0.3, &centers).unwrap().constant, 1.0);
        assert_eq!(estimate_semisolid(&m, &pairs).constant, 1.0);
        assert_eq!(estimate_qh_bilipschitz(&m, &pairs).constant, 1.0);
        let qi = estimate_quasi_isometry(&m, &pairs);
        assert_eq!((qi.l, qi.c), (1.0, 0.0));
        let quads = sample_distinct_tuples::<4, _>(centers.len(), 200, &mut r);
        assert_eq!(estimate_quasimobius(&m, &centers, &quads).slope, 1.0);
    }

    #[test]
    fn similarity_by_two_is_neutral_with_doubled_cx() {
        let f = PlaneMap::Similarity { scale: 2.0, translation: [0.0, 0.0] };
        let m = disk_map(f, ShapeSpec::disk(2.0, 0.1), 0.05);
        let centers = sample_vertices(m.source().num_points(), 30, &mut rng(5));
        assert_eq!(estimate_partial_lipschitz(&m, 0.3, &centers).unwrap().constant, 1.0);
        let lb = estimate_local_bilipschitz(&m, 0.3, &centers).unwrap();
        assert_eq!(lb.l1, 1.0);
        assert!(lb.cx.values().all(|&c| c == 2.0));
    }

    #[test]
    fn global_hypotheses_on_unit_disk() {
        let m = disk_map(PlaneMap::Identity, ShapeSpec::disk(1.0, 0.05), 0.05);
        let g = check_global_qs_hypotheses(&m).unwrap();
        assert_eq!(m.source().point(g.w), [0.0, 0.0]);
        assert!((g.c0 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn relative_below_partial_lipschitz() {
        let f = PlaneMap::DiskAutomorphism { a: [0.5, 0.0] };
        let m = disk_map(f, ShapeSpec::disk(1.0, 0.05), 0.05);
        let centers = sample_vertices(m.source().num_points(), 50, &mut rng(9));
        let l = estimate_partial_lipschitz(&m, 0.2, &centers).unwrap().constant;
        let c1 = estimate_relative(&m, 0.2, &centers).unwrap().constant;
        assert!(c1 <= l);
        assert!(l > 1.0 && l.is_finite());
    }

    #[test]
    fn quasisymmetry_bounded_by_square_of_l1() {
        let f = PlaneMap::DiskAutomorphism { a: [0.5, 0.0] };
        let m = disk_map(f, ShapeSpec::disk(1.0, 0.05), 0.05);
        let centers = sample_vertices(m.source().num_points(), 50, &mut rng(2));
        let l1 = estimate_local_bilipschitz(&m, 0.3, &centers).unwrap().l1;
        let s = estimate_local_quasisymmetry(&m, 0.3, &centers).unwrap().constant;
        assert!(s <= l1 * l1 * (1.0 + 1e-12));
    }

    #[test]
    fn invalid_parameters_rejected() {
        let m = disk_map(PlaneMap::Identity, ShapeSpec::disk(1.0, 0.1), 0.1);
        assert!(estimate_partial_lipschitz(&m, 1.0, &[0]).unwrap_err().is_config());
        assert!(estimate_relative(&m, 1.5, &[0]).is_err());
        assert!(estimate_local_bilipschitz(&m, 0.0, &[0]).is_err());
    }

    #[test]
    fn cross_ratio_example() {
        // collinear 0, 1, 2, 3: d(x,z) d(y,w) / (d(x,y) d(z,w)) = 2*2/(1*1)
        let t = DistanceTable::from_fn(vec![0, 1, 2, 3], |i, j| (i as f64 - j as f64).abs());
        assert_eq!(cross_ratio(&t, [0, 1, 2, 3]), 4.0);
    }
}
