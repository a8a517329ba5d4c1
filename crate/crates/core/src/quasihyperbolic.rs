//! The quasihyperbolic metric `k_G` as a density-weighted shortest-path metric.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::metric_core::{dijkstra, DistanceTable, DomainSample, GraphMetric};

/// Shortest-path metric with density `1 / d_G` over a [`DomainSample`].
///
/// Each edge `(u, v)` of length `l` weighs `l (1/d_G(u) + 1/d_G(v)) / 2`.
#[derive(Debug)]
pub struct QuasihyperbolicMetric {
    base: Arc<DomainSample>,
    metric: GraphMetric,
}

impl QuasihyperbolicMetric {
    pub fn new(base: Arc<DomainSample>) -> Self {
        let g = base.graph().clone();
        let weights = g
            .slot_iter()
            .map(|(u, v, s)| {
                g.lengths()[s] * 0.5 * (1.0 / base.boundary_distance(u) + 1.0 / base.boundary_distance(v))
            })
            .collect();
        Self {
            metric: GraphMetric::new(g, weights),
            base,
        }
    }

    pub fn base(&self) -> &Arc<DomainSample> {
        &self.base
    }

    pub fn metric(&self) -> &GraphMetric {
        &self.metric
    }

    /// Quasihyperbolic weight of each CSR slot.
    pub fn edge_weights(&self) -> &[f64] {
        self.metric.weights()
    }

    pub fn distance(&self, x: usize, y: usize) -> f64 {
        self.metric.distance(x, y)
    }

    /// Discrete quasihyperbolic geodesic from `x` to `y` (lowest-index tie-breaking).
    pub fn geodesic(&self, x: usize, y: usize) -> Vec<usize> {
        self.metric.path(x, y)
    }

    pub fn pair_distances(&self, pairs: &[(usize, usize)]) -> Vec<f64> {
        self.metric.pair_distances(pairs)
    }

    pub fn table(&self, points: &[usize]) -> DistanceTable {
        self.metric.table(points)
    }
}

pub fn qh_distance(k: &QuasihyperbolicMetric, x: usize, y: usize) -> f64 {
    k.distance(x, y)
}

pub fn qh_geodesic(k: &QuasihyperbolicMetric, x: usize, y: usize) -> Vec<usize> {
    k.geodesic(x, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaBInequality {
    /// `d(x,y) <= (e^k - 1) d_G(x)`
    ExpUpper,
    /// `d(x,y) / (2 d_G(x)) <= k`
    LinearLower,
    /// `k <= 3c d(x,y) / d_G(x)`
    LinearUpper,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaBViolation {
    pub x: usize,
    pub y: usize,
    pub inequality: LemmaBInequality,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct LemmaBReport {
    pub tested: usize,
    /// Pairs that met the hypothesis of the two-sided linear comparison.
    pub linear_tested: usize,
    pub violations: Vec<LemmaBViolation>,
}

/// Check the exponential and linear comparisons between `k`, `d` and `d_G`.
/// Right-hand sides are multiplied by `slack`.
pub fn verify_lemma_b(k: &QuasihyperbolicMetric, pairs: &[(usize, usize)], slack: f64) -> LemmaBReport {
    let d = k.base();
    let c = d.quasiconvexity();
    let ks = k.pair_distances(pairs);
    let mut report = LemmaBReport::default();
    for (&(x, y), &kxy) in pairs.iter().zip(&ks) {
        report.tested += 1;
        let dxy = d.ambient_distance(x, y);
        let dg = d.boundary_distance(x);
        let mut check = |inequality, lhs: f64, rhs: f64| {
            if lhs > rhs {
                report.violations.push(LemmaBViolation { x, y, inequality, lhs, rhs });
            }
        };
        check(LemmaBInequality::ExpUpper, dxy, kxy.exp_m1() * dg * slack);
        if dxy <= dg / (3.0 * c) || kxy <= 1.0 {
            report.linear_tested += 1;
            check(LemmaBInequality::LinearLower, 0.5 * dxy / dg, kxy * slack);
            check(LemmaBInequality::LinearUpper, kxy, 3.0 * c * dxy / dg * slack);
        }
    }
    report
}

#[derive(Debug, Clone, Serialize)]
pub struct UniformityEntry {
    pub x: usize,
    pub y: usize,
    /// `ℓ(γ) / d(x, y)`
    pub length_ratio: f64,
    /// `max_z min{ℓ(γ[x,z]), ℓ(γ[z,y])} / d_G(z)`
    pub cigar_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct UniformityReport {
    pub constant_a: f64,
    pub worst_pair: Option<(usize, usize)>,
    pub entries: Vec<UniformityEntry>,
}

/// Uniformity constant of the quasihyperbolic geodesics joining the given pairs.
pub fn estimate_uniformity(d: &DomainSample, k: &QuasihyperbolicMetric, pairs: &[(usize, usize)]) -> UniformityReport {
    let mut by_source: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &(x, y)) in pairs.iter().enumerate() {
        if x != y {
            by_source.entry(x).or_default().push(i);
        }
    }
    let graph = d.graph();
    let groups: Vec<(usize, Vec<usize>)> = by_source.into_iter().collect();
    let mut entries: Vec<(usize, UniformityEntry)> = groups
        .par_iter()
        .flat_map_iter(|(x, idx)| {
            let tree = dijkstra(graph, k.edge_weights(), &[(*x, 0.0)]);
            idx.iter()
                .map(|&i| {
                    let y = pairs[i].1;
                    let path = tree.path_to(y);
                    let mut cum = Vec::with_capacity(path.len());
                    let mut acc = 0.0;
                    cum.push(0.0);
                    for w in path.windows(2) {
                        let s = graph.slot_between(w[0], w[1]).unwrap();
                        acc += graph.lengths()[s];
                        cum.push(acc);
                    }
                    let total = acc;
                    let cigar = path
                        .iter()
                        .zip(&cum)
                        .map(|(&z, &l)| l.min(total - l) / d.boundary_distance(z))
                        .fold(0.0, f64::max);
                    (
                        i,
                        UniformityEntry {
                            x: *x,
                            y,
                            length_ratio: total / d.ambient_distance(*x, y),
                            cigar_ratio: cigar,
                        },
                    )
                })
                .collect::<Vec<_>>()
        })
        .collect();
    entries.sort_by_key(|e| e.0);
    let entries: Vec<UniformityEntry> = entries.into_iter().map(|e| e.1).collect();
    let mut worst: Option<(f64, (usize, usize))> = None;
    for e in &entries {
        let a = e.length_ratio.max(e.cigar_ratio);
        if worst.map_or(true, |w| a > w.0) {
            worst = Some((a, (e.x, e.y)));
        }
    }
    UniformityReport {
        constant_a: worst.map_or(1.0, |w| w.0.max(1.0)),
        worst_pair: worst.map(|w| w.1),
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_core::{build_grid_domain, ShapeSpec};

    fn disk(h: f64) -> Arc<DomainSample> {
        Arc::new(build_grid_domain(&ShapeSpec::disk(1.0, h)).unwrap())
    }

    #[test]
    fn edge_weight_is_trapezoid() {
        let d = disk(0.1);
        let k = QuasihyperbolicMetric::new(d.clone());
        for (u, v, s) in d.graph().slot_iter().take(50) {
            let expect = d.graph().lengths()[s] * (1.0 / d.boundary_distance(u) + 1.0 / d.boundary_distance(v)) / 2.0;
            assert_eq!(k.edge_weights()[s], expect);
        }
    }

    #[test]
    fn self_distance_and_single_vertex_geodesic() {
        let k = QuasihyperbolicMetric::new(disk(0.1));
        assert_eq!(k.distance(7, 7), 0.0);
        assert_eq!(k.geodesic(7, 7), vec![7]);
    }

    #[test]
    fn lemma_b_on_disk_radius() {
        let d = disk(0.02);
        let o = d.nearest_vertex([0.0, 0.0]);
        let y = d.nearest_vertex([0.5, 0.0]);
        let k = QuasihyperbolicMetric::new(d.clone());
        let kv = k.distance(o, y);
        assert!((kv - 2f64.ln()).abs() / 2f64.ln() < 0.02);
        let r = verify_lemma_b(&k, &[(o, y), (o, o)], 1.05);
        assert!(r.violations.is_empty());
        assert_eq!(r.linear_tested, 2);
    }

    #[test]
    fn lemma_b_empty_pairs() {
        let k = QuasihyperbolicMetric::new(disk(0.1));
        let r = verify_lemma_b(&k, &[], 1.05);
        assert_eq!(r.tested, 0);
        assert!(r.violations.is_empty());
    }

    #[test]
    fn uniformity_skips_identical_pairs() {
        let d = disk(0.05);
        let k = QuasihyperbolicMetric::new(d.clone());
        let a = estimate_uniformity(&d, &k, &[(3, 40), (100, 200)]);
        let b = estimate_uniformity(&d, &k, &[(3, 40), (5, 5), (100, 200)]);
        assert_eq!(a.constant_a, b.constant_a);
        assert_eq!(b.entries.len(), 2);
    }
}
