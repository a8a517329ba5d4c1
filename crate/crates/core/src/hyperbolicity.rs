//! Gromov products and four-point hyperbolicity estimates.

use log::warn;
use serde::Serialize;

use crate::metric_core::{Ambient, DomainSample, FiniteMetric};
use crate::quasihyperbolic::QuasihyperbolicMetric;

/// `(x|y)_w = (d(x,w) + d(y,w) - d(x,y)) / 2`
pub fn gromov_product<M: FiniteMetric + ?Sized>(m: &M, x: usize, y: usize, w: usize) -> f64 {
    0.5 * (m.dist(x, w) + m.dist(y, w) - m.dist(x, y))
}

fn cross_combination<M: FiniteMetric + ?Sized>(m: &M, x: usize, y: usize, z: usize, u: usize, o: usize) -> f64 {
    gromov_product(m, x, y, o) + gromov_product(m, z, u, o) - gromov_product(m, x, z, o) - gromov_product(m, y, u, o)
}

/// `|[(x|y)+(z|u)-(x|z)-(y|u)]_o - [same]_w|`; zero up to rounding in any metric.
pub fn basepoint_identity_residual<M: FiniteMetric + ?Sized>(
    m: &M,
    x: usize,
    y: usize,
    z: usize,
    u: usize,
    o: usize,
    w: usize,
) -> f64 {
    (cross_combination(m, x, y, z, u, o) - cross_combination(m, x, y, z, u, w)).abs()
}

#[derive(Debug, Clone, Serialize)]
pub struct HyperbolicityReport {
    /// Largest four-point defect seen, clamped at 0 (a lower bound of δ).
    pub delta: f64,
    pub starlikeness_k: Option<f64>,
    pub base_point: Option<usize>,
    pub quadruples_tested: usize,
    pub worst_quadruple: Option<[usize; 4]>,
}

/// `min{(x|z)_w, (z|y)_w} - (x|y)_w` for the quadruple `[x, y, z, w]`.
pub fn four_point_defect<M: FiniteMetric + ?Sized>(m: &M, q: [usize; 4]) -> f64 {
    let [x, y, z, w] = q;
    gromov_product(m, x, z, w).min(gromov_product(m, z, y, w)) - gromov_product(m, x, y, w)
}

pub fn estimate_delta<M: FiniteMetric + ?Sized>(m: &M, quadruples: &[[usize; 4]]) -> HyperbolicityReport {
    if quadruples.is_empty() {
        warn!("estimate_delta: empty quadruple sample, reporting delta = 0");
    }
    let mut report = HyperbolicityReport {
        delta: 0.0,
        starlikeness_k: None,
        base_point: None,
        quadruples_tested: quadruples.len(),
        worst_quadruple: None,
    };
    for &q in quadruples {
        let defect = four_point_defect(m, q);
        if defect > report.delta {
            report.delta = defect;
            report.worst_quadruple = Some(q);
        }
    }
    report
}

/// Exhaustive four-point δ over all quadruples; only for small metrics.
pub fn estimate_delta_exhaustive<M: FiniteMetric + ?Sized>(m: &M) -> HyperbolicityReport {
    let n = m.size();
    assert!(n <= 60, "exhaustive delta is limited to 60 points, got {n}");
    let mut report = HyperbolicityReport {
        delta: 0.0,
        starlikeness_k: None,
        base_point: None,
        quadruples_tested: 0,
        worst_quadruple: None,
    };
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for w in 0..n {
                    report.quadruples_tested += 1;
                    let defect = four_point_defect(m, [x, y, z, w]);
                    if defect > report.delta {
                        report.delta = defect;
                        report.worst_quadruple = Some([x, y, z, w]);
                    }
                }
            }
        }
    }
    report
}

fn nearest_interior_to_boundary(d: &DomainSample, b: usize) -> usize {
    match d.ambient() {
        Ambient::Euclidean => d.nearest_vertex(d.boundary_points()[b]),
        _ => (0..d.num_points())
            .min_by(|&i, &j| {
                let di = d.ambient_to_boundary(i, b).unwrap_or(f64::INFINITY);
                let dj = d.ambient_to_boundary(j, b).unwrap_or(f64::INFINITY);
                di.total_cmp(&dj)
            })
            .unwrap_or(0),
    }
}

/// Rough-starlikeness constant `K` about `w`: the largest quasihyperbolic
/// distance from a vertex to the union of geodesics running from `w` to the
/// vertices nearest each boundary sample.
pub fn estimate_rough_starlikeness(d: &DomainSample, k: &QuasihyperbolicMetric, w: usize) -> f64 {
    if d.num_points() <= 1 {
        return 0.0;
    }
    let tree = k.metric().multi_source(&[(w, 0.0)]);
    let mut on_ray = vec![false; d.num_points()];
    on_ray[w] = true;
    let mut ends: Vec<usize> = (0..d.boundary_count())
        .map(|b| nearest_interior_to_boundary(d, b))
        .collect();
    ends.sort_unstable();
    ends.dedup();
    for end in ends {
        for v in tree.path_to(end) {
            on_ray[v] = true;
        }
    }
    let seeds: Vec<(usize, f64)> = on_ray
        .iter()
        .enumerate()
        .filter(|(_, &on)| on)
        .map(|(v, _)| (v, 0.0))
        .collect();
    k.metric()
        .multi_source(&seeds)
        .dist
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Full report: sampled δ plus rough starlikeness about `w`.
pub fn hyperbolicity_report(
    d: &DomainSample,
    k: &QuasihyperbolicMetric,
    pool: &[usize],
    quadruples: &[[usize; 4]],
    w: usize,
) -> HyperbolicityReport {
    let table = k.table(pool);
    let mut report = estimate_delta(&table, quadruples);
    if let Some(q) = report.worst_quadruple.as_mut() {
        for v in q.iter_mut() {
            *v = pool[*v];
        }
    }
    report.starlikeness_k = Some(estimate_rough_starlikeness(d, k, w));
    report.base_point = Some(w);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_core::DistanceTable;

    fn line(points: &[f64]) -> DistanceTable {
        DistanceTable::from_fn((0..points.len()).collect(), |i, j| (points[i] - points[j]).abs())
    }

    #[test]
    fn gromov_product_examples() {
        let l = line(&[0.0, 10.0, 5.0]);
        assert_eq!(gromov_product(&l, 0, 1, 2), 0.0);
        assert_eq!(gromov_product(&l, 0, 0, 2), 5.0);
        let tri = DistanceTable::from_fn(vec![0, 1, 2], |i, j| {
            if i == j {
                0.0
            } else if i + j == 1 {
                3.0
            } else {
                2.0
            }
        });
        assert_eq!(gromov_product(&tri, 0, 1, 2), 0.5);
    }

    #[test]
    fn residual_zero_when_base_points_agree() {
        let l = line(&[0.0, 1.3, 2.9, 7.1, 4.4]);
        assert_eq!(basepoint_identity_residual(&l, 0, 1, 2, 3, 4, 4), 0.0);
        assert!(basepoint_identity_residual(&l, 0, 0, 2, 2, 1, 4) <= 1e-12);
    }

    #[test]
    fn star_tree_is_zero_hyperbolic() {
        // center 0 with unit edges to leaves 1, 2, 3
        let star = DistanceTable::from_fn(vec![0, 1, 2, 3], |i, j| match (i, j) {
            _ if i == j => 0.0,
            (0, _) | (_, 0) => 1.0,
            _ => 2.0,
        });
        let r = estimate_delta_exhaustive(&star);
        assert!(r.delta.abs() <= 1e-12);
    }

    #[test]
    fn square_corners_have_positive_delta() {
        let c: [[f64; 2]; 4] = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let t = DistanceTable::from_fn(vec![0, 1, 2, 3], |i, j| {
            (c[i][0] - c[j][0]).hypot(c[i][1] - c[j][1])
        });
        // oracle: brute-force all 256 ordered quadruples
        let mut oracle: f64 = 0.0;
        for x in 0..4 {
            for y in 0..4 {
                for z in 0..4 {
                    for w in 0..4 {
                        let g = |a: usize, b: usize| 0.5 * (t.get(a, w) + t.get(b, w) - t.get(a, b));
                        oracle = oracle.max(g(x, z).min(g(z, y)) - g(x, y));
                    }
                }
            }
        }
        assert!((oracle - (2f64.sqrt() - 1.0)).abs() < 1e-12);
        assert_eq!(estimate_delta_exhaustive(&t).delta, oracle);
    }

    #[test]
    fn empty_sample_gives_zero() {
        let r = estimate_delta(&line(&[0.0, 1.0]), &[]);
        assert_eq!(r.delta, 0.0);
    }
}
