//! Dense distance tables over finite point samples and metric-axiom checks.

use rand::Rng;
use serde::Serialize;

/// Anything that can report pairwise distances on `0..size()`.
pub trait FiniteMetric {
    fn size(&self) -> usize;
    fn dist(&self, i: usize, j: usize) -> f64;
}

/// Symmetric dense matrix of distances between labelled sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTable {
    labels: Vec<usize>,
    data: Vec<f64>,
}

impl DistanceTable {
    pub fn from_fn(labels: Vec<usize>, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let n = labels.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = f(i, j);
            }
        }
        Self { labels, data }
    }

    /// Vertex labels of the rows, in order.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.labels.len() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let n = self.labels.len();
        self.data[i * n + j] = v;
    }

    pub fn diameter(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Floyd–Warshall closure: the chain (path) metric induced by the table.
    pub fn chain_closure(&self) -> DistanceTable {
        let n = self.len();
        let mut d = self.data.clone();
        for k in 0..n {
            for i in 0..n {
                let dik = d[i * n + k];
                if !dik.is_finite() {
                    continue;
                }
                for j in 0..n {
                    let via = dik + d[k * n + j];
                    if via < d[i * n + j] {
                        d[i * n + j] = via;
                    }
                }
            }
        }
        // enforce exact symmetry
        for i in 0..n {
            for j in (i + 1)..n {
                let m = d[i * n + j].min(d[j * n + i]);
                d[i * n + j] = m;
                d[j * n + i] = m;
            }
        }
        DistanceTable {
            labels: self.labels.clone(),
            data: d,
        }
    }
}

impl FiniteMetric for DistanceTable {
    fn size(&self) -> usize {
        self.len()
    }
    fn dist(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomKind {
    Symmetry,
    Identity,
    Separation,
    Triangle,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomViolation {
    pub kind: AxiomKind,
    /// Row indices of the offending triple.
    pub points: [usize; 3],
    pub excess: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AxiomReport {
    pub tested: usize,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Test symmetry, identity, separation and the triangle inequality on random triples.
///
/// The triangle tolerance scales as `tol * (1 + d(i,j) + d(j,k))`.
pub fn check_metric_axioms<M: FiniteMetric + ?Sized, R: Rng>(
    metric: &M,
    triples: usize,
    tol: f64,
    rng: &mut R,
) -> AxiomReport {
    let n = metric.size();
    let mut report = AxiomReport::default();
    if n == 0 {
        return report;
    }
    for _ in 0..triples {
        let (i, j, k) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        report.tested += 1;
        let dij = metric.dist(i, j);
        let dji = metric.dist(j, i);
        let djk = metric.dist(j, k);
        let dik = metric.dist(i, k);
        let mut push = |kind, excess: f64| {
            report.violations.push(AxiomViolation {
                kind,
                points: [i, j, k],
                excess,
            })
        };
        if (dij - dji).abs() > tol {
            push(AxiomKind::Symmetry, (dij - dji).abs());
        }
        let dii = metric.dist(i, i);
        if dii.abs() > tol {
            push(AxiomKind::Identity, dii.abs());
        }
        if i != j && dij <= tol {
            push(AxiomKind::Separation, tol - dij);
        }
        let excess = dik - (dij + djk);
        if excess > tol * (1.0 + dij + djk) {
            push(AxiomKind::Triangle, excess);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn chain_closure_repairs_triangle() {
        let raw = [[0.0, 1.0, 5.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]];
        let t = DistanceTable::from_fn(vec![0, 1, 2], |i, j| raw[i][j]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(!check_metric_axioms(&t, 200, 1e-12, &mut rng).passed());
        let c = t.chain_closure();
        assert_eq!(c.get(0, 2), 2.0);
        assert!(check_metric_axioms(&c, 200, 1e-12, &mut rng).passed());
    }

    #[test]
    fn asymmetric_table_is_flagged() {
        let t = DistanceTable::from_fn(vec![0, 1], |i, j| if i < j { 1.0 } else if i > j { 2.0 } else { 0.0 });
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = check_metric_axioms(&t, 100, 1e-12, &mut rng);
        assert!(r.violations.iter().any(|v| v.kind == AxiomKind::Symmetry));
    }
}
