//! Conformal deformations: the BHK uniformizing density `e^{-ε k(x,w)}` and
//! sphericalization about a boundary point.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperbolicity::gromov_product;
use crate::mapping::{cross_ratio_slope, SlopeReport};
use crate::metric_core::{euclid, Ambient, DistanceTable, DomainParts, DomainSample, GraphMetric, Point};
use crate::quasihyperbolic::QuasihyperbolicMetric;

#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeformationParams {
    /// Density `e^{-ε k(x, w)}` on `(G, k)`, `w` an interior vertex.
    Bhk { base_point: usize, epsilon: f64 },
    /// Sphericalization about boundary sample `base_point`.
    Sphericalization { base_point: usize },
}

impl DeformationParams {
    pub fn validate(&self, base: &DomainSample) -> Result<()> {
        match *self {
            DeformationParams::Bhk { base_point, epsilon } => {
                if !(epsilon > 0.0 && epsilon < 1.0) {
                    return Err(Error::config(format!("epsilon must lie in (0, 1), got {epsilon}")));
                }
                if base_point >= base.num_points() {
                    return Err(Error::config(format!("bhk base point {base_point} is not an interior vertex")));
                }
            }
            DeformationParams::Sphericalization { base_point } => {
                if base_point >= base.boundary_count() {
                    return Err(Error::config(format!(
                        "sphericalization point {base_point} is not a boundary sample"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `ρ_{w,ε}(x) = e^{-ε k(x, w)}`
pub fn bhk_density(k: &QuasihyperbolicMetric, x: usize, w: usize, epsilon: f64) -> f64 {
    (-epsilon * k.distance(x, w)).exp()
}

#[derive(Debug)]
enum Kind {
    Bhk {
        qh: Arc<QuasihyperbolicMetric>,
        w: usize,
        epsilon: f64,
        density: Vec<f64>,
    },
    Sphere {
        /// `d(x, p)` for every interior vertex.
        to_pole: Vec<f64>,
    },
}

/// A metric space obtained from a [`DomainSample`] by a conformal deformation.
#[derive(Debug)]
pub struct DeformedSpace {
    params: DeformationParams,
    base: Arc<DomainSample>,
    kind: Kind,
    metric: GraphMetric,
    boundary_distance: Vec<f64>,
}

impl DeformedSpace {
    /// BHK deformation of `(G, k)` about interior vertex `w`.
    ///
    /// Edges weigh their quasihyperbolic weight times the trapezoid average of
    /// the density. Boundary distance is `min_v [d_ε(x, v) + ρ(v)/ε]`, the
    /// second term being the density integral along a ray escaping from `v`.
    pub fn bhk(qh: Arc<QuasihyperbolicMetric>, w: usize, epsilon: f64) -> Result<Self> {
        let base = qh.base().clone();
        let params = DeformationParams::Bhk { base_point: w, epsilon };
        params.validate(&base)?;
        let from_w = qh.metric().multi_source(&[(w, 0.0)]);
        let density: Vec<f64> = from_w.dist.iter().map(|&k| (-epsilon * k).exp()).collect();
        let g = base.graph().clone();
        let weights = g
            .slot_iter()
            .map(|(u, v, s)| qh.edge_weights()[s] * 0.5 * (density[u] + density[v]))
            .collect();
        let metric = GraphMetric::new(g, weights);
        let seeds: Vec<(usize, f64)> = density.iter().enumerate().map(|(v, r)| (v, r / epsilon)).collect();
        let boundary_distance = metric.multi_source(&seeds).dist;
        Ok(Self {
            params,
            base,
            kind: Kind::Bhk { qh, w, epsilon, density },
            metric,
            boundary_distance,
        })
    }

    /// Sphericalization about boundary sample `p`: quasimetric
    /// `ŝ(x,y) = d(x,y) / ((1 + d(x,p)) (1 + d(y,p)))`, metrized by chains.
    pub fn sphericalize(base: Arc<DomainSample>, p: usize) -> Result<Self> {
        let params = DeformationParams::Sphericalization { base_point: p };
        params.validate(&base)?;
        if matches!(base.ambient(), Ambient::Intrinsic) {
            return Err(Error::config("sphericalization needs an explicit ambient metric"));
        }
        let n = base.num_points();
        let to_pole: Vec<f64> = (0..n).map(|x| base.ambient_to_boundary(x, p).unwrap()).collect();
        let g = base.graph().clone();
        let weights = g
            .slot_iter()
            .map(|(u, v, _)| base.ambient_distance(u, v) / ((1.0 + to_pole[u]) * (1.0 + to_pole[v])))
            .collect();
        let metric = GraphMetric::new(g, weights);
        let pole_to_sample: Vec<f64> = (0..base.boundary_count())
            .map(|b| boundary_pair_distance(&base, b, p))
            .collect();
        let boundary_distance = (0..n)
            .map(|x| {
                let at_infinity = 1.0 / (1.0 + to_pole[x]);
                (0..base.boundary_count())
                    .filter(|&b| b != p)
                    .map(|b| {
                        base.ambient_to_boundary(x, b).unwrap() / ((1.0 + to_pole[x]) * (1.0 + pole_to_sample[b]))
                    })
                    .fold(at_infinity, f64::min)
            })
            .collect();
        Ok(Self {
            params,
            base,
            kind: Kind::Sphere { to_pole },
            metric,
            boundary_distance,
        })
    }

    pub fn params(&self) -> &DeformationParams {
        &self.params
    }

    pub fn base(&self) -> &Arc<DomainSample> {
        &self.base
    }

    pub fn is_bhk(&self) -> bool {
        matches!(self.kind, Kind::Bhk { .. })
    }

    /// Length metric of the deformed edge weights.
    pub fn metric(&self) -> &GraphMetric {
        &self.metric
    }

    pub fn boundary_distance(&self, x: usize) -> f64 {
        self.boundary_distance[x]
    }

    pub fn density(&self, x: usize) -> Option<f64> {
        match &self.kind {
            Kind::Bhk { density, .. } => Some(density[x]),
            Kind::Sphere { .. } => None,
        }
    }

    /// Sphericalized quasimetric `ŝ_p(x, y)`; `None` for BHK spaces.
    pub fn quasimetric(&self, x: usize, y: usize) -> Option<f64> {
        match &self.kind {
            Kind::Sphere { to_pole } => {
                Some(self.base.ambient_distance(x, y) / ((1.0 + to_pole[x]) * (1.0 + to_pole[y])))
            }
            Kind::Bhk { .. } => None,
        }
    }

    /// Distances among `points` in the deformed metric.
    ///
    /// BHK: shortest paths under the density-weighted quasihyperbolic length.
    /// Sphericalization: chain infimum of `ŝ_p` over chains through `points`.
    pub fn table(&self, points: &[usize]) -> DistanceTable {
        match &self.kind {
            Kind::Bhk { .. } => self.metric.table(points),
            Kind::Sphere { .. } => self.quasimetric_table(points).chain_closure(),
        }
    }

    pub fn quasimetric_table(&self, points: &[usize]) -> DistanceTable {
        DistanceTable::from_fn(points.to_vec(), |i, j| self.quasimetric(points[i], points[j]).unwrap_or(f64::NAN))
    }

    /// Diameter bounds `(lower, upper)`. BHK: farthest-point sweeps and
    /// `2 max_x d_ε(w, x)`. Sphericalization: sweeps of the edge-length metric
    /// and the quasimetric bound 1.
    pub fn diameter_bounds(&self) -> (f64, f64) {
        match &self.kind {
            Kind::Bhk { w, .. } => {
                let ecc = self.metric.multi_source(&[(*w, 0.0)]).dist.iter().copied().fold(0.0, f64::max);
                let lower = crate::metric_core::sweep_diameter(&self.metric, *w);
                (lower.min(2.0 * ecc), 2.0 * ecc)
            }
            Kind::Sphere { .. } => (crate::metric_core::sweep_diameter(&self.metric, 0), 1.0),
        }
    }

    /// The deformed space as a [`DomainSample`] with intrinsic ambient metric,
    /// for quasihyperbolic comparisons.
    pub fn to_domain(&self) -> Result<DomainSample> {
        // reweighted visits slots in order
        let mut it = self.metric.weights().iter().copied();
        let graph = self.base.graph().reweighted(|_, _, _| it.next().unwrap());
        let label = match self.params {
            DeformationParams::Bhk { .. } => format!("{}:bhk", self.base.label()),
            DeformationParams::Sphericalization { .. } => format!("{}:sphericalized", self.base.label()),
        };
        DomainSample::from_parts(DomainParts {
            label,
            graph,
            boundary_distance: self.boundary_distance.clone(),
            boundary_points: Vec::new(),
            ambient: Ambient::Intrinsic,
            shape: None,
            bounded: true,
            resolution: self.base.resolution(),
        })
    }
}

fn boundary_pair_distance(d: &DomainSample, a: usize, b: usize) -> f64 {
    match d.ambient() {
        Ambient::Euclidean => euclid(d.boundary_points()[a], d.boundary_points()[b]),
        Ambient::Table(t) => t.get(d.num_points() + a, d.num_points() + b),
        Ambient::Intrinsic => f64::NAN,
    }
}

/// Index of the boundary sample nearest to `p`.
pub fn nearest_boundary_sample(d: &DomainSample, p: Point) -> Option<usize> {
    d.boundary_points()
        .iter()
        .enumerate()
        .min_by(|a, b| euclid(*a.1, p).total_cmp(&euclid(*b.1, p)))
        .map(|(i, _)| i)
}

pub fn bhk_metric(space: &DeformedSpace, x: usize, y: usize) -> f64 {
    space.metric.distance(x, y)
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparabilityReport {
    /// `max(max ρ, max 1/ρ)` over tested pairs.
    pub constant: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub worst_pair: Option<(usize, usize)>,
    pub tested: usize,
    pub skipped: usize,
}

/// Compare `d_ε(x,y)` with `ε^{-1} e^{-ε (x|y)_w} min{1, ε k(x,y)}` over all
/// pairs of `points`.
pub fn verify_lemma_f_c(space: &DeformedSpace, points: &[usize]) -> Result<ComparabilityReport> {
    let Kind::Bhk { qh, w, epsilon, .. } = &space.kind else {
        return Err(Error::config("comparability check needs a bhk deformation"));
    };
    let mut with_w = points.to_vec();
    with_w.push(*w);
    let kt = qh.table(&with_w);
    let dt = space.metric.table(points);
    let wi = points.len();
    let mut report = ComparabilityReport {
        constant: 1.0,
        min_ratio: f64::INFINITY,
        max_ratio: 0.0,
        worst_pair: None,
        tested: 0,
        skipped: 0,
    };
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if points[i] == points[j] {
                report.skipped += 1;
                continue;
            }
            let k = kt.get(i, j);
            let gp = gromov_product(&kt, i, j, wi);
            let model = (-epsilon * gp).exp() / epsilon * (epsilon * k).min(1.0);
            let ratio = model / dt.get(i, j);
            report.tested += 1;
            report.min_ratio = report.min_ratio.min(ratio);
            report.max_ratio = report.max_ratio.max(ratio);
            let c = ratio.max(1.0 / ratio);
            if c > report.constant || report.worst_pair.is_none() {
                report.constant = report.constant.max(c);
                report.worst_pair = Some((points[i], points[j]));
            }
        }
    }
    Ok(report)
}

/// Linear quasimöbius slope of the identity between two BHK deformations of
/// the same base with different base points.
pub fn basepoint_change_distortion(
    space0: &DeformedSpace,
    space1: &DeformedSpace,
    points: &[usize],
    quadruples: &[[usize; 4]],
) -> Result<SlopeReport> {
    if !Arc::ptr_eq(&space0.base, &space1.base) {
        return Err(Error::config("base-point change compares deformations of the same domain"));
    }
    match (&space0.params, &space1.params) {
        (DeformationParams::Bhk { epsilon: e0, .. }, DeformationParams::Bhk { epsilon: e1, .. }) if e0 == e1 => {}
        _ => return Err(Error::config("base-point change needs two bhk deformations with equal epsilon")),
    }
    let t0 = space0.table(points);
    let t1 = space1.table(points);
    Ok(cross_ratio_slope(&t0, &t1, quadruples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_core::{build_grid_domain, Shape, ShapeSpec};

    fn disk_qh(h: f64) -> Arc<QuasihyperbolicMetric> {
        let d = Arc::new(build_grid_domain(&ShapeSpec::disk(1.0, h)).unwrap());
        Arc::new(QuasihyperbolicMetric::new(d))
    }

    #[test]
    fn density_examples() {
        let k = disk_qh(0.02);
        let d = k.base().clone();
        let o = d.nearest_vertex([0.0, 0.0]);
        let x = d.nearest_vertex([0.5, 0.0]);
        assert_eq!(bhk_density(&k, o, o, 0.5), 1.0);
        let rho = bhk_density(&k, x, o, 0.5);
        assert!((rho - 0.5f64.sqrt()).abs() / 0.5f64.sqrt() < 0.02);
        assert!((bhk_density(&k, x, o, 1e-9) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn epsilon_out_of_range_rejected() {
        let k = disk_qh(0.1);
        assert!(DeformedSpace::bhk(k.clone(), 0, 1.0).is_err());
        assert!(DeformedSpace::bhk(k, 0, 0.0).is_err());
    }

    #[test]
    fn sphericalize_rejects_non_boundary_point() {
        let d = Arc::new(build_grid_domain(&ShapeSpec::disk(1.0, 0.1)).unwrap());
        let n = d.boundary_count();
        assert!(DeformedSpace::sphericalize(d, n).is_err());
    }

    #[test]
    fn quasimetric_worked_example() {
        // d(x,p) = d(y,p) = 1 and d(x,y) = 1: x, y, p an equilateral triangle
        let h = 0.5f64;
        let spec = ShapeSpec::new(Shape::HalfPlane { truncation_radius: 4.0 }, h).with_band(0.0);
        let d = Arc::new(build_grid_domain(&spec).unwrap());
        let p = nearest_boundary_sample(&d, [0.0, 0.0]).unwrap();
        assert_eq!(d.boundary_points()[p], [0.0, 0.0]);
        let s = DeformedSpace::sphericalize(d.clone(), p).unwrap();
        // on the lattice take x = (0, 1), y = (1, 1): d(x,p)=1, d(y,p)=sqrt2, d(x,y)=1
        let x = d.nearest_vertex([0.0, 1.0]);
        let y = d.nearest_vertex([1.0, 1.0]);
        let expect = 1.0 / (2.0 * (1.0 + 2f64.sqrt()));
        assert!((s.quasimetric(x, y).unwrap() - expect).abs() < 1e-15);
        assert_eq!(s.quasimetric(x, x), Some(0.0));
    }

    #[test]
    fn same_base_point_has_unit_slope() {
        let k = disk_qh(0.1);
        let s0 = DeformedSpace::bhk(k.clone(), 5, 0.2).unwrap();
        let s1 = DeformedSpace::bhk(k, 5, 0.2).unwrap();
        let pts: Vec<usize> = (0..20).map(|i| i * 7).collect();
        let quads = crate::sampling::sample_distinct_tuples::<4, _>(pts.len(), 200, &mut crate::sampling::rng(1));
        let r = basepoint_change_distortion(&s0, &s1, &pts, &quads).unwrap();
        assert_eq!(r.slope, 1.0);
    }
}
