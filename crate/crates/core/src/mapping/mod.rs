//! Sampled homeomorphisms between domains and estimators for the distortion
//! data of each mapping class.

mod estimators;

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric_core::{euclid, Ambient, DomainParts, DomainSample, Point, ShapeSpec};
use crate::quasihyperbolic::QuasihyperbolicMetric;

pub use estimators::*;

/// An explicit map of the plane with a known inverse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", content = "params", rename_all = "snake_case")]
pub enum PlaneMap {
    Identity,
    /// `z -> scale z + translation`
    Similarity {
        scale: f64,
        #[serde(default)]
        translation: Point,
    },
    /// `z -> (z - a) / (1 - conj(a) z)`
    DiskAutomorphism { a: Point },
    /// `z -> (a z + b) / (c z + d)`
    Mobius { a: Point, b: Point, c: Point, d: Point },
    /// `z -> z^alpha`, principal branch.
    Power { alpha: f64 },
    /// `second ∘ first`
    Compose { first: Box<PlaneMap>, second: Box<PlaneMap> },
}

fn cx(p: Point) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn pt(z: Complex64) -> Point {
    [z.re, z.im]
}

impl PlaneMap {
    pub fn validate(&self) -> Result<()> {
        match self {
            PlaneMap::Identity => Ok(()),
            PlaneMap::Similarity { scale, .. } => {
                if *scale > 0.0 && scale.is_finite() {
                    Ok(())
                } else {
                    Err(Error::config(format!("similarity scale must be positive, got {scale}")))
                }
            }
            PlaneMap::DiskAutomorphism { a } => {
                if cx(*a).norm() < 1.0 {
                    Ok(())
                } else {
                    Err(Error::config("disk automorphism needs |a| < 1"))
                }
            }
            PlaneMap::Mobius { a, b, c, d } => {
                let det = cx(*a) * cx(*d) - cx(*b) * cx(*c);
                if det.norm() > 0.0 {
                    Ok(())
                } else {
                    Err(Error::config("mobius map needs ad - bc != 0"))
                }
            }
            PlaneMap::Power { alpha } => {
                if *alpha > 0.0 && alpha.is_finite() {
                    Ok(())
                } else {
                    Err(Error::config(format!("power map needs alpha > 0, got {alpha}")))
                }
            }
            PlaneMap::Compose { first, second } => {
                first.validate()?;
                second.validate()
            }
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        match self {
            PlaneMap::Identity => p,
            PlaneMap::Similarity { scale, translation } => {
                [scale * p[0] + translation[0], scale * p[1] + translation[1]]
            }
            PlaneMap::DiskAutomorphism { a } => {
                let (z, a) = (cx(p), cx(*a));
                pt((z - a) / (1.0 - a.conj() * z))
            }
            PlaneMap::Mobius { a, b, c, d } => {
                let z = cx(p);
                pt((cx(*a) * z + cx(*b)) / (cx(*c) * z + cx(*d)))
            }
            PlaneMap::Power { alpha } => {
                let z = cx(p);
                if z.norm() == 0.0 {
                    [0.0, 0.0]
                } else {
                    pt(Complex64::from_polar(z.norm().powf(*alpha), z.arg() * alpha))
                }
            }
            PlaneMap::Compose { first, second } => second.apply(first.apply(p)),
        }
    }

    pub fn inverse(&self) -> PlaneMap {
        match self {
            PlaneMap::Identity => PlaneMap::Identity,
            PlaneMap::Similarity { scale, translation } => PlaneMap::Similarity {
                scale: 1.0 / scale,
                translation: [-translation[0] / scale, -translation[1] / scale],
            },
            PlaneMap::DiskAutomorphism { a } => PlaneMap::DiskAutomorphism { a: [-a[0], -a[1]] },
            PlaneMap::Mobius { a, b, c, d } => PlaneMap::Mobius {
                a: *d,
                b: [-b[0], -b[1]],
                c: [-c[0], -c[1]],
                d: *a,
            },
            PlaneMap::Power { alpha } => PlaneMap::Power { alpha: 1.0 / alpha },
            PlaneMap::Compose { first, second } => PlaneMap::Compose {
                first: Box::new(second.inverse()),
                second: Box::new(first.inverse()),
            },
        }
    }
}

/// Image of `source` under `map`: same graph, vertices moved to `f(v)`, edge
/// lengths `|f(u) - f(v)|`, and boundary distance taken from `target`.
pub fn pushforward(source: &DomainSample, map: &PlaneMap, target: &ShapeSpec) -> Result<DomainSample> {
    map.validate()?;
    target.validate()?;
    let coords: Vec<Point> = source
        .coords()
        .ok_or_else(|| Error::config("pushforward needs a planar source"))?
        .iter()
        .map(|&p| map.apply(p))
        .collect();
    let shape = &target.shape;
    let boundary_points = shape.boundary_samples(target.resolution);
    let bdist = |p: Point| {
        shape.boundary_distance(p).unwrap_or_else(|| {
            boundary_points
                .iter()
                .map(|&b| euclid(p, b))
                .fold(f64::INFINITY, f64::min)
        })
    };
    let boundary_distance: Vec<f64> = coords.iter().map(|&p| bdist(p)).collect();
    if let Some(i) = coords.iter().position(|&p| !shape.contains(p)) {
        if shape.is_bounded() {
            return Err(Error::config(format!(
                "{}: image of vertex {i} at {:?} lies outside the target {}",
                source.label(),
                coords[i],
                shape.name()
            )));
        }
    }
    let graph = source
        .graph()
        .reweighted(|u, v, _| euclid(coords[u], coords[v]))
        .with_coords(coords);
    let d = DomainSample::from_parts(DomainParts {
        label: format!("{}->{}", source.label(), shape.name()),
        graph,
        boundary_distance,
        boundary_points,
        ambient: Ambient::Euclidean,
        shape: Some(target.clone()),
        bounded: shape.is_bounded(),
        resolution: target.resolution,
    })?;
    d.with_quasiconvexity(source.quasiconvexity())
}

/// A sampled homeomorphism `f: G -> G'` as a vertex bijection between two
/// domain samples, with the quasihyperbolic metric of each side.
#[derive(Debug, Clone)]
pub struct MappingPair {
    name: String,
    source_k: Arc<QuasihyperbolicMetric>,
    target_k: Arc<QuasihyperbolicMetric>,
    forward: Arc<Vec<usize>>,
    inverse: Arc<Vec<usize>>,
    map: Option<PlaneMap>,
    continuity_modulus: f64,
}

/// Largest ambient distance in `t` between the images of the endpoints of an edge of `s`.
fn edge_image_modulus(s: &DomainSample, t: &DomainSample, forward: &[usize]) -> f64 {
    let g = s.graph();
    if !matches!(t.ambient(), Ambient::Intrinsic) {
        return g
            .slot_iter()
            .map(|(u, v, _)| t.ambient_distance(forward[u], forward[v]))
            .fold(0.0, f64::max);
    }
    (0..s.num_points())
        .into_par_iter()
        .map(|u| {
            let images: Vec<usize> = g.slots(u).map(|slot| forward[g.target(slot)]).collect();
            t.length_metric()
                .distances_to(forward[u], &images)
                .into_iter()
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

impl MappingPair {
    /// Pair from an explicit vertex bijection. `map`, when present, is the
    /// analytic map of the plane that the bijection samples.
    pub fn new(
        name: &str,
        source_k: Arc<QuasihyperbolicMetric>,
        target_k: Arc<QuasihyperbolicMetric>,
        forward: Vec<usize>,
        map: Option<PlaneMap>,
    ) -> Result<Self> {
        let (n, m) = (source_k.base().num_points(), target_k.base().num_points());
        if forward.len() != n || n != m {
            return Err(Error::config(format!("{name}: vertex counts differ ({n} vs {m})")));
        }
        let mut inverse = vec![usize::MAX; m];
        for (x, &y) in forward.iter().enumerate() {
            if y >= m || inverse[y] != usize::MAX {
                return Err(Error::config(format!("{name}: forward map is not a bijection at vertex {x}")));
            }
            inverse[y] = x;
        }
        let continuity_modulus = edge_image_modulus(source_k.base(), target_k.base(), &forward);
        Ok(Self {
            name: name.to_string(),
            source_k,
            target_k,
            forward: Arc::new(forward),
            inverse: Arc::new(inverse),
            map,
            continuity_modulus,
        })
    }

    /// Pair sampling `map` on `source`, with target boundary distances from `target`.
    pub fn from_map(name: &str, source_k: Arc<QuasihyperbolicMetric>, map: PlaneMap, target: &ShapeSpec) -> Result<Self> {
        let image = pushforward(source_k.base(), &map, target)?;
        let target_k = Arc::new(QuasihyperbolicMetric::new(Arc::new(image)));
        let n = source_k.base().num_points();
        Self::new(name, source_k, target_k, (0..n).collect(), Some(map))
    }

    /// The identity of a vertex set viewed in two metrics on the same graph,
    /// e.g. a domain and one of its deformations.
    pub fn identity_between(name: &str, source_k: Arc<QuasihyperbolicMetric>, target_k: Arc<QuasihyperbolicMetric>) -> Result<Self> {
        let n = source_k.base().num_points();
        let map = (source_k.base().coords().is_some() && target_k.base().coords().is_some()
            && !matches!(target_k.base().ambient(), Ambient::Intrinsic))
        .then_some(PlaneMap::Identity);
        Self::new(name, source_k, target_k, (0..n).collect(), map)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Arc<DomainSample> {
        self.source_k.base()
    }

    pub fn target(&self) -> &Arc<DomainSample> {
        self.target_k.base()
    }

    pub fn source_k(&self) -> &Arc<QuasihyperbolicMetric> {
        &self.source_k
    }

    pub fn target_k(&self) -> &Arc<QuasihyperbolicMetric> {
        &self.target_k
    }

    pub fn forward(&self, x: usize) -> usize {
        self.forward[x]
    }

    pub fn inverse_of(&self, y: usize) -> usize {
        self.inverse[y]
    }

    pub fn map(&self) -> Option<&PlaneMap> {
        self.map.as_ref()
    }

    /// Largest image distance of a graph edge.
    pub fn continuity_modulus(&self) -> f64 {
        self.continuity_modulus
    }

    /// `f^{-1}: G' -> G`.
    pub fn inverse(&self) -> MappingPair {
        let continuity_modulus = edge_image_modulus(self.target(), self.source(), &self.inverse);
        MappingPair {
            name: format!("{}^-1", self.name),
            source_k: self.target_k.clone(),
            target_k: self.source_k.clone(),
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
            map: self.map.as_ref().map(PlaneMap::inverse),
            continuity_modulus,
        }
    }

    /// Largest `|f^{-1}(f(v)) - v|` of the analytic map over source vertices.
    pub fn round_trip_error(&self) -> Option<f64> {
        let map = self.map.as_ref()?;
        let inv = map.inverse();
        let coords = self.source().coords()?;
        Some(coords.iter().map(|&p| euclid(inv.apply(map.apply(p)), p)).fold(0.0, f64::max))
    }

    /// `S ∘ f` for the similarity `S(z) = s z`.
    pub fn post_scaled(&self, s: f64) -> Result<MappingPair> {
        let (map, spec) = self.planar_parts()?;
        let scale = PlaneMap::Similarity { scale: s, translation: [0.0, 0.0] };
        let composed = PlaneMap::Compose { first: Box::new(map), second: Box::new(scale) };
        Self::from_map(&format!("{}*{s}", self.name), self.source_k.clone(), composed, &spec.scaled(s))
    }

    /// `f ∘ S^{-1}` on the source scaled by `s`.
    pub fn pre_scaled(&self, s: f64) -> Result<MappingPair> {
        let (map, target_spec) = self.planar_parts()?;
        let source_spec = self
            .source()
            .shape()
            .ok_or_else(|| Error::config("pre-composition needs a planar source"))?
            .scaled(s);
        let scale = PlaneMap::Similarity { scale: s, translation: [0.0, 0.0] };
        let source = pushforward(self.source(), &scale, &source_spec)?;
        let source_k = Arc::new(QuasihyperbolicMetric::new(Arc::new(source)));
        let composed = PlaneMap::Compose { first: Box::new(scale.inverse()), second: Box::new(map) };
        Self::from_map(&format!("{}/{s}", self.name), source_k, composed, &target_spec)
    }

    fn planar_parts(&self) -> Result<(PlaneMap, ShapeSpec)> {
        let map = self.map.clone().ok_or_else(|| Error::config("composition needs an analytic map"))?;
        let spec = self
            .target()
            .shape()
            .cloned()
            .ok_or_else(|| Error::config("composition needs a planar target"))?;
        Ok((map, spec))
    }
}

/// Built-in maps by id, sampled on `source` with target shape `target`.
pub fn builtin_mapping(
    name: &str,
    map: PlaneMap,
    source_k: Arc<QuasihyperbolicMetric>,
    target: &ShapeSpec,
) -> Result<MappingPair> {
    map.validate()?;
    if let PlaneMap::Power { alpha } = map {
        if let Some(ShapeSpec { shape: crate::metric_core::Shape::Sector { angle, .. }, .. }) = source_k.base().shape() {
            if angle * alpha > std::f64::consts::PI + 1e-12 {
                return Err(Error::config(format!(
                    "power map alpha = {alpha} opens a sector of angle {angle} past pi"
                )));
            }
        }
    }
    MappingPair::from_map(name, source_k, map, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_core::{build_grid_domain, Shape};
    use std::f64::consts::PI;

    fn disk_k(h: f64) -> Arc<QuasihyperbolicMetric> {
        Arc::new(QuasihyperbolicMetric::new(Arc::new(build_grid_domain(&ShapeSpec::disk(1.0, h)).unwrap())))
    }

    #[test]
    fn automorphism_at_zero_is_identity() {
        let f = PlaneMap::DiskAutomorphism { a: [0.0, 0.0] };
        for p in [[0.3, 0.1], [-0.5, 0.7], [0.0, 0.0]] {
            assert_eq!(f.apply(p), p);
        }
    }

    #[test]
    fn identity_pair_is_vertex_identity() {
        let k = disk_k(0.1);
        let m = builtin_mapping("id", PlaneMap::Identity, k.clone(), &ShapeSpec::disk(1.0, 0.1)).unwrap();
        for x in 0..k.base().num_points() {
            assert_eq!(m.forward(x), x);
            assert_eq!(m.inverse_of(x), x);
            assert_eq!(m.target().point(x), m.source().point(x));
        }
    }

    #[test]
    fn power_map_round_trip() {
        let spec = ShapeSpec::new(Shape::Sector { radius: 1.0, angle: PI / 2.0 }, 0.05);
        let k = Arc::new(QuasihyperbolicMetric::new(Arc::new(build_grid_domain(&spec).unwrap())));
        let target = ShapeSpec::new(Shape::Sector { radius: 1.0, angle: PI }, 0.05);
        let m = builtin_mapping("sq", PlaneMap::Power { alpha: 2.0 }, k, &target).unwrap();
        assert!(m.round_trip_error().unwrap() < 0.05);
        let inv = m.inverse();
        for x in (0..m.source().num_points()).step_by(7) {
            assert_eq!(inv.forward(m.forward(x)), x);
        }
    }

    #[test]
    fn power_map_past_pi_rejected() {
        let spec = ShapeSpec::new(Shape::Sector { radius: 1.0, angle: PI / 2.0 }, 0.1);
        let k = Arc::new(QuasihyperbolicMetric::new(Arc::new(build_grid_domain(&spec).unwrap())));
        let target = ShapeSpec::new(Shape::Sector { radius: 1.0, angle: PI }, 0.1);
        assert!(builtin_mapping("cube", PlaneMap::Power { alpha: 3.0 }, k, &target).is_err());
    }

    #[test]
    fn mobius_inverse_round_trip() {
        let f = PlaneMap::Mobius { a: [1.0, 0.0], b: [0.0, -1.0], c: [1.0, 0.0], d: [0.0, 1.0] };
        let g = f.inverse();
        for p in [[0.2, 0.5], [-3.0, 1.0], [0.0, 10.0]] {
            assert!(euclid(g.apply(f.apply(p)), p) < 1e-12);
        }
    }

    #[test]
    fn image_outside_bounded_target_rejected() {
        let k = disk_k(0.1);
        let f = PlaneMap::Similarity { scale: 2.0, translation: [0.0, 0.0] };
        assert!(builtin_mapping("grow", f, k, &ShapeSpec::disk(1.0, 0.1)).is_err());
    }
}
