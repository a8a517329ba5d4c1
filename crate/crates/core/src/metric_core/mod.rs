//! Discretized metric domains: length graphs, boundary data and the ambient metric.

mod checks;
mod grid;
mod paths;
mod shape;
mod table;

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use checks::{
    check_ball_containment, estimate_quasiconvexity, lemma_c_radius, truncation_sensitivity,
    ContainmentReport, QuasiconvexityEstimate, TruncationSensitivity,
};
pub use grid::{build_grid_domain, STENCIL};
pub use paths::{dijkstra, GraphMetric, ShortestPaths};
pub use shape::{Shape, ShapeSpec};
pub use table::{check_metric_axioms, AxiomKind, AxiomReport, AxiomViolation, DistanceTable, FiniteMetric};

/// A point of the plane.
pub type Point = [f64; 2];

pub fn euclid(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Undirected graph with positive edge lengths, stored in CSR form.
#[derive(Debug, Clone)]
pub struct LengthGraph {
    coords: Option<Vec<Point>>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    lengths: Vec<f64>,
}

impl LengthGraph {
    /// Build from an undirected edge list. Duplicate edges keep the shortest length.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)], coords: Option<Vec<Point>>) -> Result<Self> {
        if let Some(c) = &coords {
            if c.len() != n {
                return Err(Error::config(format!("{} coordinates given for {n} vertices", c.len())));
            }
        }
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(u, v, len) in edges {
            if u >= n || v >= n {
                return Err(Error::config(format!("edge ({u}, {v}) references a missing vertex")));
            }
            if u == v {
                continue;
            }
            if !(len.is_finite() && len > 0.0) {
                return Err(Error::config(format!("edge ({u}, {v}) has non-positive length {len}")));
            }
            adj[u].push((v, len));
            adj[v].push((u, len));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        let mut lengths = Vec::new();
        offsets.push(0);
        for list in &mut adj {
            list.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
            list.dedup_by_key(|e| e.0);
            for &(v, len) in list.iter() {
                targets.push(v);
                lengths.push(len);
            }
            offsets.push(targets.len());
        }
        Ok(Self {
            coords,
            offsets,
            targets,
            lengths,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_slots(&self) -> usize {
        self.targets.len()
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn slots(&self, u: usize) -> std::ops::Range<usize> {
        self.offsets[u]..self.offsets[u + 1]
    }

    pub fn target(&self, slot: usize) -> usize {
        self.targets[slot]
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.slots(u).map(move |s| (self.targets[s], self.lengths[s]))
    }

    pub fn slot_between(&self, u: usize, v: usize) -> Option<usize> {
        let range = self.slots(u);
        self.targets[range.clone()]
            .binary_search(&v)
            .ok()
            .map(|k| range.start + k)
    }

    /// `(u, v, slot)` for every CSR slot, i.e. each undirected edge twice.
    pub fn slot_iter(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.num_vertices()).flat_map(move |u| self.slots(u).map(move |s| (u, self.targets[s], s)))
    }

    pub fn coords(&self) -> Option<&[Point]> {
        self.coords.as_deref()
    }

    /// Same topology with new lengths computed per slot from `(u, v, old_length)`.
    pub fn reweighted(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> LengthGraph {
        let lengths = self
            .slot_iter()
            .map(|(u, v, s)| f(u, v, self.lengths[s]))
            .collect();
        LengthGraph {
            coords: self.coords.clone(),
            offsets: self.offsets.clone(),
            targets: self.targets.clone(),
            lengths,
        }
    }

    /// Same topology with new vertex coordinates.
    pub fn with_coords(&self, coords: Vec<Point>) -> LengthGraph {
        assert_eq!(coords.len(), self.num_vertices());
        LengthGraph {
            coords: Some(coords),
            ..self.clone()
        }
    }

    /// Number of connected components.
    pub fn components(&self) -> usize {
        let n = self.num_vertices();
        let mut seen = vec![false; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for (v, _) in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        count
    }
}

/// How distances between sample points are measured in the surrounding space.
#[derive(Debug, Clone)]
pub enum Ambient {
    /// Plane distance between vertex coordinates.
    Euclidean,
    /// Explicit table over interior vertices followed by boundary samples.
    Table(DistanceTable),
    /// The length metric of the graph itself (used for deformed spaces).
    Intrinsic,
}

/// A discretized incomplete metric space `G`: interior vertices with a length
/// graph, boundary samples, and the distance `d_G(x)` to the boundary.
#[derive(Debug)]
pub struct DomainSample {
    label: String,
    graph: Arc<LengthGraph>,
    boundary_distance: Vec<f64>,
    boundary_points: Vec<Point>,
    ambient: Ambient,
    shape: Option<ShapeSpec>,
    quasiconvexity: f64,
    bounded: bool,
    resolution: f64,
    length_metric: GraphMetric,
    diameter: OnceLock<f64>,
}

/// Everything needed to assemble a [`DomainSample`] by hand.
pub struct DomainParts {
    pub label: String,
    pub graph: LengthGraph,
    pub boundary_distance: Vec<f64>,
    pub boundary_points: Vec<Point>,
    pub ambient: Ambient,
    pub shape: Option<ShapeSpec>,
    pub bounded: bool,
    pub resolution: f64,
}

impl DomainSample {
    pub fn from_parts(parts: DomainParts) -> Result<Self> {
        let n = parts.graph.num_vertices();
        if n == 0 {
            return Err(Error::EmptyInterior(parts.label));
        }
        if parts.boundary_distance.len() != n {
            return Err(Error::config("boundary distance table size mismatch"));
        }
        if let Some((i, d)) = parts
            .boundary_distance
            .iter()
            .enumerate()
            .find(|(_, d)| !(d.is_finite() && **d > 0.0))
        {
            return Err(Error::config(format!(
                "{}: boundary distance of vertex {i} is {d}, must be positive",
                parts.label
            )));
        }
        if matches!(parts.ambient, Ambient::Euclidean) && parts.graph.coords().is_none() {
            return Err(Error::config("euclidean ambient metric needs vertex coordinates"));
        }
        let components = parts.graph.components();
        if components > 1 {
            return Err(Error::Disconnected(parts.label, components));
        }
        let graph = Arc::new(parts.graph);
        Ok(Self {
            label: parts.label,
            length_metric: GraphMetric::from_lengths(graph.clone()),
            graph,
            boundary_distance: parts.boundary_distance,
            boundary_points: parts.boundary_points,
            ambient: parts.ambient,
            shape: parts.shape,
            quasiconvexity: 1.0,
            bounded: parts.bounded,
            resolution: parts.resolution,
            diameter: OnceLock::new(),
        })
    }

    /// Import a raw metric graph. Vertices listed in `boundary` play the role of
    /// the metric boundary; the rest form the domain, with the ambient metric
    /// given by shortest paths in the full graph.
    pub fn from_length_graph(label: &str, full: &LengthGraph, boundary: &[usize]) -> Result<Self> {
        let n_total = full.num_vertices();
        let mut is_boundary = vec![false; n_total];
        for &b in boundary {
            if b >= n_total {
                return Err(Error::config(format!("boundary vertex {b} out of range")));
            }
            is_boundary[b] = true;
        }
        let interior: Vec<usize> = (0..n_total).filter(|&v| !is_boundary[v]).collect();
        let mut boundary_sorted: Vec<usize> = (0..n_total).filter(|&v| is_boundary[v]).collect();
        boundary_sorted.dedup();
        if boundary_sorted.is_empty() {
            return Err(Error::config("imported graph needs at least one boundary vertex"));
        }
        let mut local = vec![usize::MAX; n_total];
        for (i, &v) in interior.iter().enumerate() {
            local[v] = i;
        }
        let mut edges = Vec::new();
        for (u, v, s) in full.slot_iter() {
            if u < v && !is_boundary[u] && !is_boundary[v] {
                edges.push((local[u], local[v], full.lengths()[s]));
            }
        }
        let coords = full
            .coords()
            .map(|c| interior.iter().map(|&v| c[v]).collect());
        let graph = LengthGraph::from_edges(interior.len(), &edges, coords)?;
        let full_metric = GraphMetric::from_lengths(Arc::new(full.clone()));
        let order: Vec<usize> = interior.iter().chain(boundary_sorted.iter()).copied().collect();
        let table = full_metric.table(&order);
        if table.diameter().is_infinite() {
            return Err(Error::Disconnected(label.to_string(), full.components()));
        }
        let n = interior.len();
        let boundary_distance = (0..n)
            .map(|i| (n..order.len()).map(|b| table.get(i, b)).fold(f64::INFINITY, f64::min))
            .collect();
        DomainSample::from_parts(DomainParts {
            label: label.to_string(),
            graph,
            boundary_distance,
            boundary_points: Vec::new(),
            ambient: Ambient::Table(table),
            shape: None,
            bounded: true,
            resolution: full.lengths().iter().copied().fold(0.0, f64::max),
        })
    }

    pub fn with_quasiconvexity(mut self, c: f64) -> Result<Self> {
        if !(c >= 1.0) {
            return Err(Error::config(format!("quasiconvexity constant must be >= 1, got {c}")));
        }
        self.quasiconvexity = c;
        Ok(self)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn graph(&self) -> &Arc<LengthGraph> {
        &self.graph
    }

    pub fn num_points(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn shape(&self) -> Option<&ShapeSpec> {
        self.shape.as_ref()
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    /// Quasiconvexity constant `c` of the ambient space (declared, >= 1).
    pub fn quasiconvexity(&self) -> f64 {
        self.quasiconvexity
    }

    pub fn point(&self, i: usize) -> Point {
        self.graph.coords().expect("domain has no coordinates")[i]
    }

    pub fn coords(&self) -> Option<&[Point]> {
        self.graph.coords()
    }

    pub fn boundary_distance(&self, i: usize) -> f64 {
        self.boundary_distance[i]
    }

    pub fn boundary_distances(&self) -> &[f64] {
        &self.boundary_distance
    }

    pub fn boundary_points(&self) -> &[Point] {
        &self.boundary_points
    }

    /// Number of boundary samples.
    pub fn boundary_count(&self) -> usize {
        match &self.ambient {
            Ambient::Table(t) => t.len() - self.num_points(),
            _ => self.boundary_points.len(),
        }
    }

    /// Ambient distance between interior vertex `i` and boundary sample `b`.
    pub fn ambient_to_boundary(&self, i: usize, b: usize) -> Option<f64> {
        match &self.ambient {
            Ambient::Euclidean => Some(euclid(self.point(i), self.boundary_points[b])),
            Ambient::Table(t) => Some(t.get(i, self.num_points() + b)),
            Ambient::Intrinsic => None,
        }
    }

    /// Ambient distance `d(x, y)` between interior vertices.
    pub fn ambient_distance(&self, i: usize, j: usize) -> f64 {
        match &self.ambient {
            Ambient::Euclidean => euclid(self.point(i), self.point(j)),
            Ambient::Table(t) => t.get(i, j),
            Ambient::Intrinsic => self.length_metric.distance(i, j),
        }
    }

    /// Shortest-path length in the graph (the discrete length metric).
    pub fn graph_distance(&self, i: usize, j: usize) -> f64 {
        self.length_metric.distance(i, j)
    }

    pub fn length_metric(&self) -> &GraphMetric {
        &self.length_metric
    }

    /// Boundary distance of an arbitrary planar point: analytic when the shape
    /// allows it, otherwise the minimum over boundary samples.
    pub fn boundary_distance_at(&self, p: Point) -> f64 {
        if let Some(d) = self.shape.as_ref().and_then(|s| s.shape.boundary_distance(p)) {
            return d;
        }
        self.boundary_points
            .iter()
            .map(|&b| euclid(p, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether `p` lies in the open domain (requires a shape).
    pub fn contains_point(&self, p: Point) -> Option<bool> {
        self.shape.as_ref().map(|s| s.shape.contains(p))
    }

    /// Vertex nearest to `p` (lowest index on ties).
    pub fn nearest_vertex(&self, p: Point) -> usize {
        let coords = self.graph.coords().expect("domain has no coordinates");
        let mut best = (f64::INFINITY, 0);
        for (i, &c) in coords.iter().enumerate() {
            let d = euclid(c, p);
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }

    /// Vertex with maximal boundary distance (lowest index on ties).
    pub fn deepest_vertex(&self) -> usize {
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, &d) in self.boundary_distance.iter().enumerate() {
            if d > best.0 {
                best = (d, i);
            }
        }
        best.1
    }

    /// Diameter of the vertex set in the ambient metric.
    ///
    /// Exact for Euclidean and tabulated ambients; for intrinsic metrics it is
    /// the best of a few farthest-point sweeps (a lower bound).
    pub fn diameter(&self) -> f64 {
        *self.diameter.get_or_init(|| match &self.ambient {
            Ambient::Euclidean => euclidean_diameter(self.graph.coords().unwrap()),
            Ambient::Table(t) => {
                let n = self.num_points();
                let mut d: f64 = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        d = d.max(t.get(i, j));
                    }
                }
                d
            }
            Ambient::Intrinsic => sweep_diameter(&self.length_metric, self.deepest_vertex()),
        })
    }
}

/// Best eccentricity found by repeated farthest-point sweeps from `start`.
pub(crate) fn sweep_diameter(metric: &GraphMetric, start: usize) -> f64 {
    let mut best: f64 = 0.0;
    let mut s = start;
    for _ in 0..4 {
        let tree = metric.multi_source(&[(s, 0.0)]);
        let (far, d) = tree
            .dist
            .iter()
            .enumerate()
            .fold((s, 0.0), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
        best = best.max(d);
        if far == s {
            break;
        }
        s = far;
    }
    best
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn euclidean_diameter(points: &[Point]) -> f64 {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts
            .iter()
            .flat_map(|a| pts.iter().map(move |b| euclid(*a, *b)))
            .fold(0.0, f64::max);
    }
    // monotone chain hull
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len();
    for &p in pts.iter().rev().skip(1) {
        while hull.len() > lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let mut d: f64 = 0.0;
    for i in 0..hull.len() {
        for j in (i + 1)..hull.len() {
            d = d.max(euclid(hull[i], hull[j]));
        }
    }
    d
}

/// JSON form of a raw length-graph import.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LengthGraphImport {
    pub vertices: usize,
    #[serde(default)]
    pub coords: Option<Vec<Point>>,
    pub edges: Vec<(usize, usize, f64)>,
    pub boundary: Vec<usize>,
}

impl LengthGraphImport {
    pub fn build(&self, label: &str) -> Result<DomainSample> {
        let g = LengthGraph::from_edges(self.vertices, &self.edges, self.coords.clone())?;
        DomainSample::from_length_graph(label, &g, &self.boundary)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_diameter_matches_brute_force() {
        let pts: Vec<Point> = (0..40)
            .map(|i| {
                let t = i as f64 * 0.37;
                [t.cos() * (1.0 + 0.1 * t.sin()), t.sin()]
            })
            .collect();
        let brute = pts
            .iter()
            .flat_map(|a| pts.iter().map(move |b| euclid(*a, *b)))
            .fold(0.0, f64::max);
        assert!((euclidean_diameter(&pts) - brute).abs() < 1e-15);
    }

    #[test]
    fn zero_length_edge_rejected() {
        assert!(LengthGraph::from_edges(2, &[(0, 1, 0.0)], None).is_err());
    }

    #[test]
    fn star_import_has_boundary_distances() {
        // center 0, leaves 1..=3, leaf 3 is boundary
        let imp = LengthGraphImport {
            vertices: 4,
            coords: None,
            edges: vec![(0, 1, 1.0), (0, 2, 1.0), (0, 3, 2.0)],
            boundary: vec![3],
        };
        let d = imp.build("star").unwrap();
        assert_eq!(d.num_points(), 3);
        assert_eq!(d.boundary_distance(0), 2.0);
        assert_eq!(d.boundary_distance(1), 3.0);
        assert_eq!(d.ambient_to_boundary(2, 0), Some(3.0));
    }

    #[test]
    fn disconnected_import_rejected() {
        let imp = LengthGraphImport {
            vertices: 4,
            coords: None,
            edges: vec![(0, 1, 1.0), (2, 3, 1.0)],
            boundary: vec![3],
        };
        assert!(imp.build("split").is_err());
    }
}
