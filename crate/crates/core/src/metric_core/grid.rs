use std::collections::HashMap;

use super::{euclid, Ambient, DomainParts, DomainSample, LengthGraph, Point, ShapeSpec};
use crate::error::{Error, Result};

/// 16-neighbour stencil: axis, diagonal and knight moves.
pub const STENCIL: [(i64, i64); 16] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
    (1, 2),
    (2, 1),
    (-1, 2),
    (-2, 1),
    (1, -2),
    (2, -1),
    (-1, -2),
    (-2, -1),
];

/// Sample a shape on the lattice `h Z^2`.
///
/// Vertices are lattice points inside the shape whose boundary distance is at
/// least `band * h`; edges follow [`STENCIL`] and are kept only when the segment
/// stays inside the shape. Vertex order is row-major (y, then x).
pub fn build_grid_domain(spec: &ShapeSpec) -> Result<DomainSample> {
    spec.validate()?;
    let shape = &spec.shape;
    let h = spec.resolution;
    let boundary_points = shape.boundary_samples(h);
    let bdist = |p: Point| -> f64 {
        shape.boundary_distance(p).unwrap_or_else(|| {
            boundary_points
                .iter()
                .map(|&b| euclid(p, b))
                .fold(f64::INFINITY, f64::min)
        })
    };
    let (lo, hi) = shape.bounding_box();
    let (i0, i1) = ((lo[0] / h).floor() as i64, (hi[0] / h).ceil() as i64);
    let (j0, j1) = ((lo[1] / h).floor() as i64, (hi[1] / h).ceil() as i64);
    let min_depth = spec.band * h;

    let mut coords = Vec::new();
    let mut depth = Vec::new();
    let mut index: HashMap<(i64, i64), usize> = HashMap::new();
    for j in j0..=j1 {
        for i in i0..=i1 {
            let p = [i as f64 * h, j as f64 * h];
            if !shape.contains(p) {
                continue;
            }
            let d = bdist(p);
            if d <= 0.0 || d < min_depth {
                continue;
            }
            index.insert((i, j), coords.len());
            coords.push(p);
            depth.push(d);
        }
    }
    let label = shape.name().to_string();
    if coords.is_empty() {
        return Err(Error::EmptyInterior(label));
    }

    let mut edges = Vec::new();
    for (&(i, j), &u) in &index {
        for &(di, dj) in &STENCIL {
            let Some(&v) = index.get(&(i + di, j + dj)) else {
                continue;
            };
            if u >= v {
                continue;
            }
            let (a, b) = (coords[u], coords[v]);
            let inside = [0.25, 0.5, 0.75].iter().all(|&t| {
                shape.contains([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])])
            });
            if inside {
                edges.push((u, v, euclid(a, b)));
            }
        }
    }
    let graph = LengthGraph::from_edges(coords.len(), &edges, Some(coords))?;
    DomainSample::from_parts(DomainParts {
        label,
        graph,
        boundary_distance: depth,
        boundary_points,
        ambient: Ambient::Euclidean,
        shape: Some(spec.clone()),
        bounded: shape.is_bounded(),
        resolution: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_core::Shape;

    #[test]
    fn unit_square_coarse_has_single_center() {
        let spec = ShapeSpec::new(Shape::Square { side: 1.0 }, 0.5).with_band(0.0);
        let d = build_grid_domain(&spec).unwrap();
        assert_eq!(d.num_points(), 1);
        assert_eq!(d.point(0), [0.5, 0.5]);
        assert_eq!(d.boundary_distance(0), 0.5);
    }

    #[test]
    fn unit_disk_boundary_distance_is_analytic() {
        let d = build_grid_domain(&ShapeSpec::disk(1.0, 0.1)).unwrap();
        for i in 0..d.num_points() {
            let p = d.point(i);
            assert!((d.boundary_distance(i) - (1.0 - p[0].hypot(p[1]))).abs() < 1e-15);
        }
    }

    #[test]
    fn annulus_boundary_distance_uses_both_circles() {
        let spec = ShapeSpec::new(
            Shape::Annulus {
                inner_radius: 0.2,
                outer_radius: 1.0,
            },
            0.05,
        );
        let d = build_grid_domain(&spec).unwrap();
        for i in 0..d.num_points() {
            let r = d.point(i)[0].hypot(d.point(i)[1]);
            assert!((d.boundary_distance(i) - (r - 0.2).min(1.0 - r)).abs() < 1e-15);
        }
    }

    #[test]
    fn too_coarse_is_empty_interior() {
        let spec = ShapeSpec::new(Shape::Square { side: 1.0 }, 0.6);
        assert!(matches!(build_grid_domain(&spec), Err(Error::EmptyInterior(_))));
    }

    #[test]
    fn boundary_samples_respect_spacing() {
        let spec = ShapeSpec::new(Shape::LShape { arm_width: 1.0, arm_length: 2.0 }, 0.1);
        let pts = spec.shape.boundary_samples(0.1);
        // every boundary sample has a neighbour sample within h
        for (k, p) in pts.iter().enumerate() {
            let near = pts
                .iter()
                .enumerate()
                .filter(|(m, _)| *m != k)
                .map(|(_, q)| euclid(*p, *q))
                .fold(f64::INFINITY, f64::min);
            assert!(near <= 0.1 + 1e-12);
        }
    }

    #[test]
    fn polygon_uses_sampled_boundary_distance() {
        let spec = ShapeSpec::new(
            Shape::Polygon {
                vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            },
            0.1,
        );
        let d = build_grid_domain(&spec).unwrap();
        for i in 0..d.num_points() {
            let p = d.point(i);
            let exact = p[0].min(1.0 - p[0]).min(p[1]).min(1.0 - p[1]);
            // samples sit on the lattice of the boundary, so grid points see them exactly
            assert!((d.boundary_distance(i) - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn disconnected_shape_is_rejected() {
        // thin waist: two squares joined by a sliver narrower than the band
        let spec = ShapeSpec::new(
            Shape::Polygon {
                vertices: vec![
                    [0.0, 0.0],
                    [1.0, 0.0],
                    [1.0, 0.45],
                    [2.0, 0.45],
                    [2.0, 0.0],
                    [3.0, 0.0],
                    [3.0, 1.0],
                    [2.0, 1.0],
                    [2.0, 0.55],
                    [1.0, 0.55],
                    [1.0, 1.0],
                    [0.0, 1.0],
                ],
            },
            0.1,
        );
        assert!(matches!(build_grid_domain(&spec), Err(Error::Disconnected(..))));
    }
}
