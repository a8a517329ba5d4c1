//! Analytic planar shapes used to generate grid domains.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{euclid, Point};
use crate::error::{Error, Result};

/// A planar open set with (mostly) analytic boundary distance.
///
/// Unbounded shapes carry a truncation radius: only points with `|p| < R` are
/// sampled, but the boundary distance is always measured to the true boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum Shape {
    #[serde(rename = "disk")]
    Disk {
        radius: f64,
        #[serde(default)]
        center: Point,
    },
    /// Concentric annulus around the origin.
    #[serde(rename = "annulus")]
    Annulus { inner_radius: f64, outer_radius: f64 },
    /// The square `[0, side]^2`.
    #[serde(rename = "square")]
    Square { side: f64 },
    /// `[0,l]x[0,w] ∪ [0,w]x[0,l]`, reflex corner at `(w, w)`.
    #[serde(rename = "l-shape")]
    LShape { arm_width: f64, arm_length: f64 },
    /// Upper half-plane `y > 0`.
    #[serde(rename = "half-plane-truncation")]
    HalfPlane { truncation_radius: f64 },
    /// Plane minus the origin.
    #[serde(rename = "punctured-plane-truncation")]
    PuncturedPlane { truncation_radius: f64 },
    /// Circular sector `{0 < arg z < angle, |z| < radius}`.
    #[serde(rename = "sector")]
    Sector { radius: f64, angle: f64 },
    /// Simple polygon; boundary distance comes from boundary samples.
    #[serde(rename = "custom-polygon")]
    Polygon { vertices: Vec<Point> },
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    euclid(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

fn polygon_contains(vertices: &[Point], p: Point) -> bool {
    let mut inside = false;
    let n = vertices.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn polygon_edge_distance(vertices: &[Point], p: Point) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| segment_distance(p, vertices[i], vertices[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

fn sample_segment(a: Point, b: Point, h: f64, out: &mut Vec<Point>) {
    let n = (euclid(a, b) / h).ceil().max(1.0) as usize;
    for k in 0..n {
        let t = k as f64 / n as f64;
        out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
    }
}

fn sample_arc(center: Point, r: f64, from: f64, to: f64, h: f64, closed: bool, out: &mut Vec<Point>) {
    let n = ((to - from).abs() * r / h).ceil().max(1.0) as usize;
    let last = if closed { n } else { n + 1 };
    for k in 0..last {
        let t = from + (to - from) * k as f64 / n as f64;
        out.push([center[0] + r * t.cos(), center[1] + r * t.sin()]);
    }
}

impl Shape {
    fn l_vertices(w: f64, l: f64) -> [Point; 6] {
        [[0.0, 0.0], [l, 0.0], [l, w], [w, w], [w, l], [0.0, l]]
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be positive, got {v}")))
            }
        };
        match self {
            Shape::Disk { radius, .. } => pos("radius", *radius),
            Shape::Annulus { inner_radius, outer_radius } => {
                pos("inner_radius", *inner_radius)?;
                pos("outer_radius", *outer_radius)?;
                if inner_radius >= outer_radius {
                    return Err(Error::config("inner_radius must be below outer_radius"));
                }
                Ok(())
            }
            Shape::Square { side } => pos("side", *side),
            Shape::LShape { arm_width, arm_length } => {
                pos("arm_width", *arm_width)?;
                pos("arm_length", *arm_length)?;
                if arm_width >= arm_length {
                    return Err(Error::config("arm_width must be below arm_length"));
                }
                Ok(())
            }
            Shape::HalfPlane { truncation_radius } | Shape::PuncturedPlane { truncation_radius } => {
                pos("truncation_radius", *truncation_radius)
            }
            Shape::Sector { radius, angle } => {
                pos("radius", *radius)?;
                if !(*angle > 0.0 && *angle <= PI) {
                    return Err(Error::config(format!("angle must lie in (0, pi], got {angle}")));
                }
                Ok(())
            }
            Shape::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return Err(Error::config("custom-polygon needs at least 3 vertices"));
                }
                Ok(())
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Shape::Disk { .. } => "disk",
            Shape::Annulus { .. } => "annulus",
            Shape::Square { .. } => "square",
            Shape::LShape { .. } => "l-shape",
            Shape::HalfPlane { .. } => "half-plane-truncation",
            Shape::PuncturedPlane { .. } => "punctured-plane-truncation",
            Shape::Sector { .. } => "sector",
            Shape::Polygon { .. } => "custom-polygon",
        }
    }

    /// Whether the underlying (untruncated) domain is bounded.
    pub fn is_bounded(&self) -> bool {
        !matches!(self, Shape::HalfPlane { .. } | Shape::PuncturedPlane { .. })
    }

    pub fn truncation_radius(&self) -> Option<f64> {
        match self {
            Shape::HalfPlane { truncation_radius } | Shape::PuncturedPlane { truncation_radius } => {
                Some(*truncation_radius)
            }
            _ => None,
        }
    }

    /// Same shape with the truncation radius replaced (no-op for bounded shapes).
    pub fn with_truncation_radius(&self, r: f64) -> Shape {
        match self {
            Shape::HalfPlane { .. } => Shape::HalfPlane { truncation_radius: r },
            Shape::PuncturedPlane { .. } => Shape::PuncturedPlane { truncation_radius: r },
            other => other.clone(),
        }
    }

    /// Open-set membership, including the truncation disk for unbounded shapes.
    pub fn contains(&self, p: Point) -> bool {
        let r = euclid(p, [0.0, 0.0]);
        match self {
            Shape::Disk { radius, center } => euclid(p, *center) < *radius,
            Shape::Annulus { inner_radius, outer_radius } => r > *inner_radius && r < *outer_radius,
            Shape::Square { side } => p[0] > 0.0 && p[0] < *side && p[1] > 0.0 && p[1] < *side,
            Shape::LShape { arm_width, arm_length } => {
                let (w, l) = (*arm_width, *arm_length);
                let in_a = p[0] > 0.0 && p[0] < l && p[1] > 0.0 && p[1] < w;
                let in_b = p[0] > 0.0 && p[0] < w && p[1] > 0.0 && p[1] < l;
                in_a || in_b
            }
            Shape::HalfPlane { truncation_radius } => p[1] > 0.0 && r < *truncation_radius,
            Shape::PuncturedPlane { truncation_radius } => r > 0.0 && r < *truncation_radius,
            Shape::Sector { radius, angle } => {
                if r <= 0.0 || r >= *radius {
                    return false;
                }
                let a = p[1].atan2(p[0]);
                a > 0.0 && a < *angle
            }
            Shape::Polygon { vertices } => polygon_contains(vertices, p),
        }
    }

    /// Exact distance from an interior point to the boundary of the (untruncated)
    /// domain, or `None` when the shape has no analytic formula.
    pub fn boundary_distance(&self, p: Point) -> Option<f64> {
        let r = euclid(p, [0.0, 0.0]);
        Some(match self {
            Shape::Disk { radius, center } => radius - euclid(p, *center),
            Shape::Annulus { inner_radius, outer_radius } => (r - inner_radius).min(outer_radius - r),
            Shape::Square { side } => p[0].min(side - p[0]).min(p[1]).min(side - p[1]),
            Shape::LShape { arm_width, arm_length } => {
                polygon_edge_distance(&Self::l_vertices(*arm_width, *arm_length), p)
            }
            Shape::HalfPlane { .. } => p[1],
            Shape::PuncturedPlane { .. } => r,
            Shape::Sector { radius, angle } => {
                let o = [0.0, 0.0];
                let a = [*radius, 0.0];
                let b = [radius * angle.cos(), radius * angle.sin()];
                (radius - r)
                    .min(segment_distance(p, o, a))
                    .min(segment_distance(p, o, b))
            }
            Shape::Polygon { .. } => return None,
        })
    }

    /// Points of the (untruncated) boundary within the sampling window, spaced at most `h`.
    pub fn boundary_samples(&self, h: f64) -> Vec<Point> {
        let mut out = Vec::new();
        match self {
            Shape::Disk { radius, center } => sample_arc(*center, *radius, 0.0, 2.0 * PI, h, true, &mut out),
            Shape::Annulus { inner_radius, outer_radius } => {
                sample_arc([0.0, 0.0], *inner_radius, 0.0, 2.0 * PI, h, true, &mut out);
                sample_arc([0.0, 0.0], *outer_radius, 0.0, 2.0 * PI, h, true, &mut out);
            }
            Shape::Square { side } => {
                let s = *side;
                let v = [[0.0, 0.0], [s, 0.0], [s, s], [0.0, s]];
                for i in 0..4 {
                    sample_segment(v[i], v[(i + 1) % 4], h, &mut out);
                }
            }
            Shape::LShape { arm_width, arm_length } => {
                let v = Self::l_vertices(*arm_width, *arm_length);
                for i in 0..v.len() {
                    sample_segment(v[i], v[(i + 1) % v.len()], h, &mut out);
                }
            }
            Shape::HalfPlane { truncation_radius } => {
                let r = *truncation_radius;
                sample_segment([-r, 0.0], [r, 0.0], h, &mut out);
                out.push([r, 0.0]);
            }
            Shape::PuncturedPlane { .. } => out.push([0.0, 0.0]),
            Shape::Sector { radius, angle } => {
                let b = [radius * angle.cos(), radius * angle.sin()];
                sample_segment([0.0, 0.0], [*radius, 0.0], h, &mut out);
                sample_arc([0.0, 0.0], *radius, 0.0, *angle, h, false, &mut out);
                out.pop();
                sample_segment(b, [0.0, 0.0], h, &mut out);
            }
            Shape::Polygon { vertices } => {
                for i in 0..vertices.len() {
                    sample_segment(vertices[i], vertices[(i + 1) % vertices.len()], h, &mut out);
                }
            }
        }
        out
    }

    /// Axis-aligned bounding box `(min, max)` of the sampling window.
    pub fn bounding_box(&self) -> (Point, Point) {
        match self {
            Shape::Disk { radius, center } => (
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ),
            Shape::Annulus { outer_radius: r, .. } => ([-r, -r], [*r, *r]),
            Shape::Square { side } => ([0.0, 0.0], [*side, *side]),
            Shape::LShape { arm_length, .. } => ([0.0, 0.0], [*arm_length, *arm_length]),
            Shape::HalfPlane { truncation_radius: r } => ([-r, 0.0], [*r, *r]),
            Shape::PuncturedPlane { truncation_radius: r } => ([-r, -r], [*r, *r]),
            Shape::Sector { radius: r, .. } => ([-r, 0.0], [*r, *r]),
            Shape::Polygon { vertices } => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for v in vertices {
                    for k in 0..2 {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Largest length scale of the shape's own geometry.
    pub fn feature_scale(&self) -> f64 {
        match self {
            Shape::Disk { radius, .. } => *radius,
            Shape::Annulus { outer_radius, .. } => *outer_radius,
            Shape::Square { side } => *side,
            Shape::LShape { arm_length, .. } => *arm_length,
            Shape::HalfPlane { .. } | Shape::PuncturedPlane { .. } => 0.0,
            Shape::Sector { radius, .. } => *radius,
            Shape::Polygon { .. } => {
                let (lo, hi) = self.bounding_box();
                euclid(lo, hi)
            }
        }
    }

    /// Diameter of the closure, `None` for unbounded shapes.
    pub fn diameter(&self) -> Option<f64> {
        Some(match self {
            Shape::Disk { radius, .. } => 2.0 * radius,
            Shape::Annulus { outer_radius, .. } => 2.0 * outer_radius,
            Shape::Square { side } => side * 2f64.sqrt(),
            Shape::LShape { arm_length, .. } => arm_length * 2f64.sqrt(),
            Shape::HalfPlane { .. } | Shape::PuncturedPlane { .. } => return None,
            Shape::Sector { radius, angle } => {
                if *angle >= PI {
                    2.0 * radius
                } else {
                    radius.max(2.0 * radius * (angle / 2.0).sin())
                }
            }
            Shape::Polygon { vertices } => vertices
                .iter()
                .flat_map(|a| vertices.iter().map(move |b| euclid(*a, *b)))
                .fold(0.0, f64::max),
        })
    }

    /// The image of the shape under `p -> s p`.
    pub fn scaled(&self, s: f64) -> Shape {
        match self {
            Shape::Disk { radius, center } => Shape::Disk {
                radius: radius * s,
                center: [center[0] * s, center[1] * s],
            },
            Shape::Annulus { inner_radius, outer_radius } => Shape::Annulus {
                inner_radius: inner_radius * s,
                outer_radius: outer_radius * s,
            },
            Shape::Square { side } => Shape::Square { side: side * s },
            Shape::LShape { arm_width, arm_length } => Shape::LShape {
                arm_width: arm_width * s,
                arm_length: arm_length * s,
            },
            Shape::HalfPlane { truncation_radius } => Shape::HalfPlane {
                truncation_radius: truncation_radius * s,
            },
            Shape::PuncturedPlane { truncation_radius } => Shape::PuncturedPlane {
                truncation_radius: truncation_radius * s,
            },
            Shape::Sector { radius, angle } => Shape::Sector {
                radius: radius * s,
                angle: *angle,
            },
            Shape::Polygon { vertices } => Shape::Polygon {
                vertices: vertices.iter().map(|v| [v[0] * s, v[1] * s]).collect(),
            },
        }
    }
}

fn default_band() -> f64 {
    2.0
}

/// A shape together with its grid resolution.
///
/// `band` is the width (in multiples of the resolution) of the boundary layer
/// excluded from the vertex set; the quasihyperbolic density blows up there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeSpec {
    #[serde(flatten)]
    pub shape: Shape,
    pub resolution: f64,
    #[serde(default = "default_band")]
    pub band: f64,
}

impl ShapeSpec {
    pub fn new(shape: Shape, resolution: f64) -> Self {
        Self {
            shape,
            resolution,
            band: default_band(),
        }
    }

    pub fn with_band(mut self, band: f64) -> Self {
        self.band = band;
        self
    }

    pub fn with_resolution(mut self, h: f64) -> Self {
        self.resolution = h;
        self
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            shape: self.shape.scaled(s),
            resolution: self.resolution * s,
            band: self.band,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.shape.validate()?;
        if !(self.resolution.is_finite() && self.resolution > 0.0) {
            return Err(Error::config(format!(
                "resolution must be positive, got {}",
                self.resolution
            )));
        }
        if !(self.band.is_finite() && self.band >= 0.0) {
            return Err(Error::config("band must be non-negative"));
        }
        if let Some(r) = self.shape.truncation_radius() {
            if r <= self.shape.feature_scale().max(4.0 * self.resolution) {
                return Err(Error::config(format!(
                    "truncation_radius {r} must exceed the feature scale and 4 grid steps"
                )));
            }
        }
        Ok(())
    }

    pub fn disk(radius: f64, h: f64) -> Self {
        Self::new(Shape::Disk { radius, center: [0.0, 0.0] }, h)
    }
}
