use std::sync::Arc;

use log::warn;
use serde::Serialize;

use super::{build_grid_domain, euclid, Ambient, DomainSample, Point, ShapeSpec};
use crate::error::Result;

#[derive(Debug, Clone, Serialize)]
pub struct QuasiconvexityEstimate {
    /// Max of graph distance over ambient distance; a lower bound of the true `c`.
    pub c: f64,
    pub worst_pair: Option<(usize, usize)>,
    pub tested: usize,
    pub skipped: usize,
}

/// Sampled quasiconvexity constant `max ℓ(x,y) / d(x,y)`. Coincident pairs are skipped.
pub fn estimate_quasiconvexity(d: &DomainSample, pairs: &[(usize, usize)]) -> QuasiconvexityEstimate {
    let valid: Vec<(usize, usize)> = pairs.iter().copied().filter(|(x, y)| x != y).collect();
    let skipped = pairs.len() - valid.len();
    if skipped > 0 {
        warn!("quasiconvexity: skipped {skipped} coincident pairs");
    }
    let lengths = d.length_metric().pair_distances(&valid);
    let mut est = QuasiconvexityEstimate {
        c: 1.0,
        worst_pair: None,
        tested: valid.len(),
        skipped,
    };
    for (&(x, y), &l) in valid.iter().zip(&lengths) {
        let ratio = l / d.ambient_distance(x, y);
        if est.worst_pair.is_none() || ratio > est.c {
            est.c = ratio;
            est.worst_pair = Some((x, y));
        }
    }
    est
}

/// Largest radius allowed by the ball-containment lemma, `2 d_G(x) / (2 + c)`,
/// divided by `slack`.
pub fn lemma_c_radius(d: &DomainSample, x: usize, slack: f64) -> f64 {
    2.0 * d.boundary_distance(x) / (2.0 + d.quasiconvexity()) / slack
}

#[derive(Debug, Clone, Serialize)]
pub struct ContainmentReport {
    pub center: usize,
    pub radius: f64,
    pub contained: bool,
    pub scanned: usize,
    /// First sampled ambient point within the ball but outside the domain.
    pub violation: Option<Point>,
}

/// Scan sampled ambient points within `r` of `x` and report the first one not in the domain.
///
/// Planar domains are scanned on a lattice of spacing `h/2` centred at `x`;
/// imported graphs scan their boundary samples.
pub fn check_ball_containment(d: &DomainSample, x: usize, r: f64) -> ContainmentReport {
    let mut report = ContainmentReport {
        center: x,
        radius: r,
        contained: true,
        scanned: 0,
        violation: None,
    };
    if r <= 0.0 {
        return report;
    }
    match (d.shape(), d.ambient()) {
        (Some(spec), _) => {
            let c = d.point(x);
            let step = d.resolution() / 2.0;
            let m = (r / step).ceil() as i64;
            'scan: for j in -m..=m {
                for i in -m..=m {
                    let p = [c[0] + i as f64 * step, c[1] + j as f64 * step];
                    if euclid(p, c) >= r {
                        continue;
                    }
                    report.scanned += 1;
                    if !spec.shape.contains(p) {
                        report.contained = false;
                        report.violation = Some(p);
                        break 'scan;
                    }
                }
            }
        }
        (None, Ambient::Table(_)) => {
            for b in 0..d.boundary_count() {
                report.scanned += 1;
                if d.ambient_to_boundary(x, b).unwrap() < r {
                    report.contained = false;
                    report.violation = Some([b as f64, f64::NAN]);
                    break;
                }
            }
        }
        _ => {}
    }
    report
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncationSensitivity {
    pub at_r: f64,
    pub at_2r: f64,
    pub relative_change: f64,
    pub stable: bool,
}

/// Re-evaluate a quantity on a domain truncated at `2R` and flag relative drift above 1%.
pub fn truncation_sensitivity(
    spec: &ShapeSpec,
    quantity: impl Fn(Arc<DomainSample>) -> f64,
) -> Result<TruncationSensitivity> {
    let base = build_grid_domain(spec)?;
    let a = quantity(Arc::new(base));
    let r = spec.shape.truncation_radius().unwrap_or(0.0);
    let b = if r > 0.0 {
        let mut wide = spec.clone();
        wide.shape = spec.shape.with_truncation_radius(2.0 * r);
        quantity(Arc::new(build_grid_domain(&wide)?))
    } else {
        a
    };
    let rel = if a == b { 0.0 } else { (a - b).abs() / a.abs().max(b.abs()) };
    Ok(TruncationSensitivity {
        at_r: a,
        at_2r: b,
        relative_change: rel,
        stable: rel < 0.01,
    })
}
