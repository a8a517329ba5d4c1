//! Quasihyperbolic distances on sampled domains against their closed forms.
//!
//! ```text
//! cargo run --release --example calibrate_quasihyperbolic
//! ```

use std::f64::consts::E;
use std::sync::Arc;

use qhgeo::{build_grid_domain, QuasihyperbolicMetric, Shape, ShapeSpec};

fn main() -> qhgeo::Result<()> {
    let cases = [
        ("disk, radial", Shape::Disk { radius: 1.0, center: [0.0, 0.0] }, [0.0, 0.0], [0.5, 0.0], 2f64.ln()),
        ("half-plane, vertical", Shape::HalfPlane { truncation_radius: 3.0 }, [0.0, 1.0], [0.0, E], 1.0),
        ("punctured plane, radial", Shape::PuncturedPlane { truncation_radius: 3.0 }, [0.5, 0.0], [2.0, 0.0], 4f64.ln()),
    ];
    println!("{:<26}{:>8}{:>12}{:>12}{:>10}", "domain", "h", "k", "exact", "rel err");
    for (name, shape, a, b, exact) in cases {
        for h in [0.04, 0.02, 0.01] {
            let d = Arc::new(build_grid_domain(&ShapeSpec::new(shape.clone(), h))?);
            let k = QuasihyperbolicMetric::new(d.clone());
            let v = k.distance(d.nearest_vertex(a), d.nearest_vertex(b));
            println!("{name:<26}{h:>8}{v:>12.6}{exact:>12.6}{:>10.2e}", (v - exact).abs() / exact);
        }
    }

    // a geodesic in the disk bends toward the center
    let d = Arc::new(build_grid_domain(&ShapeSpec::disk(1.0, 0.02))?);
    let k = QuasihyperbolicMetric::new(d.clone());
    let (x, y) = (d.nearest_vertex([-0.8, 0.3]), d.nearest_vertex([0.8, 0.3]));
    let path = k.geodesic(x, y);
    let lowest = path.iter().map(|&v| d.point(v)[1]).fold(f64::INFINITY, f64::min);
    println!("\ngeodesic (-0.8, 0.3) -> (0.8, 0.3): {} vertices, lowest y = {lowest:.3}", path.len());
    Ok(())
}
