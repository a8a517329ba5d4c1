//! Four-point δ and rough starlikeness of quasihyperbolic metrics.
//!
//! The disk and square are uniform, hence Gromov hyperbolic; the annulus is not
//! simply connected and its δ grows with the sampled scale.

use std::sync::Arc;

use qhgeo::hyperbolicity::hyperbolicity_report;
use qhgeo::sampling::{continuous_pool, rng, sample_tuples};
use qhgeo::{build_grid_domain, QuasihyperbolicMetric, Shape, ShapeSpec};

fn main() -> qhgeo::Result<()> {
    let shapes = [
        ("disk", Shape::Disk { radius: 1.0, center: [0.0, 0.0] }),
        ("square", Shape::Square { side: 1.0 }),
        ("l-shape", Shape::LShape { arm_width: 0.4, arm_length: 1.0 }),
        ("annulus", Shape::Annulus { inner_radius: 0.5, outer_radius: 1.0 }),
    ];
    println!("{:<10}{:>10}{:>10}{:>12}", "domain", "delta", "K", "quadruples");
    for (name, shape) in shapes {
        let d = Arc::new(build_grid_domain(&ShapeSpec::new(shape, 0.03))?);
        let k = QuasihyperbolicMetric::new(d.clone());
        let mut r = rng(1);
        let pool = continuous_pool(&d, 60, 0.0, &mut r);
        let quads = sample_tuples::<4, _>(pool.len(), 4000, &mut r);
        let rep = hyperbolicity_report(&d, &k, &pool, &quads, d.deepest_vertex());
        println!(
            "{name:<10}{:>10.3}{:>10.3}{:>12}",
            rep.delta,
            rep.starlikeness_k.unwrap_or(f64::NAN),
            rep.quadruples_tested
        );
    }
    Ok(())
}
