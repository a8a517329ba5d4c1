//! BHK deformation of the quasihyperbolic disk: diameter bounds, the distance
//! from the base point to the boundary, and comparability with the density.

use std::f64::consts::E;
use std::sync::Arc;

use qhgeo::deformations::{verify_lemma_f_c, DeformedSpace};
use qhgeo::sampling::{continuous_pool, rng};
use qhgeo::{build_grid_domain, QuasihyperbolicMetric, ShapeSpec};

fn main() -> qhgeo::Result<()> {
    let d = Arc::new(build_grid_domain(&ShapeSpec::disk(1.0, 0.02))?);
    let k = Arc::new(QuasihyperbolicMetric::new(d.clone()));
    let w = d.deepest_vertex();
    let pool = continuous_pool(&d, 46, 0.0, &mut rng(2));

    println!("{:>6}{:>12}{:>12}{:>10}{:>12}{:>12}{:>8}", "eps", "diam lower", "diam upper", "2/eps", "d_eps(w)", "1/(e eps)", "C");
    for eps in [0.1, 0.2, 0.5, 0.9] {
        let s = DeformedSpace::bhk(k.clone(), w, eps)?;
        let (lo, hi) = s.diameter_bounds();
        let c = verify_lemma_f_c(&s, &pool)?;
        println!(
            "{eps:>6}{lo:>12.4}{hi:>12.4}{:>10.2}{:>12.4}{:>12.4}{:>8.3}",
            2.0 / eps,
            s.boundary_distance(w),
            1.0 / (E * eps),
            c.constant
        );
    }
    Ok(())
}
