//! Sphericalization of a truncated half-plane about the boundary point 0.
//!
//! The quasimetric preserves cross-ratios exactly; its chain metric stays
//! within a factor 4 of it.

use std::sync::Arc;

use qhgeo::deformations::{nearest_boundary_sample, DeformedSpace};
use qhgeo::mapping::{ambient_table, cross_ratio_slope, estimate_qh_bilipschitz, MappingPair};
use qhgeo::sampling::{continuous_pool, rng, sample_distinct_tuples, sample_pairs};
use qhgeo::{build_grid_domain, QuasihyperbolicMetric, Shape, ShapeSpec};

fn main() -> qhgeo::Result<()> {
    let d = Arc::new(build_grid_domain(&ShapeSpec::new(Shape::HalfPlane { truncation_radius: 4.0 }, 0.04))?);
    let p = nearest_boundary_sample(&d, [0.0, 0.0]).expect("boundary samples");
    let s = DeformedSpace::sphericalize(d.clone(), p)?;

    let mut r = rng(4);
    let pool = continuous_pool(&d, 50, 0.0, &mut r);
    let quasi = s.quasimetric_table(&pool);
    let chain = s.table(&pool);
    let ratios: Vec<f64> = (0..pool.len())
        .flat_map(|i| ((i + 1)..pool.len()).map(move |j| (i, j)))
        .map(|(i, j)| chain.get(i, j) / quasi.get(i, j))
        .collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    println!("chain / quasimetric over {} pairs: min {lo:.4} (bound 0.25)", ratios.len());

    let quads = sample_distinct_tuples::<4, _>(pool.len(), 2000, &mut r);
    let slope = cross_ratio_slope(&ambient_table(&d, &pool), &chain, &quads);
    println!("cross-ratio slope, euclidean vs sphericalized: {:.12}", slope.slope);

    let k = Arc::new(QuasihyperbolicMetric::new(d.clone()));
    let ks = Arc::new(QuasihyperbolicMetric::new(Arc::new(s.to_domain()?)));
    let id = MappingPair::identity_between("sphericalize", k, ks)?;
    let m = estimate_qh_bilipschitz(&id, &sample_pairs(d.num_points(), 1000, &mut r));
    println!("quasihyperbolic biLipschitz constant of the identity: {:.4}", m.constant);
    Ok(())
}
