//! Distortion data of a disk automorphism sampled on the grid.

use std::sync::Arc;

use qhgeo::mapping::{builtin_mapping, mapping_class_report, PlaneMap, ReportParams};
use qhgeo::sampling::{continuous_pool, rng, sample_distinct_tuples, sample_pairs, sample_vertices};
use qhgeo::{build_grid_domain, QuasihyperbolicMetric, ShapeSpec};

fn main() -> qhgeo::Result<()> {
    let d = Arc::new(build_grid_domain(&ShapeSpec::disk(1.0, 0.02))?);
    let k = Arc::new(QuasihyperbolicMetric::new(d.clone()));
    let f = builtin_mapping("automorphism", PlaneMap::DiskAutomorphism { a: [0.5, 0.0] }, k, &ShapeSpec::disk(1.0, 0.02))?;

    let mut r = rng(5);
    let points = continuous_pool(&d, 40, 0.0, &mut r);
    let params = ReportParams {
        lambda: 0.5,
        t0: 0.5,
        q: 0.5,
        centers: sample_vertices(d.num_points(), 200, &mut r),
        pairs: sample_pairs(d.num_points(), 2000, &mut r),
        quadruples: sample_distinct_tuples::<4, _>(points.len(), 1000, &mut r),
        points,
    };
    let rep = mapping_class_report(&f, &params)?;
    println!("{}", serde_json::to_string_pretty(&rep)?);
    Ok(())
}
