//! A domain given as a raw length graph: a path of six vertices whose two ends
//! are boundary points. Its quasihyperbolic metric is computed intrinsically.

use std::sync::Arc;

use qhgeo::metric_core::LengthGraphImport;
use qhgeo::QuasihyperbolicMetric;

fn main() -> qhgeo::Result<()> {
    let import: LengthGraphImport = serde_json::from_str(
        r#"{
            "vertices": 6,
            "edges": [[0, 1, 1.0], [1, 2, 1.0], [2, 3, 1.0], [3, 4, 1.0], [4, 5, 1.0]],
            "boundary": [0, 5]
        }"#,
    )?;
    let d = Arc::new(import.build("segment")?);
    let k = QuasihyperbolicMetric::new(d.clone());
    println!("interior vertices: {}", d.num_points());
    for x in 0..d.num_points() {
        let row: Vec<String> = (0..d.num_points()).map(|y| format!("{:.3}", k.distance(x, y))).collect();
        println!("d_G = {:.1}  k: {}", d.boundary_distance(x), row.join(" "));
    }
    Ok(())
}
