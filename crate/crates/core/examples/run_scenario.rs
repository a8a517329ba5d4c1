//! Run a scenario file and print one line per check.
//!
//! ```text
//! cargo run --release --example run_scenario -- crates/core/scenarios/calibration.json
//! ```

use std::path::PathBuf;

use qhgeo::scenario::{run_scenario, RunOptions, Scenario};

fn main() -> qhgeo::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/theorem1_disk_automorphism.json")
    });
    let scenario = Scenario::load(&path)?;
    let report = run_scenario(&scenario, &RunOptions { timings: true, ..Default::default() })?;
    for c in &report.checks {
        println!("{:>3} {:<18} {:<24} {:?} ({:.0} ms)", c.index, c.id, c.subject, c.status, c.runtime_ms.unwrap_or(0.0));
        for cmp in &c.comparisons {
            let bound = cmp.predicted.map(|p| format!("{p:.4}")).unwrap_or_default();
            println!("      {:<32}{:>14.6} {:?} {bound}", cmp.name, cmp.measured, cmp.relation);
        }
    }
    println!("passed: {}", report.passed);
    std::process::exit(report.exit_code());
}
