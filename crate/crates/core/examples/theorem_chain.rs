//! Walk the characterization chain on a disk automorphism: each measured
//! constant is fed to the ledger and the next class is measured against the
//! constant it predicts.

use std::sync::Arc;

use qhgeo::ledger::{predicted_constants, LedgerInputs, LemmaId};
use qhgeo::mapping::{
    builtin_mapping, estimate_local_bilipschitz, estimate_local_quasisymmetry, estimate_partial_lipschitz,
    estimate_relative, estimate_semisolid, PlaneMap,
};
use qhgeo::sampling::{rng, sample_pairs, sample_vertices};
use qhgeo::{build_grid_domain, QuasihyperbolicMetric, ShapeSpec};

fn row(name: &str, measured: f64, predicted: f64) {
    let ok = if measured <= predicted * 1.05 { "ok" } else { "VIOLATED" };
    println!("{name:<28}{measured:>12.4}{predicted:>14.4}  {ok}");
}

fn main() -> qhgeo::Result<()> {
    let d = Arc::new(build_grid_domain(&ShapeSpec::disk(1.0, 0.02))?);
    let k = Arc::new(QuasihyperbolicMetric::new(d.clone()));
    let f = builtin_mapping("automorphism", PlaneMap::DiskAutomorphism { a: [0.5, 0.0] }, k, &ShapeSpec::disk(1.0, 0.02))?;
    let mut r = rng(6);
    let centers = sample_vertices(d.num_points(), 300, &mut r);
    let pairs = sample_pairs(d.num_points(), 2000, &mut r);
    let c = d.quasiconvexity();
    let lambda = 0.5;
    let inputs = LedgerInputs { c: Some(c), ..Default::default() };

    println!("{:<28}{:>12}{:>14}", "constant", "measured", "predicted");
    let l = estimate_partial_lipschitz(&f, lambda, &centers)?.constant;
    let rel = predicted_constants(LemmaId::PartialToRelative, LedgerInputs { l: Some(l), lambda: Some(lambda), ..inputs })?;
    let c1 = estimate_relative(&f, rel.derived["t0"], &centers)?.constant;
    row("relative c1", c1, rel.derived["theta_slope"]);

    let semi = predicted_constants(LemmaId::RelativeToSemisolid, LedgerInputs { c1: Some(c1), t0: Some(lambda), ..inputs })?;
    let c2 = estimate_semisolid(&f, &pairs).constant;
    row("semisolid c2", c2, semi.derived["c2"]);

    let part = predicted_constants(LemmaId::SemisolidToPartial, LedgerInputs { c2: Some(c2), ..inputs })?;
    let l2 = estimate_partial_lipschitz(&f, part.derived["lambda"], &centers)?.constant;
    row("partial Lipschitz L", l2, part.derived["L"]);

    let local = predicted_constants(LemmaId::RelativeToLocalBilipschitz, LedgerInputs { c1: Some(c1), t0: Some(lambda), ..inputs })?;
    let theta1 = local.derived["theta1"];
    let l1 = estimate_local_bilipschitz(&f, theta1, &centers)?.l1;
    row("local biLipschitz L1", l1, local.derived["L1"]);

    let qs = predicted_constants(LemmaId::LocalBilipschitzToLocalQs, LedgerInputs { l: Some(l1), q: Some(theta1), ..inputs })?;
    let slope = estimate_local_quasisymmetry(&f, theta1, &centers)?.constant;
    row("local QS slope", slope, qs.derived["eta_slope"]);

    let back = predicted_constants(LemmaId::LocalQsToPartial, LedgerInputs { c2: Some(c2), q: Some(theta1), ..inputs })?;
    let l3 = estimate_partial_lipschitz(&f, back.derived["lambda"], &centers)?.constant;
    row("partial Lipschitz L (QS)", l3, back.derived["L"]);
    Ok(())
}
