use std::sync::Arc;

use proptest::prelude::*;
use qhgeo::deformations::DeformedSpace;
use qhgeo::hyperbolicity::{basepoint_identity_residual, gromov_product};
use qhgeo::ledger::{predicted_constants, LedgerInputs, LemmaId};
use qhgeo::mapping::{cross_ratio, PlaneMap};
use qhgeo::metric_core::{check_metric_axioms, euclid, DistanceTable};
use qhgeo::sampling::rng;
use qhgeo::{build_grid_domain, DomainSample, QuasihyperbolicMetric, Shape, ShapeSpec};

fn shape() -> impl Strategy<Value = Shape> {
    prop_oneof![
        (0.6..1.5f64).prop_map(|r| Shape::Disk { radius: r, center: [0.0, 0.0] }),
        (0.6..1.5f64).prop_map(|s| Shape::Square { side: s }),
        (0.3..0.5f64).prop_map(|w| Shape::LShape { arm_width: w, arm_length: 1.0 }),
        (0.2..0.5f64).prop_map(|r| Shape::Annulus { inner_radius: r, outer_radius: 1.0 }),
    ]
}

fn qh(shape: Shape, h: f64) -> Arc<QuasihyperbolicMetric> {
    let d = build_grid_domain(&ShapeSpec::new(shape, h)).unwrap();
    Arc::new(QuasihyperbolicMetric::new(Arc::new(d)))
}

fn pool(d: &DomainSample, seed: u64) -> Vec<usize> {
    qhgeo::sampling::sample_vertices(d.num_points(), 24, &mut rng(seed))
}

fn point() -> impl Strategy<Value = [f64; 2]> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(x, y)| [x, y])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn quasihyperbolic_tables_are_metrics(s in shape(), seed in 0u64..1000) {
        let k = qh(s, 0.05);
        let t = k.table(&pool(k.base(), seed));
        prop_assert!(check_metric_axioms(&t, 2000, 1e-12, &mut rng(seed)).passed());
    }

    #[test]
    fn distance_bounded_by_exponential_of_k(s in shape(), seed in 0u64..1000) {
        let k = qh(s, 0.05);
        let d = k.base().clone();
        let p = pool(&d, seed);
        for &x in &p {
            for &y in &p {
                let lhs = d.ambient_distance(x, y);
                let rhs = (k.distance(x, y).exp() - 1.0) * d.boundary_distance(x);
                prop_assert!(lhs <= rhs * 1.05 + 1e-12, "{lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn k_is_scale_invariant(s in shape(), seed in 0u64..1000) {
        let small = qh(s.clone(), 0.05);
        let big = qh(s.scaled(2.0), 0.1);
        prop_assert_eq!(small.base().num_points(), big.base().num_points());
        let p = pool(small.base(), seed);
        for &x in &p {
            for &y in &p {
                let (a, b) = (small.distance(x, y), big.distance(x, y));
                prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn basepoint_identity_holds_in_bhk(eps in 0.05..0.95f64, seed in 0u64..1000) {
        let k = qh(Shape::Disk { radius: 1.0, center: [0.0, 0.0] }, 0.08);
        let w = k.base().deepest_vertex();
        let s = DeformedSpace::bhk(k.clone(), w, eps).unwrap();
        let t = s.table(&pool(k.base(), seed));
        let n = t.len();
        for i in 0..n.min(6) {
            let r = basepoint_identity_residual(&t, i, (i + 1) % n, (i + 2) % n, (i + 3) % n, (i + 4) % n, (i + 5) % n);
            prop_assert!(r <= 1e-12);
            prop_assert!(gromov_product(&t, i, (i + 1) % n, (i + 2) % n) >= -1e-12);
        }
    }

    #[test]
    fn bhk_diameter_below_two_over_eps(eps in 0.05..0.95f64) {
        let k = qh(Shape::Disk { radius: 1.0, center: [0.0, 0.0] }, 0.08);
        let s = DeformedSpace::bhk(k.clone(), k.base().deepest_vertex(), eps).unwrap();
        let (lower, upper) = s.diameter_bounds();
        prop_assert!(lower <= upper);
        prop_assert!(upper <= 2.0 / eps);
    }

    #[test]
    fn mobius_preserves_cross_ratios(
        a in point(), b in point(), c in point(), d in point(),
        q in proptest::array::uniform4(point()),
    ) {
        let m = PlaneMap::Mobius { a, b, c, d };
        prop_assume!(m.validate().is_ok());
        let images: Vec<[f64; 2]> = q.iter().map(|&p| m.apply(p)).collect();
        prop_assume!(images.iter().all(|p| p[0].is_finite() && p[1].is_finite() && p[0].hypot(p[1]) < 1e6));
        let all: Vec<[f64; 2]> = q.iter().copied().chain(images.iter().copied()).collect();
        let t = DistanceTable::from_fn((0..8).collect(), |i, j| euclid(all[i], all[j]));
        let pairs_apart = (0..4).all(|i| (0..i).all(|j| t.get(i, j) > 1e-3 && t.get(i + 4, j + 4) > 1e-6));
        prop_assume!(pairs_apart);
        let (x, y) = (cross_ratio(&t, [0, 1, 2, 3]), cross_ratio(&t, [4, 5, 6, 7]));
        prop_assert!((x - y).abs() <= 1e-6 * x.max(y), "{x} vs {y}");
    }

    #[test]
    fn plane_maps_invert(p in point(), a in (-0.9..0.9f64, -0.4..0.4f64), s in 0.1..10.0f64) {
        prop_assume!(p[0].hypot(p[1]) < 0.95);
        for m in [
            PlaneMap::DiskAutomorphism { a: [a.0, a.1] },
            PlaneMap::Similarity { scale: s, translation: [a.1, a.0] },
            PlaneMap::Compose {
                first: Box::new(PlaneMap::DiskAutomorphism { a: [a.0, a.1] }),
                second: Box::new(PlaneMap::Similarity { scale: s, translation: [0.0, 1.0] }),
            },
        ] {
            let back = m.inverse().apply(m.apply(p));
            prop_assert!(euclid(back, p) < 1e-9, "{m:?}: {back:?} vs {p:?}");
        }
    }

    #[test]
    fn ledger_constants_positive_and_range_checked(
        c in 1.0..4.0f64, c1 in 1.0..10.0f64, t0 in 0.01..1.0f64, lambda in -1.0..2.0f64,
    ) {
        let l = predicted_constants(
            LemmaId::RelativeToSemisolid,
            LedgerInputs { c: Some(c), c1: Some(c1), t0: Some(t0), ..Default::default() },
        ).unwrap();
        prop_assert!(l.derived.values().all(|v| v.is_finite() && *v > 0.0));
        let r = predicted_constants(
            LemmaId::PartialToRelative,
            LedgerInputs { l: Some(c1), lambda: Some(lambda), ..Default::default() },
        );
        prop_assert_eq!(r.is_ok(), lambda > 0.0 && lambda < 1.0);
    }
}
