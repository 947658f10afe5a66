use finsler::ad::{Real, T1};
use finsler::body::ConvexBody;
use finsler::curvature::{schwarzian, MoebiusMap, Tangent};
use finsler::funk_hilbert::{
    funk_distance, funk_metric, hilbert_distance, hilbert_metric, reverse_funk_distance,
};
use finsler::geodesic::spray;
use finsler::metric::fundamental_tensor;
use finsler::sampling::{InnerRegion, Sampler};
use finsler::verify::test_bodies;
use proptest::prelude::*;

/// A test body with `count` random interior points and directions.
fn draw(index: usize, seed: u64, count: usize) -> (String, ConvexBody, Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let bodies = test_bodies();
    let (label, body) = bodies[index % bodies.len()].clone();
    let r = InnerRegion::new(&body, 0.9).unwrap();
    let mut s = Sampler::new(seed);
    let pts = (0..count).map(|_| s.point_in(&r)).collect();
    let dirs = (0..count).map(|_| s.gaussian(body.dim())).collect();
    (label, body, pts, dirs)
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn funk_is_positively_homogeneous(i in 0usize..8, seed: u64, lambda in 0.01f64..100.0) {
        let (label, body, x, y) = draw(i, seed, 1);
        let f = funk_metric(body).unwrap();
        let a = f.eval(&x[0], &y[0]).unwrap();
        let scaled: Vec<f64> = y[0].iter().map(|v| lambda * v).collect();
        let b = f.eval(&x[0], &scaled).unwrap();
        prop_assert!((b - lambda * a).abs() <= 1e-12 * b.max(1.0), "{}", label);
    }

    #[test]
    fn funk_is_subadditive_and_positive(i in 0usize..8, seed: u64) {
        let (label, body, x, y) = draw(i, seed, 2);
        let f = funk_metric(body).unwrap();
        let sum: Vec<f64> = y[0].iter().zip(&y[1]).map(|(a, b)| a + b).collect();
        let (a, b, c) = (
            f.eval(&x[0], &y[0]).unwrap(),
            f.eval(&x[0], &y[1]).unwrap(),
            f.eval(&x[0], &sum).unwrap(),
        );
        prop_assert!(a > 0.0 && b > 0.0, "{}", label);
        prop_assert!(c <= a + b + 1e-12 * (a + b), "{}", label);
    }

    #[test]
    fn fundamental_tensor_identities(i in 0usize..8, seed: u64, lambda in 0.1f64..10.0) {
        let (label, body, x, y) = draw(i, seed, 1);
        for m in [funk_metric(body.clone()).unwrap(), hilbert_metric(body).unwrap()] {
            let g = fundamental_tensor(&m, &x[0], &y[0]).unwrap();
            let f = m.eval(&x[0], &y[0]).unwrap();
            prop_assert!((g.inner(&y[0], &y[0]) - f * f).abs() <= 1e-9 * f * f, "{}", label);
            prop_assert!((&g.g - g.g.transpose()).norm() <= 1e-12 * g.g.norm(), "{}", label);
            let scaled: Vec<f64> = y[0].iter().map(|v| lambda * v).collect();
            let gs = fundamental_tensor(&m, &x[0], &scaled).unwrap();
            prop_assert!((&gs.g - &g.g).norm() <= 1e-9 * g.g.norm(), "{}", label);
        }
    }

    #[test]
    fn jets_follow_product_and_chain_rules(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let x = T1::variable(a, 1.0, 1.0);
        let y = T1::variable(b, 1.0, 1.0);
        let p = x * y;
        prop_assert!((p.d1 - (a + b)).abs() < 1e-14);
        prop_assert!((p.d12 - 2.0).abs() < 1e-14);
        // sin(eˣ): f' = eˣ cos(eˣ), f'' = eˣ cos(eˣ) − e²ˣ sin(eˣ).
        let c = x.exp().sin();
        let e = a.exp();
        prop_assert!((c.v - e.sin()).abs() < 1e-14);
        prop_assert!((c.d1 - e * e.cos()).abs() < 1e-12 * (1.0 + e));
        prop_assert!((c.d12 - (e * e.cos() - e * e * e.sin())).abs() < 1e-11 * (1.0 + e * e));
    }

    #[test]
    fn distance_identities(i in 0usize..8, seed: u64) {
        let (label, body, p, _) = draw(i, seed, 3);
        let (a, b, c) = (&p[0], &p[1], &p[2]);
        let h = hilbert_distance(&body, a, b).unwrap();
        prop_assert!((h - hilbert_distance(&body, b, a).unwrap()).abs() <= 1e-12 * h.max(1.0), "{}", label);
        let ab = funk_distance(&body, a, b).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert!((reverse_funk_distance(&body, b, a).unwrap() - ab).abs() <= 1e-12 * ab.max(1.0));
        let ac = funk_distance(&body, a, c).unwrap();
        let cb = funk_distance(&body, c, b).unwrap();
        prop_assert!(ab <= ac + cb + 1e-12 * (ac + cb).max(1.0), "{}: {} > {} + {}", label, ab, ac, cb);
    }

    #[test]
    fn schwarzian_is_moebius_invariant(
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        c in -0.3f64..0.3,
        d in 1.0f64..2.0,
        t in -0.5f64..0.5,
    ) {
        prop_assume!((a * d - b * c).abs() > 0.1);
        let inner = Tangent { lambda: 0.8 };
        prop_assume!((c * (0.8 * t).tan() + d).abs() > 0.1);
        let m = MoebiusMap { a, b, c, d, inner };
        let (x, y) = (schwarzian(&m, t).unwrap(), schwarzian(&inner, t).unwrap());
        prop_assert!((x - y).abs() <= 1e-9 * (1.0 + y.abs()));
    }

    #[test]
    fn spray_is_two_homogeneous(i in 0usize..8, seed: u64, lambda in 0.1f64..10.0) {
        let (label, body, x, y) = draw(i, seed, 1);
        let m = hilbert_metric(body).unwrap();
        let g = spray(&m, &x[0], &y[0]).unwrap().coefficients;
        let scaled: Vec<f64> = y[0].iter().map(|v| lambda * v).collect();
        let gs = spray(&m, &x[0], &scaled).unwrap().coefficients;
        let scale = g.iter().map(|v| v.abs()).fold(1.0, f64::max);
        for (p, q) in gs.iter().zip(&g) {
            prop_assert!((p - lambda * lambda * q).abs() <= 1e-9 * lambda * lambda * scale, "{}", label);
        }
    }
}
