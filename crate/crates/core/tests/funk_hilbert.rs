use finsler::body::ConvexBody;
use finsler::funk_hilbert::{
    funk_distance, funk_geodesic, funk_metric, hilbert_ball_convexity_probe, hilbert_distance,
    hilbert_geodesic, hilbert_metric, klein_metric, klein_translation, reverse_funk_distance,
    reverse_funk_metric, spherical_projective_metric,
};
use finsler::geodesic::{trace_geodesic, GeodesicOptions, Termination};
use finsler::metric::{length, QuadratureOptions, Segment};
use finsler::sampling::{InnerRegion, Sampler};
use finsler::verify::test_bodies;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[test]
fn funk_metric_examples() {
    let ball = funk_metric(ConvexBody::unit_ball(2)).unwrap();
    assert!((ball.eval(&[0.0, 0.0], &[0.3, -0.4]).unwrap() - 0.5).abs() < 1e-15);
    assert!((ball.eval(&[0.5, 0.0], &[1.0, 0.0]).unwrap() - 2.0).abs() < 1e-14);
    let closed = (0.5 + (0.25f64 + 0.75).sqrt()) / 0.75;
    assert!((closed - 2.0).abs() < 1e-15);

    let half = funk_metric(ConvexBody::half_space(vec![1.0, 0.0], 1.0).unwrap()).unwrap();
    assert_eq!(half.eval(&[0.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
    let mut s = Sampler::new(1);
    for _ in 0..20 {
        let x = [s.uniform(-2.0, 0.9), s.uniform(-2.0, 2.0)];
        let xi = s.gaussian(2);
        let expect = (xi[0] / (1.0 - x[0])).max(0.0);
        assert!((half.eval(&x, &xi).unwrap() - expect).abs() < 1e-14);
    }
}

#[test]
fn boundary_point_and_reproducing_formula() {
    let mut s = Sampler::new(2);
    for (label, body) in test_bodies() {
        let funk = funk_metric(body.clone()).unwrap();
        let r = InnerRegion::new(&body, 0.9).unwrap();
        for _ in 0..30 {
            let (p, xi) = (s.point_in(&r), s.unit_vector(body.dim()));
            let f = funk.eval(&p, &xi).unwrap();
            let hit: Vec<f64> = p.iter().zip(&xi).map(|(a, b)| a + b / f).collect();
            let inner: Vec<f64> = p.iter().zip(&hit).map(|(a, b)| a + (1.0 - 1e-9) * (b - a)).collect();
            let outer: Vec<f64> = p.iter().zip(&hit).map(|(a, b)| a + (1.0 + 1e-9) * (b - a)).collect();
            assert!(body.contains(&inner) && !body.contains(&outer), "{label}");
            for t in [0.1, 0.5, 0.9] {
                let t = t / f;
                let q: Vec<f64> = p.iter().zip(&xi).map(|(a, b)| a + t * b).collect();
                let expect = f / (1.0 - t * f);
                assert!((funk.eval(&q, &xi).unwrap() - expect).abs() < 1e-10 * expect, "{label}");
            }
        }
    }
}

#[test]
fn distance_examples_on_ball() {
    let ball = ConvexBody::unit_ball(2);
    let (p, q, z) = ([0.0, 0.0], [0.5, 0.0], [0.25, 0.0]);
    assert_eq!(funk_distance(&ball, &p, &p).unwrap(), 0.0);
    assert_eq!(reverse_funk_distance(&ball, &q, &q).unwrap(), 0.0);
    assert!((funk_distance(&ball, &p, &q).unwrap() - 2f64.ln()).abs() < 1e-15);
    assert!((reverse_funk_distance(&ball, &p, &q).unwrap() - 1.5f64.ln()).abs() < 1e-15);
    let h = hilbert_distance(&ball, &p, &q).unwrap();
    assert!((h - 0.5 * 3f64.ln()).abs() < 1e-15);
    assert!((h - 0.5f64.atanh()).abs() < 1e-15);
    let split = funk_distance(&ball, &p, &z).unwrap() + funk_distance(&ball, &z, &q).unwrap();
    assert!((split - funk_distance(&ball, &p, &q).unwrap()).abs() < 1e-12);

    let opts = QuadratureOptions::default();
    let seg = Segment::new(&p, &q);
    let rev = reverse_funk_metric(ball.clone()).unwrap();
    assert!((length(&rev, &seg, opts).unwrap() - 1.5f64.ln()).abs() < 1e-8);
    assert!((length(&klein_metric(2), &seg, opts).unwrap() - h).abs() < 1e-8);
}

#[test]
fn reverse_and_symmetry_identities() {
    let mut s = Sampler::new(3);
    for (label, body) in test_bodies() {
        let r = InnerRegion::new(&body, 0.9).unwrap();
        for _ in 0..50 {
            let (p, q) = (s.point_in(&r), s.point_in(&r));
            let a = reverse_funk_distance(&body, &p, &q).unwrap();
            assert!((a - funk_distance(&body, &q, &p).unwrap()).abs() < 1e-12, "{label}");
            let h = hilbert_distance(&body, &p, &q).unwrap();
            assert!((h - hilbert_distance(&body, &q, &p).unwrap()).abs() < 1e-12, "{label}");
        }
    }
}

#[test]
fn klein_translations_preserve_hilbert_distance() {
    let ball = ConvexBody::unit_ball(3);
    let r = InnerRegion::new(&ball, 0.7).unwrap();
    let mut s = Sampler::new(4);
    for _ in 0..50 {
        let (p, q) = (s.point_in(&r), s.point_in(&r));
        let t = s.uniform(-0.9, 0.9);
        let (tp, tq) = (klein_translation(t, &p), klein_translation(t, &q));
        assert!(ball.contains(&tp) && ball.contains(&tq));
        let d = hilbert_distance(&ball, &p, &q).unwrap();
        assert!((hilbert_distance(&ball, &tp, &tq).unwrap() - d).abs() < 1e-10 * d.max(1.0));
    }
}

#[test]
fn funk_geodesic_examples() {
    let mut s = Sampler::new(5);
    for (label, body) in test_bodies() {
        let funk = funk_metric(body.clone()).unwrap();
        let r = InnerRegion::new(&body, 0.9).unwrap();
        for _ in 0..10 {
            let (p, xi) = (s.point_in(&r), s.unit_vector(body.dim()));
            let g = funk_geodesic(&body, &p, &xi).unwrap();
            assert!(dist(&g.point(40.0), &g.endpoint()) < 1e-12, "{label}");
            for t in [0.0, 1.0, 2.0] {
                let speed = funk.eval(&g.point(t), &g.velocity(t)).unwrap();
                assert!((speed - 1.0).abs() < 1e-10, "{label}");
            }
            assert!((funk_distance(&body, &p, &g.point(1.0)).unwrap() - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn hilbert_geodesic_examples() {
    let mut s = Sampler::new(6);
    for (label, body) in test_bodies() {
        let hilb = hilbert_metric(body.clone()).unwrap();
        let r = InnerRegion::new(&body, 0.9).unwrap();
        for _ in 0..10 {
            let (p, xi) = (s.point_in(&r), s.unit_vector(body.dim()));
            let g = hilbert_geodesic(&body, &p, &xi).unwrap();
            let (a, b) = g.endpoints();
            assert!(dist(&g.point(40.0), &a) < 1e-12 && dist(&g.point(-40.0), &b) < 1e-12);
            for t in [-1.0, 1.0] {
                let d = hilbert_distance(&body, &p, &g.point(t)).unwrap();
                assert!((d - 1.0).abs() < 1e-10, "{label}");
                let speed = hilb.eval(&g.point(t), &g.velocity(t)).unwrap();
                assert!((speed - 1.0).abs() < 1e-10, "{label}");
            }
        }
    }
    // Centred in the ball, φ is odd.
    let ball = ConvexBody::unit_ball(2);
    let g = hilbert_geodesic(&ball, &[0.0, 0.0], &[0.6, 0.8]).unwrap();
    for t in [0.3, 1.0, 2.5] {
        assert!((g.phi(t) + g.phi(-t)).abs() < 1e-15);
    }
}

#[test]
fn klein_and_spherical_examples() {
    let klein = klein_metric(2);
    assert!((klein.eval(&[0.0, 0.0], &[3.0, 4.0]).unwrap() - 5.0).abs() < 1e-14);
    let sph = spherical_projective_metric(3);
    assert!((sph.eval(&[0.0; 3], &[1.0, 2.0, 2.0]).unwrap() - 3.0).abs() < 1e-14);

    let hilb = hilbert_metric(ConvexBody::unit_ball(2)).unwrap();
    let r = InnerRegion::new(&ConvexBody::unit_ball(2), 0.99).unwrap();
    let mut s = Sampler::new(7);
    for _ in 0..100 {
        let (x, xi) = (s.point_in(&r), s.gaussian(2));
        let (a, b) = (klein.eval(&x, &xi).unwrap(), hilb.eval(&x, &xi).unwrap());
        assert!((a - b).abs() < 1e-12 * a);
    }
}

#[test]
fn hilbert_balls_are_convex() {
    let mut s = Sampler::new(8);
    let ball = ConvexBody::unit_ball(2);
    for (c, rad) in [([0.0, 0.0], 1.0), ([0.5, -0.3], 2.0), ([-0.2, 0.1], 0.3)] {
        assert!(hilbert_ball_convexity_probe(&ball, &c, rad, 200, &mut s).unwrap().convex);
    }
    let lse = test_bodies().into_iter().find(|(l, _)| l.starts_with("lse-pentagon")).unwrap().1;
    let c = lse.witness();
    assert!(hilbert_ball_convexity_probe(&lse, &c, 1.5, 500, &mut s).unwrap().convex);
    let p = hilbert_ball_convexity_probe(&lse, &c, 0.0, 10, &mut s).unwrap();
    assert!(p.convex && p.trials == 0);
}

/// Completeness probe: along a sequence tending to the boundary the Funk
/// and Hilbert distances from a base point diverge, while the reverse Funk
/// distance stays bounded (the Funk metric is only forward complete).
#[test]
fn distances_diverge_towards_the_boundary() {
    for (label, body) in test_bodies() {
        let p = body.witness();
        let dir: Vec<f64> = (0..body.dim()).map(|i| if i == 0 { 1.0 } else { 0.3 }).collect();
        let t = body.ray_hit(&p, &dir).unwrap();
        let mut last = (0.0, 0.0);
        for k in 1..=10 {
            let eps = 10f64.powi(-k);
            let q: Vec<f64> = p.iter().zip(&dir).map(|(a, b)| a + (1.0 - eps) * t * b).collect();
            let f = funk_distance(&body, &p, &q).unwrap();
            let h = hilbert_distance(&body, &p, &q).unwrap();
            assert!(f > last.0 && h > last.1, "{label}");
            // Exactly log(1/ε); rounding in q costs about 1e-16/ε relative.
            assert!((f - (1.0 / eps).ln()).abs() < 1e-5, "{label}: {f} at {eps}");
            assert!(reverse_funk_distance(&body, &p, &q).unwrap() < (2.0 * t * norm(&dir)).max(10.0));
            last = (f, h);
        }
    }
}

#[test]
fn unit_speed_geodesics_stay_inside_for_long_parameters() {
    let ball = ConvexBody::unit_ball(2);
    let hilb = hilbert_metric(ball.clone()).unwrap();
    let p = [0.3, 0.2];
    let g = hilbert_geodesic(&ball, &p, &[1.0, -0.5]).unwrap();
    let opts = GeodesicOptions::default();
    for end in [6.0, -6.0] {
        let tr = trace_geodesic(&hilb, &p, &g.velocity(0.0), end, &opts).unwrap();
        assert_eq!(tr.termination, Termination::Completed);
        assert!(dist(&tr.last().x, &g.point(end)) < 1e-6);
    }
}
