use finsler::ad::{grad_y, grad_y_with, hess_y_with, mixed_xy, seed, unit, DerivativeMethod, T1};
use finsler::body::ConvexBody;
use finsler::funk_hilbert::{funk_metric, klein_metric};
use finsler::metric::{black_box, euclidean};
use finsler::sampling::{InnerRegion, Sampler};
use finsler::verify::test_bodies;

/// Five-point central difference of a scalar function.
fn d5(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h)
}

fn shifted(v: &[f64], k: usize, t: f64) -> Vec<f64> {
    let mut w = v.to_vec();
    w[k] += t;
    w
}

#[test]
fn grad_y_examples() {
    let e = euclidean(2);
    let g = grad_y(e.lagrangian(), &[0.3, -1.0], &[3.0, 4.0]).unwrap();
    assert!((g[0] - 0.6).abs() < 1e-15 && (g[1] - 0.8).abs() < 1e-15);

    let q = black_box(2, "quadratic", None, |_, y| y[0] * y[0] + y[1] * y[1]);
    let g = grad_y_with(q.lagrangian(), &[0.0, 0.0], &[1.0, 2.0], DerivativeMethod::central_fd()).unwrap();
    assert!((g[0] - 2.0).abs() < 1e-8 && (g[1] - 4.0).abs() < 1e-8);

    let funk = funk_metric(ConvexBody::unit_ball(2)).unwrap();
    let (x, y) = ([0.5, 0.0], [1.0, 0.0]);
    let g = grad_y(funk.lagrangian(), &x, &y).unwrap();
    for k in 0..2 {
        let fd = d5(|t| funk.eval(&x, &shifted(&y, k, t)).unwrap(), 1e-3);
        assert!((g[k] - fd).abs() < 1e-9, "{k}: {} vs {fd}", g[k]);
    }
}

#[test]
fn hess_y_examples() {
    let half_sq = black_box(3, "half-square", None, |_, y| {
        0.5 * y.iter().map(|a| a * a).sum::<f64>()
    });
    let h = hess_y_with(half_sq.lagrangian(), &[0.0; 3], &[0.2, -0.4, 1.0], DerivativeMethod::central_fd()).unwrap();
    assert!((h - nalgebra::DMatrix::identity(3, 3)).norm() < 1e-6);

    // ½F² via the fundamental tensor of the Euclidean and Klein metrics.
    for (m, x) in [(euclidean(2), [0.7, 0.1]), (klein_metric(2), [0.0, 0.0])] {
        let g = finsler::metric::fundamental_tensor(&m, &x, &[0.3, 0.9]).unwrap();
        assert!((g.g - nalgebra::DMatrix::identity(2, 2)).norm() < 1e-14);
    }
}

#[test]
fn mixed_xy_examples() {
    let e = euclidean(2);
    assert_eq!(mixed_xy(e.lagrangian(), &[0.1, 0.2], &[1.0, 1.0], 0, 1).unwrap(), 0.0);

    // ∂F/∂xⁱ = F ∂F/∂yⁱ for the Funk metric; differentiate both sides in yʲ.
    let funk = funk_metric(ConvexBody::unit_ball(2)).unwrap();
    let mut s = Sampler::new(3);
    let r = InnerRegion::new(&ConvexBody::unit_ball(2), 0.8).unwrap();
    for _ in 0..10 {
        let (x, y) = (s.point_in(&r), s.unit_vector(2));
        for i in 0..2 {
            for j in 0..2 {
                let m = mixed_xy(funk.lagrangian(), &x, &y, i, j).unwrap();
                let rhs = d5(
                    |t| {
                        let ys = shifted(&y, j, t);
                        let f = funk.eval(&x, &ys).unwrap();
                        f * grad_y(funk.lagrangian(), &x, &ys).unwrap()[i]
                    },
                    1e-3,
                );
                assert!((m - rhs).abs() < 1e-7 * (1.0 + m.abs()), "{m} vs {rhs}");
                let fd = d5(
                    |t| grad_y(funk.lagrangian(), &shifted(&x, i, t), &y).unwrap()[j],
                    1e-3,
                );
                assert!((m - fd).abs() < 1e-7 * (1.0 + m.abs()));
            }
        }
    }
}

#[test]
fn contains_examples() {
    let ball = ConvexBody::unit_ball(2);
    assert!(ball.contains(&[0.0, 0.0]));
    assert!(!ball.contains(&[1.0, 0.0]));
    let h = ConvexBody::half_space(vec![1.0, 0.0], 1.0).unwrap();
    assert!(!h.contains(&[2.0, 0.0]));
}

#[test]
fn ray_hit_examples() {
    let ball = ConvexBody::unit_ball(2);
    assert_eq!(ball.ray_hit(&[0.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
    assert!((ball.ray_hit(&[0.5, 0.0], &[1.0, 0.0]).unwrap() - 0.5).abs() < 1e-15);
    assert!((ball.ray_hit(&[0.5, 0.0], &[-1.0, 0.0]).unwrap() - 1.5).abs() < 1e-15);
    let h = ConvexBody::half_space(vec![1.0, 0.0], 1.0).unwrap();
    assert_eq!(h.ray_hit(&[0.0, 0.0], &[0.0, 1.0]).unwrap(), f64::INFINITY);
}

#[test]
fn ray_hit_lands_on_the_boundary() {
    let mut s = Sampler::new(11);
    for (label, body) in test_bodies() {
        let r = InnerRegion::new(&body, 0.95).unwrap();
        for _ in 0..50 {
            let x = s.point_in(&r);
            let xi = s.unit_vector(body.dim());
            let t = body.ray_hit(&x, &xi).unwrap();
            let at = |c: f64| -> Vec<f64> { x.iter().zip(&xi).map(|(a, b)| a + c * t * b).collect() };
            assert!(body.contains(&at(1.0 - 1e-9)), "{label}");
            assert!(!body.contains(&at(1.0 + 1e-9)), "{label}");
        }
    }
}

#[test]
fn gauge_taylor_examples() {
    let ball = ConvexBody::unit_ball(2);
    let x = seed(&[0.0, 0.0], Some(&unit::<f64>(2, 0)), None);
    let xi = seed(&[1.0, 0.0], None, None);
    let t: T1 = ball.gauge_taylor(&x, &xi).unwrap();
    assert!((t.v - 1.0).abs() < 1e-15);
    assert!((t.d1 + 1.0).abs() < 1e-14);

    let mut s = Sampler::new(5);
    for (label, body) in test_bodies().into_iter().filter(|(_, b)| b.is_smooth()) {
        let n = body.dim();
        let r = InnerRegion::new(&body, 0.9).unwrap();
        for _ in 0..100 {
            let (p, d) = (s.point_in(&r), s.unit_vector(n));
            let t0 = body.ray_hit(&p, &d).unwrap();
            let xs: Vec<T1> = seed(&p, None, None);
            let ds: Vec<T1> = seed(&d, None, None);
            let t: T1 = body.gauge_taylor(&xs, &ds).unwrap();
            assert!((t.v - t0).abs() < 1e-13 * t0.max(1.0), "{label}");
        }
        for _ in 0..10 {
            let (p, d) = (s.point_in(&r), s.unit_vector(n));
            for k in 0..n {
                let xs = seed(&p, Some(&unit::<f64>(n, k)), None);
                let ds: Vec<T1> = seed(&d, None, None);
                let t: T1 = body.gauge_taylor(&xs, &ds).unwrap();
                let fd = d5(|h| body.ray_hit(&shifted(&p, k, h), &d).unwrap(), 1e-4);
                assert!((t.d1 - fd).abs() < 1e-7 * (1.0 + fd.abs()), "{label}: {} vs {fd}", t.d1);
            }
        }
    }
}
