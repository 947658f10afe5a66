use finsler::body::ConvexBody;
use finsler::funk_hilbert::{funk_metric, hilbert_geodesic, hilbert_metric, klein_metric};
use finsler::geodesic::{
    berwald_quadraticity_residual, christoffel, exponential, integrate_geodesic, spray,
    GeodesicOptions,
};
use finsler::metric::{euclidean, minkowski};
use finsler::sampling::{InnerRegion, Sampler};
use finsler::verify::test_bodies;
use nalgebra::DMatrix;

/// Metric tensor of the Klein model of the unit ball.
fn klein_g(x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let d = 1.0 - x.iter().map(|a| a * a).sum::<f64>();
    DMatrix::from_fn(n, n, |i, j| {
        (if i == j { 1.0 / d } else { 0.0 }) + x[i] * x[j] / (d * d)
    })
}

/// Christoffel symbols of the second kind by central differences of `g`.
fn riemannian_christoffel(g: impl Fn(&[f64]) -> DMatrix<f64>, x: &[f64], h: f64) -> Vec<DMatrix<f64>> {
    let n = x.len();
    let dg: Vec<DMatrix<f64>> = (0..n)
        .map(|k| {
            let (mut a, mut b) = (x.to_vec(), x.to_vec());
            a[k] += h;
            b[k] -= h;
            (g(&a) - g(&b)) / (2.0 * h)
        })
        .collect();
    let inv = g(x).try_inverse().unwrap();
    (0..n)
        .map(|k| {
            DMatrix::from_fn(n, n, |i, j| {
                (0..n)
                    .map(|l| 0.5 * inv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]))
                    .sum()
            })
        })
        .collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[test]
fn christoffel_examples() {
    let m = minkowski(ConvexBody::ellipsoid(vec![0.0, 0.0], DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0])).unwrap()).unwrap();
    for gk in christoffel(&m, &[0.4, 1.0], &[1.0, 2.0]).unwrap() {
        assert!(gk.norm() < 1e-12);
    }
    let klein = klein_metric(2);
    for gk in christoffel(&klein, &[0.0, 0.0], &[0.3, 0.8]).unwrap() {
        assert!(gk.norm() < 1e-14);
    }
    for x in [[0.3, -0.2], [-0.5, 0.6]] {
        let ours = christoffel(&klein, &x, &[1.0, 0.2]).unwrap();
        let oracle = riemannian_christoffel(klein_g, &x, 1e-5);
        for (a, b) in ours.iter().zip(&oracle) {
            assert!((a - b).norm() < 1e-7 * (1.0 + b.norm()));
        }
    }
    let funk = funk_metric(ConvexBody::unit_ball(3)).unwrap();
    for gk in christoffel(&funk, &[0.1, 0.2, -0.3], &[0.5, -1.0, 0.2]).unwrap() {
        assert!((&gk - gk.transpose()).norm() < 1e-12 * (1.0 + gk.norm()));
    }
}

#[test]
fn spray_examples() {
    let e = euclidean(3);
    assert!(spray(&e, &[1.0, 2.0, 3.0], &[0.1, 0.2, 0.3]).unwrap().coefficients.iter().all(|g| g.abs() < 1e-15));

    // Funk: G = ½ F y.
    let mut s = Sampler::new(1);
    for (label, body) in test_bodies().into_iter().filter(|(_, b)| b.is_smooth()) {
        let funk = funk_metric(body.clone()).unwrap();
        let r = InnerRegion::new(&body, 0.8).unwrap();
        for _ in 0..10 {
            let (x, y) = (s.point_in(&r), s.gaussian(body.dim()));
            let f = funk.eval(&x, &y).unwrap();
            let g = spray(&funk, &x, &y).unwrap().coefficients;
            for (gi, yi) in g.iter().zip(&y) {
                assert!((gi - 0.5 * f * yi).abs() < 1e-9 * (1.0 + f * f), "{label}");
            }
            let g2 = spray(&funk, &x, &y.iter().map(|a| 2.5 * a).collect::<Vec<_>>()).unwrap().coefficients;
            for (a, b) in g2.iter().zip(&g) {
                assert!((a - 6.25 * b).abs() < 1e-10 * (1.0 + a.abs()), "{label}");
            }
        }
    }
}

#[test]
fn integrated_geodesics_follow_closed_forms() {
    let opts = GeodesicOptions::default();
    let e = euclidean(2);
    let tr = integrate_geodesic(&e, &[1.0, -1.0], &[0.6, 0.8], 4.0, &opts).unwrap();
    assert!(dist(&tr.last().x, &[3.4, 2.2]) < 1e-12);

    // Funk ball from the origin along e₁: x(s) = 1 − e^{−s}.
    let funk = funk_metric(ConvexBody::unit_ball(2)).unwrap();
    let tr = integrate_geodesic(&funk, &[0.0, 0.0], &[1.0, 0.0], 3.0, &opts).unwrap();
    for smp in &tr.samples {
        assert!((smp.x[0] - (1.0 - (-smp.s).exp())).abs() < 1e-8);
        assert!(smp.x[1].abs() < 1e-12);
    }
    assert!(tr.max_speed_drift < 1e-7);

    let mut s = Sampler::new(2);
    for (label, body) in test_bodies() {
        let hilb = hilbert_metric(body.clone()).unwrap();
        let r = InnerRegion::new(&body, 0.8).unwrap();
        for _ in 0..3 {
            let (p, xi) = (s.point_in(&r), s.unit_vector(body.dim()));
            let exact = hilbert_geodesic(&body, &p, &xi).unwrap();
            for end in [2.0, -2.0] {
                let tr = integrate_geodesic(&hilb, &p, &exact.velocity(0.0), end, &opts).unwrap();
                assert!(dist(&tr.last().x, &exact.point(end)) < 1e-6, "{label}");
            }
        }
    }
}

#[test]
fn exponential_examples() {
    let e = euclidean(2);
    assert!(dist(&exponential(&e, &[0.5, 0.5], &[1.0, -2.0]).unwrap(), &[1.5, -1.5]) < 1e-13);
    assert_eq!(exponential(&e, &[0.5, 0.5], &[0.0, 0.0]).unwrap(), vec![0.5, 0.5]);

    // d(exp_p) at 0 is the identity.
    let funk = funk_metric(ConvexBody::unit_ball(2)).unwrap();
    let p = [0.2, -0.3];
    let h = 1e-5;
    for k in 0..2 {
        let mut xi = [0.0, 0.0];
        xi[k] = h;
        let q = exponential(&funk, &p, &xi).unwrap();
        for i in 0..2 {
            let d = (q[i] - p[i]) / h;
            assert!((d - if i == k { 1.0 } else { 0.0 }).abs() < 1e-4);
        }
    }
}

#[test]
fn berwald_residual_examples() {
    let mut s = Sampler::new(3);
    let dirs: Vec<Vec<f64>> = (0..12).map(|_| s.unit_vector(2)).collect();
    let klein = klein_metric(2);
    assert!(berwald_quadraticity_residual(&klein, &[0.3, 0.1], &dirs).unwrap() < 1e-8);
    let m = minkowski(ConvexBody::unit_ball(2)).unwrap();
    assert!(berwald_quadraticity_residual(&m, &[0.3, 0.1], &dirs).unwrap() < 1e-12);
    let funk = funk_metric(ConvexBody::unit_ball(2)).unwrap();
    assert!(berwald_quadraticity_residual(&funk, &[0.3, 0.1], &dirs).unwrap() > 1e-3);
    assert!(berwald_quadraticity_residual(&klein, &[0.3, 0.1], &dirs[..3]).is_err());
}
