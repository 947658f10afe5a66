use finsler::body::ConvexBody;
use finsler::funk_hilbert::{funk_distance, funk_metric, klein_metric};
use finsler::metric::{
    energy, euclidean, fundamental_tensor, indicatrix_sample, length, minkowski, randers, reverse,
    zermelo, FnCurve, FormField, MatrixField, QuadratureOptions, Segment, WindField,
};
use finsler::sampling::{InnerRegion, Sampler};

fn ball_samples(count: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let r = InnerRegion::new(&ConvexBody::unit_ball(2), 0.9).unwrap();
    let mut s = Sampler::new(seed);
    (0..count)
        .map(|_| (s.point_in(&r), s.gaussian(2)))
        .collect()
}

/// The Funk metric of the unit ball in closed form.
fn funk_ball(x: &[f64], xi: &[f64]) -> f64 {
    let xx: f64 = x.iter().map(|a| a * a).sum();
    let xv: f64 = x.iter().zip(xi).map(|(a, b)| a * b).sum();
    let vv: f64 = xi.iter().map(|a| a * a).sum();
    ((xv * xv + (1.0 - xx) * vv).sqrt() + xv) / (1.0 - xx)
}

#[test]
fn minkowski_examples() {
    let e = minkowski(ConvexBody::unit_ball(2)).unwrap();
    assert!((e.eval(&[0.3, 0.3], &[3.0, 4.0]).unwrap() - 5.0).abs() < 1e-14);
    let shifted = minkowski(ConvexBody::ball(vec![0.5, 0.0], 1.0).unwrap()).unwrap();
    assert!((shifted.eval(&[7.0, -2.0], &[1.0, 0.0]).unwrap() - 2.0 / 3.0).abs() < 1e-14);
    let mut s = Sampler::new(1);
    for _ in 0..20 {
        let xi = s.gaussian(2);
        let scaled: Vec<f64> = xi.iter().map(|a| 2.7 * a).collect();
        let (a, b) = (
            shifted.eval(&[0.0, 0.0], &xi).unwrap(),
            shifted.eval(&[0.0, 0.0], &scaled).unwrap(),
        );
        assert!((b - 2.7 * a).abs() < 1e-13 * b);
    }
}

#[test]
fn randers_examples() {
    let g = nalgebra::DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]);
    let riem = randers(2, MatrixField::Constant(g.clone()), FormField::Zero).unwrap();
    let xi = [0.4, -1.2];
    let q = (nalgebra::DVector::from_column_slice(&xi).transpose()
        * &g
        * nalgebra::DVector::from_column_slice(&xi))[(0, 0)];
    assert!((riem.eval(&[0.0, 0.0], &xi).unwrap() - q.sqrt()).abs() < 1e-14);

    let funk_r = randers(2, MatrixField::KleinBall, FormField::FunkBall).unwrap();
    let funk = funk_metric(ConvexBody::unit_ball(2)).unwrap();
    for (x, xi) in ball_samples(50, 2) {
        let (a, b) = (funk_r.eval(&x, &xi).unwrap(), funk.eval(&x, &xi).unwrap());
        assert!((a - b).abs() < 1e-12 * b.max(1.0));
        let back: Vec<f64> = xi.iter().map(|v| -v).collect();
        let theta: f64 = x.iter().zip(&xi).map(|(p, v)| p * v).sum();
        if theta.abs() > 1e-6 {
            assert!((funk_r.eval(&x, &back).unwrap() - a).abs() > 1e-9);
        }
    }
}

#[test]
fn reverse_examples() {
    let funk = funk_metric(ConvexBody::unit_ball(2)).unwrap();
    let twice = reverse(reverse(funk.clone()));
    let klein = klein_metric(2);
    let rk = reverse(klein.clone());
    for (x, xi) in ball_samples(20, 3) {
        assert_eq!(twice.eval(&x, &xi).unwrap(), funk.eval(&x, &xi).unwrap());
        assert!((rk.eval(&x, &xi).unwrap() - klein.eval(&x, &xi).unwrap()).abs() < 1e-14);
    }
    let r = reverse(funk);
    assert!((r.eval(&[0.5, 0.0], &[1.0, 0.0]).unwrap() - 1.0 / 1.5).abs() < 1e-15);
}

#[test]
fn zermelo_examples() {
    let e = euclidean(2);
    let still = zermelo(e.clone(), WindField::Constant(vec![0.0, 0.0])).unwrap();
    let drift = zermelo(e.clone(), WindField::Position).unwrap();
    for (x, xi) in ball_samples(50, 4) {
        assert!((still.eval(&x, &xi).unwrap() - e.eval(&x, &xi).unwrap()).abs() < 1e-14);
        let f = drift.eval(&x, &xi).unwrap();
        assert!((f - funk_ball(&x, &xi)).abs() < 1e-10 * f.max(1.0));
        // F(x, ξ/F_Z + Z(x)) = 1.
        let probe: Vec<f64> = xi.iter().zip(&x).map(|(v, z)| v / f + z).collect();
        assert!((e.eval(&x, &probe).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn fundamental_tensor_examples() {
    let e = euclidean(3);
    let g = fundamental_tensor(&e, &[1.0, 2.0, 3.0], &[0.1, -0.5, 2.0]).unwrap();
    assert!((g.g - nalgebra::DMatrix::identity(3, 3)).norm() < 1e-14);

    let funk = funk_metric(ConvexBody::unit_ball(2)).unwrap();
    for (x, y) in ball_samples(20, 5) {
        let g = fundamental_tensor(&funk, &x, &y).unwrap();
        let f = funk.eval(&x, &y).unwrap();
        assert!((g.inner(&y, &y) - f * f).abs() < 1e-10 * f * f);
        let y2: Vec<f64> = y.iter().map(|a| 2.0 * a).collect();
        let g2 = fundamental_tensor(&funk, &x, &y2).unwrap();
        assert!((&g2.g - &g.g).norm() < 1e-12 * g.g.norm());
        assert!(g.is_positive_definite());
    }
}

#[test]
fn length_and_energy() {
    let e = euclidean(2);
    let seg = Segment::new(&[0.0, 0.0], &[3.0, 4.0]);
    let opts = QuadratureOptions::default();
    assert!((length(&e, &seg, opts).unwrap() - 5.0).abs() < 1e-13);
    assert!((energy(&e, &seg, opts).unwrap() - 25.0).abs() < 1e-12);

    let funk = funk_metric(ConvexBody::unit_ball(2)).unwrap();
    let seg = Segment::new(&[0.0, 0.0], &[0.5, 0.0]);
    assert!((length(&funk, &seg, opts).unwrap() - 2f64.ln()).abs() < 1e-10);

    // ℓ² ≤ (b − a)E, strict for a curve with varying speed.
    let bent = FnCurve {
        a: 0.0,
        b: 1.0,
        pos: |t: f64| vec![0.5 * t * t, 0.2 * t],
        vel: |t: f64| vec![t, 0.2],
    };
    let (l, en) = (
        length(&funk, &bent, opts).unwrap(),
        energy(&funk, &bent, opts).unwrap(),
    );
    assert!(l * l < en - 1e-6);
    let (l, en) = (length(&e, &seg, opts).unwrap(), energy(&e, &seg, opts).unwrap());
    assert!((l * l - en).abs() < 1e-13);
}

#[test]
fn indicatrix_examples() {
    let e = euclidean(2);
    for p in indicatrix_sample(&e, &[0.2, 0.2], 16).unwrap() {
        assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-12);
    }
    let ball = ConvexBody::unit_ball(2);
    let funk = funk_metric(ball.clone()).unwrap();
    let x = [0.3, -0.4];
    for xi in indicatrix_sample(&funk, &x, 32).unwrap() {
        let a = [x[0] + xi[0], x[1] + xi[1]];
        assert!((a[0].hypot(a[1]) - 1.0).abs() < 1e-10);
    }
    // {z : F(x, z − x) < 1} recovers the body.
    let mut s = Sampler::new(6);
    for _ in 0..200 {
        let z = [s.uniform(-1.5, 1.5), s.uniform(-1.5, 1.5)];
        let inside = funk.eval(&x, &[z[0] - x[0], z[1] - x[1]]).unwrap() < 1.0;
        assert_eq!(inside, ball.contains(&z));
    }
}

#[test]
fn funk_length_matches_distance_on_ellipse() {
    let body = ConvexBody::ellipsoid(
        vec![0.1, -0.2],
        nalgebra::DMatrix::from_row_slice(2, 2, &[0.25, 0.1, 0.1, 1.0]),
    )
    .unwrap();
    let funk = funk_metric(body.clone()).unwrap();
    let r = InnerRegion::new(&body, 0.9).unwrap();
    let mut s = Sampler::new(8);
    for _ in 0..10 {
        let (p, q) = (s.point_in(&r), s.point_in(&r));
        let l = length(&funk, &Segment::new(&p, &q), QuadratureOptions::default()).unwrap();
        assert!((l - funk_distance(&body, &p, &q).unwrap()).abs() < 1e-8);
    }
}
