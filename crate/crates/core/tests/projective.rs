use finsler::body::ConvexBody;
use finsler::funk_hilbert::{
    funk_distance, funk_metric, hilbert_distance, hilbert_metric, klein_metric, reverse_funk_metric,
};
use finsler::metric::{conformal_control, euclidean, length, minkowski, FnCurve, QuadratureOptions};
use finsler::projective::{
    classify_projective_flatness, distance_from_potential, hamel_potential, hamel_residual,
    hamel_symmetry_residual, hilbert_form, projective_factor, projective_factor_gradient_identity,
    FlatnessVerdict,
};
use finsler::quadrature::QuadOptions;
use finsler::sampling::{InnerRegion, Sampler};
use finsler::verify::test_bodies;

fn samples(body: &ConvexBody, count: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let r = InnerRegion::new(body, 0.8).unwrap();
    let mut s = Sampler::new(seed);
    (0..count).map(|_| (s.point_in(&r), s.unit_vector(body.dim()))).collect()
}

#[test]
fn hamel_residuals() {
    for (label, body) in test_bodies() {
        for m in [funk_metric(body.clone()).unwrap(), hilbert_metric(body.clone()).unwrap()] {
            for (x, y) in samples(&body, 10, 1) {
                assert!(hamel_residual(&m, &x, &y).unwrap() < 1e-10, "{label}");
                assert!(hamel_symmetry_residual(&m, &x, &y).unwrap() < 1e-10, "{label}");
            }
        }
    }
    let c = conformal_control(2);
    let r = hamel_residual(&c, &[0.3, 0.2], &[0.0, 1.0]).unwrap();
    assert!(r > 1e-3, "{r}");
}

#[test]
fn projective_factor_examples() {
    let m = minkowski(ConvexBody::unit_ball(2)).unwrap();
    assert_eq!(projective_factor(&m, &[0.1, 0.2], &[1.0, 0.0]).unwrap(), 0.0);
    for (label, body) in test_bodies() {
        let funk = funk_metric(body.clone()).unwrap();
        let rev = reverse_funk_metric(body.clone()).unwrap();
        let hilb = hilbert_metric(body.clone()).unwrap();
        for (x, y) in samples(&body, 10, 2) {
            let (f, r) = (funk.eval(&x, &y).unwrap(), rev.eval(&x, &y).unwrap());
            let p = projective_factor(&funk, &x, &y).unwrap();
            assert!((p - 0.5 * f).abs() < 1e-10 * f.max(1.0), "{label}");
            let p = projective_factor(&hilb, &x, &y).unwrap();
            assert!((p - 0.5 * (f - r)).abs() < 1e-10 * f.max(1.0), "{label}");
            for m in [&funk, &hilb] {
                assert!(projective_factor_gradient_identity(m, &x, &y).unwrap() < 1e-10, "{label}");
            }
        }
    }
}

#[test]
fn hilbert_form_examples() {
    let e = euclidean(2);
    let w = hilbert_form(&e, &[5.0, 5.0], &[3.0, 4.0]).unwrap();
    assert!((w[0] - 0.6).abs() < 1e-15 && (w[1] - 0.8).abs() < 1e-15);
    assert!(hilbert_form(&e, &[0.0, 0.0], &[0.0, 0.0]).is_err());

    let funk = funk_metric(ConvexBody::unit_ball(2)).unwrap();
    for (x, y) in samples(&ConvexBody::unit_ball(2), 20, 3) {
        let w = hilbert_form(&funk, &x, &y).unwrap();
        let wy: f64 = w.iter().zip(&y).map(|(a, b)| a * b).sum();
        assert!((wy - funk.eval(&x, &y).unwrap()).abs() < 1e-12);
    }

    // ∫ω over the canonical lift of a curve is its length.
    let curve = FnCurve {
        a: 0.0,
        b: 1.0,
        pos: |t: f64| vec![0.4 * t - 0.2, 0.3 * (3.0 * t).sin()],
        vel: |t: f64| vec![0.4, 0.9 * (3.0 * t).cos()],
    };
    let quad = QuadOptions::default();
    let lifted = finsler::quadrature::integrate(
        |t| {
            let (x, v) = ((curve.pos)(t), (curve.vel)(t));
            let w = hilbert_form(&funk, &x, &v)?;
            Ok(w.iter().zip(&v).map(|(a, b)| a * b).sum())
        },
        0.0,
        1.0,
        quad,
    )
    .unwrap();
    let l = length(&funk, &curve, QuadratureOptions::default()).unwrap();
    assert!((lifted - l).abs() < 1e-9);
}

#[test]
fn hamel_potential_examples() {
    let ball = ConvexBody::unit_ball(2);
    let funk = funk_metric(ball.clone()).unwrap();
    let opts = QuadOptions::default();
    let p0 = [0.0, 0.0];
    for (_, y) in samples(&ball, 5, 4) {
        // h(x, y) − log F(x, y) does not depend on x.
        let offset = -funk.eval(&p0, &y).unwrap().ln();
        for (x, _) in samples(&ball, 5, 5) {
            let h = hamel_potential(&funk, &p0, &x, &y, opts).unwrap();
            assert!((h - funk.eval(&x, &y).unwrap().ln() - offset).abs() < 1e-9);
        }
    }

    let m = minkowski(ConvexBody::ellipsoid(vec![0.2, 0.0], nalgebra::DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0])).unwrap()).unwrap();
    let y = [0.3, -0.7];
    let w = hilbert_form(&m, &p0, &y).unwrap();
    for x in [[1.0, 2.0], [-3.0, 0.5]] {
        let h = hamel_potential(&m, &p0, &x, &y, opts).unwrap();
        assert!((h - (w[0] * x[0] + w[1] * x[1])).abs() < 1e-12);
    }

    // ∂h/∂x = ω.
    let hilb = hilbert_metric(test_bodies()[1].1.clone()).unwrap();
    let body = test_bodies()[1].1.clone();
    let p0 = body.witness();
    for (x, y) in samples(&body, 5, 6) {
        let w = hilbert_form(&hilb, &x, &y).unwrap();
        for k in 0..x.len() {
            let h = 1e-4;
            let at = |t: f64| {
                let mut z = x.clone();
                z[k] += t;
                hamel_potential(&hilb, &p0, &z, &y, opts).unwrap()
            };
            let fd = (at(-2.0 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2.0 * h)) / (12.0 * h);
            assert!((fd - w[k]).abs() < 1e-6 * (1.0 + w[k].abs()), "{fd} vs {}", w[k]);
        }
    }
}

#[test]
fn distance_from_potential_examples() {
    let ball = ConvexBody::unit_ball(2);
    let opts = QuadOptions::default();
    let (p0, p, q) = ([0.1, 0.1], [0.0, 0.0], [0.5, 0.0]);
    let funk = funk_metric(ball.clone()).unwrap();
    let hilb = hilbert_metric(ball.clone()).unwrap();
    assert!((distance_from_potential(&funk, &p0, &p, &q, opts).unwrap() - 2f64.ln()).abs() < 1e-10);
    assert!((distance_from_potential(&hilb, &p0, &p, &q, opts).unwrap() - 0.5 * 3f64.ln()).abs() < 1e-10);
    assert_eq!(distance_from_potential(&funk, &p0, &q, &q, opts).unwrap(), 0.0);
    for (label, body) in test_bodies() {
        let funk = funk_metric(body.clone()).unwrap();
        let hilb = hilbert_metric(body.clone()).unwrap();
        let p0 = body.witness();
        let pts = samples(&body, 6, 7);
        for w in pts.windows(2) {
            let (p, q) = (&w[0].0, &w[1].0);
            let d = distance_from_potential(&funk, &p0, p, q, opts).unwrap();
            assert!((d - funk_distance(&body, p, q).unwrap()).abs() < 1e-8, "{label}");
            let d = distance_from_potential(&hilb, &p0, p, q, opts).unwrap();
            assert!((d - hilbert_distance(&body, p, q).unwrap()).abs() < 1e-8, "{label}");
        }
    }
}

#[test]
fn flatness_classification() {
    let ball = ConvexBody::unit_ball(2);
    let r = InnerRegion::new(&ball, 0.8).unwrap();
    let mut s = Sampler::new(8);
    for m in [funk_metric(ball.clone()).unwrap(), klein_metric(2), euclidean(2)] {
        let rep = classify_projective_flatness(&m, |s| s.point_in(&r), 20, &mut s).unwrap();
        assert_eq!(rep.verdict, FlatnessVerdict::Flat);
    }
    let rep = classify_projective_flatness(&conformal_control(2), |s| s.point_in(&r), 20, &mut s).unwrap();
    assert_eq!(rep.verdict, FlatnessVerdict::NotFlat);
}
