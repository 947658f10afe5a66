//! The acceptance suite: twelve numerical criteria with fixed tolerances,
//! shared by the `finsler verify` command and the `acceptance` test target.

use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::body::ConvexBody;
use crate::curvature::{
    curvature_via_schwarzian, flag_curvature_field, moebius_reconstruct, riemann_curvature_with,
    scalar_sc, schwarzian, BoundaryData, CurvatureMethod, CurvatureOptions, Exponential, Flag,
    MoebiusMap, Reciprocal, Reparametrization, SolutionRatio, Tangent,
};
use crate::error::Result;
use crate::funk_hilbert::{
    funk_distance, funk_geodesic, funk_metric, hilbert_distance, hilbert_geodesic, hilbert_metric,
    klein_metric, reverse_funk_metric, spherical_projective_metric,
};
use crate::geodesic::{trace_geodesic, GeodesicOptions};
use crate::metric::{
    conformal_control, euclidean, length, minkowski, randers, sum, FinslerMetric, FormField,
    MatrixField, Segment,
};
use crate::projective::{
    distance_from_potential, hamel_residual, projective_factor, projective_factor_gradient_identity,
};
use crate::quadrature::QuadOptions;
use crate::sampling::{InnerRegion, Sampler};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Caps every per-body sample count at 10.
    pub quick: bool,
    /// Flips one sign in the curvature formula; the curvature criteria
    /// must then fail.
    pub inject_bug: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 20240611,
            quick: false,
            inject_bug: false,
        }
    }
}

impl VerifyConfig {
    fn count(&self, full: usize) -> usize {
        if self.quick {
            full.min(10)
        } else {
            full
        }
    }

    fn curvature(&self, method: CurvatureMethod) -> CurvatureOptions {
        CurvatureOptions {
            method,
            inject_sign_bug: self.inject_bug,
        }
    }
}

/// Outcome of one criterion. `failures` names the invariants that broke.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub max_error: f64,
    pub tolerance: f64,
    pub detail: String,
    pub failures: Vec<String>,
    pub seconds: f64,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2} {:<40} max_error={:.3e} tol={:.1e} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.max_error,
            self.tolerance,
            self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub version: String,
    pub passed: bool,
    pub criteria: Vec<CriterionReport>,
}

/// Accumulates named checks `error <= tolerance` for one criterion.
struct Checks {
    /// Largest `error / tolerance` ratio seen, and its error and tolerance.
    worst: (f64, f64, f64),
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Self {
            worst: (0.0, 0.0, 0.0),
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, label: &str, error: f64, tolerance: f64) {
        let ratio = if error.is_nan() {
            f64::INFINITY
        } else {
            error / tolerance
        };
        if ratio >= self.worst.0 || self.worst.2 == 0.0 {
            self.worst = (ratio, error, tolerance);
        }
        if !(error <= tolerance) {
            self.failures
                .push(format!("{label}: {error:.3e} > {tolerance:.1e}"));
        }
    }

    /// Requires `value > bound`.
    fn check_above(&mut self, label: &str, value: f64, bound: f64) {
        if !(value > bound) {
            self.failures
                .push(format!("{label}: {value:.3e} <= {bound:.1e}"));
        }
        self.notes.push(format!("{label}={value:.3e}"));
    }

    fn error(&mut self, label: &str, e: impl std::fmt::Display) {
        self.failures.push(format!("{label}: {e}"));
    }

    fn finish(self, id: u8, name: &str, start: Instant) -> CriterionReport {
        let mut detail = if self.failures.is_empty() {
            self.notes.join(" ")
        } else {
            format!(
                "violated: {}",
                self.failures.first().cloned().unwrap_or_default()
            )
        };
        if self.failures.len() > 1 {
            detail.push_str(&format!(" (+{} more)", self.failures.len() - 1));
        }
        CriterionReport {
            id,
            name: name.to_string(),
            passed: self.failures.is_empty(),
            max_error: self.worst.1,
            tolerance: self.worst.2,
            detail,
            failures: self.failures,
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

/// Test bodies in dimensions 2 and 3: ball, non-spherical ellipsoid and a
/// smoothed polytope.
pub fn test_bodies() -> Vec<(String, ConvexBody)> {
    let e2 = DMatrix::from_row_slice(2, 2, &[0.25, 0.1, 0.1, 1.0]);
    let e3 = DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.0, 0.2, 0.5, 0.1, 0.0, 0.1, 2.0]);
    vec![
        ("ball-2".into(), ConvexBody::unit_ball(2)),
        (
            "ellipse-2".into(),
            ConvexBody::ellipsoid(vec![0.1, -0.2], e2).expect("valid shape"),
        ),
        (
            "lse-pentagon-2".into(),
            ConvexBody::lse_polytope(ConvexBody::regular_polygon_facets(5, 1.0), None)
                .expect("valid polytope"),
        ),
        ("ball-3".into(), ConvexBody::unit_ball(3)),
        (
            "ellipsoid-3".into(),
            ConvexBody::ellipsoid(vec![0.0, 0.1, 0.0], e3).expect("valid shape"),
        ),
        (
            "lse-cube-3".into(),
            ConvexBody::lse_polytope(ConvexBody::cube_facets(3, 1.0), None)
                .expect("valid polytope"),
        ),
    ]
}

fn region(body: &ConvexBody) -> InnerRegion {
    InnerRegion::new(body, 0.9).expect("test bodies are bounded")
}

fn random_flags(body: &ConvexBody, count: usize, sampler: &mut Sampler) -> Vec<Flag> {
    let r = region(body);
    (0..count)
        .map(|_| {
            let x = sampler.point_in(&r);
            let y = sampler.unit_vector(body.dim());
            let w = sampler.transverse(&y);
            Flag { x, y, w }
        })
        .collect()
}

fn ball_flags(n: usize, count: usize, radius: f64, sampler: &mut Sampler) -> Vec<Flag> {
    (0..count)
        .map(|_| {
            let u = sampler.unit_vector(n);
            let r = radius * sampler.uniform(0.0, 1.0).powf(1.0 / n as f64);
            let x: Vec<f64> = u.iter().map(|a| a * r).collect();
            let y = sampler.unit_vector(n);
            let w = sampler.transverse(&y);
            Flag { x, y, w }
        })
        .collect()
}

fn curvature_deviation(
    checks: &mut Checks,
    label: &str,
    metric: &FinslerMetric,
    flags: &[Flag],
    opts: CurvatureOptions,
    target: f64,
    tol: f64,
) {
    let mut worst: f64 = 0.0;
    for k in flag_curvature_field(metric, flags, opts) {
        match k {
            Ok(k) => worst = worst.max((k - target).abs()),
            Err(e) => {
                checks.error(label, e);
                return;
            }
        }
    }
    checks.check(label, worst, tol);
}

fn constant_curvature(cfg: &VerifyConfig, id: u8, name: &str, hilbert: bool) -> CriterionReport {
    let start = Instant::now();
    let target = if hilbert { -1.0 } else { -0.25 };
    let mut sampler = Sampler::new(cfg.seed ^ u64::from(id));
    let mut checks = Checks::new();
    for (label, body) in test_bodies() {
        let metric = if hilbert {
            hilbert_metric(body.clone())
        } else {
            funk_metric(body.clone())
        };
        let metric = match metric {
            Ok(m) => m,
            Err(e) => {
                checks.error(&label, e);
                continue;
            }
        };
        let flags = random_flags(&body, cfg.count(50), &mut sampler);
        let exact = cfg.curvature(CurvatureMethod::Exact);
        curvature_deviation(
            &mut checks,
            &format!("{label} exact"),
            &metric,
            &flags,
            exact,
            target,
            1e-6,
        );
        let fd = cfg.curvature(CurvatureMethod::finite_difference());
        curvature_deviation(
            &mut checks,
            &format!("{label} fd"),
            &metric,
            &flags,
            fd,
            target,
            1e-3,
        );
    }
    checks.finish(id, name, start)
}

/// Funk flag curvature is `−1/4` on every test body.
pub fn criterion_1(cfg: &VerifyConfig) -> CriterionReport {
    constant_curvature(cfg, 1, "funk-curvature-minus-quarter", false)
}

/// Hilbert flag curvature is `−1` on every test body.
pub fn criterion_2(cfg: &VerifyConfig) -> CriterionReport {
    constant_curvature(cfg, 2, "hilbert-curvature-minus-one", true)
}

/// Hilbert metric of the unit ball equals the Klein metric, and the Klein
/// metric has curvature `−1`.
pub fn criterion_3(cfg: &VerifyConfig) -> CriterionReport {
    let start = Instant::now();
    let mut sampler = Sampler::new(cfg.seed ^ 3);
    let mut checks = Checks::new();
    for n in [2, 3] {
        let ball = ConvexBody::unit_ball(n);
        let h = hilbert_metric(ball.clone()).expect("ball is bounded");
        let k = klein_metric(n);
        let r = region(&ball);
        let mut worst: f64 = 0.0;
        for _ in 0..cfg.count(100) {
            let x = sampler.point_in(&r);
            let xi = sampler.gaussian(n);
            match (h.eval(&x, &xi), k.eval(&x, &xi)) {
                (Ok(a), Ok(b)) => worst = worst.max((a - b).abs() / b.abs()),
                (Err(e), _) | (_, Err(e)) => checks.error("klein eval", e),
            }
        }
        checks.check(&format!("hilbert-vs-klein n={n}"), worst, 1e-12);
        let flags = random_flags(&ball, cfg.count(50), &mut sampler);
        let opts = cfg.curvature(CurvatureMethod::Exact);
        curvature_deviation(
            &mut checks,
            &format!("klein curvature n={n}"),
            &k,
            &flags,
            opts,
            -1.0,
            1e-8,
        );
    }
    checks.finish(3, "klein-cross-check", start)
}

/// Minkowski norms are flat; the gnomonic sphere metric has curvature `+1`.
pub fn criterion_4(cfg: &VerifyConfig) -> CriterionReport {
    let start = Instant::now();
    let mut sampler = Sampler::new(cfg.seed ^ 4);
    let mut checks = Checks::new();
    let opts = cfg.curvature(CurvatureMethod::Exact);
    for n in [2, 3] {
        let mut theta = vec![0.0; n];
        theta[0] = 0.3;
        theta[n - 1] -= 0.2;
        let mut center = vec![0.0; n];
        center[0] = 0.4;
        center[1] = -0.2;
        let norms: Vec<(&str, Result<FinslerMetric>)> = vec![
            ("euclidean", Ok(euclidean(n))),
            (
                "randers-constant",
                randers(
                    n,
                    MatrixField::Constant(DMatrix::identity(n, n)),
                    FormField::Constant(theta),
                ),
            ),
            (
                "shifted-ball-gauge",
                ConvexBody::ball(center, 1.0).and_then(minkowski),
            ),
        ];
        let flags = ball_flags(n, cfg.count(50), 2.0, &mut sampler);
        for (label, m) in norms {
            match m {
                Ok(m) => curvature_deviation(
                    &mut checks,
                    &format!("{label} n={n}"),
                    &m,
                    &flags,
                    opts,
                    0.0,
                    1e-10,
                ),
                Err(e) => checks.error(label, e),
            }
        }
        let flags = ball_flags(n, cfg.count(50), 2.0, &mut sampler);
        let s = spherical_projective_metric(n);
        curvature_deviation(
            &mut checks,
            &format!("spherical n={n}"),
            &s,
            &flags,
            opts,
            1.0,
            1e-6,
        );
    }
    checks.finish(4, "minkowski-flat-spherical-plus-one", start)
}

fn random_pairs(
    body: &ConvexBody,
    count: usize,
    sampler: &mut Sampler,
) -> Vec<(Vec<f64>, Vec<f64>)> {
    let r = region(body);
    (0..count)
        .map(|_| (sampler.point_in(&r), sampler.point_in(&r)))
        .collect()
}

/// Closed-form distances agree with the quadrature length of the segment.
pub fn criterion_5(cfg: &VerifyConfig) -> CriterionReport {
    let start = Instant::now();
    let mut sampler = Sampler::new(cfg.seed ^ 5);
    let mut checks = Checks::new();
    let opts = QuadOptions {
        rel_tol: 1e-13,
        abs_tol: 1e-15,
        max_depth: 50,
    };
    for (label, body) in test_bodies() {
        let pairs = random_pairs(&body, cfg.count(100), &mut sampler);
        let funk = funk_metric(body.clone()).expect("test body");
        let hilb = hilbert_metric(body.clone()).expect("test body");
        let errors: Vec<Result<f64>> = pairs
            .par_iter()
            .map(|(p, q)| {
                let seg = Segment::new(p, q);
                let a = (funk_distance(&body, p, q)? - length(&funk, &seg, opts)?).abs();
                let b = (hilbert_distance(&body, p, q)? - length(&hilb, &seg, opts)?).abs();
                Ok(a.max(b))
            })
            .collect();
        let mut worst: f64 = 0.0;
        for e in errors {
            match e {
                Ok(e) => worst = worst.max(e),
                Err(e) => checks.error(&label, e),
            }
        }
        checks.check(&label, worst, 1e-8);
    }
    checks.finish(5, "distance-vs-quadrature", start)
}

/// Integrated geodesics follow the closed-form reparametrized segments.
pub fn criterion_6(cfg: &VerifyConfig) -> CriterionReport {
    let start = Instant::now();
    let mut sampler = Sampler::new(cfg.seed ^ 6);
    let mut checks = Checks::new();
    let gopts = GeodesicOptions {
        rtol: 1e-11,
        atol: 1e-13,
        ..Default::default()
    };
    for (label, body) in test_bodies() {
        let r = region(&body);
        let starts: Vec<(Vec<f64>, Vec<f64>)> = (0..cfg.count(20))
            .map(|_| (sampler.point_in(&r), sampler.unit_vector(body.dim())))
            .collect();
        let funk = funk_metric(body.clone()).expect("test body");
        let hilb = hilbert_metric(body.clone()).expect("test body");
        let deviations: Vec<Result<(f64, f64)>> = starts
            .par_iter()
            .map(|(p, xi)| {
                let fg = funk_geodesic(&body, p, xi)?;
                let v0 = fg.velocity(0.0);
                let tr = trace_geodesic(&funk, p, &v0, 3.0, &gopts)?;
                let df = tr
                    .samples
                    .iter()
                    .map(|s| dist(&s.x, &fg.point(s.s)))
                    .fold(0.0, f64::max);
                let hg = hilbert_geodesic(&body, p, xi)?;
                let v0 = hg.velocity(0.0);
                let mut dh: f64 = 0.0;
                for end in [3.0, -3.0] {
                    let tr = trace_geodesic(&hilb, p, &v0, end, &gopts)?;
                    dh = tr
                        .samples
                        .iter()
                        .map(|s| dist(&s.x, &hg.point(s.s)))
                        .fold(dh, f64::max);
                }
                Ok((df, dh))
            })
            .collect();
        let (mut wf, mut wh) = (0.0f64, 0.0f64);
        for d in deviations {
            match d {
                Ok((a, b)) => {
                    wf = wf.max(a);
                    wh = wh.max(b);
                }
                Err(e) => checks.error(&label, e),
            }
        }
        checks.check(&format!("{label} funk"), wf, 1e-6);
        checks.check(&format!("{label} hilbert"), wh, 1e-6);
    }
    checks.finish(6, "geodesic-ode-vs-closed-form", start)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Hamel residuals vanish on projectively flat metrics and not on the
/// conformal control metric.
pub fn criterion_7(cfg: &VerifyConfig) -> CriterionReport {
    let start = Instant::now();
    let mut sampler = Sampler::new(cfg.seed ^ 7);
    let mut checks = Checks::new();
    for (label, body) in test_bodies() {
        let n = body.dim();
        let mut zoo: Vec<(String, Result<FinslerMetric>)> = vec![
            ("funk".into(), funk_metric(body.clone())),
            ("reverse-funk".into(), reverse_funk_metric(body.clone())),
            ("hilbert".into(), hilbert_metric(body.clone())),
            (
                "funk+minkowski".into(),
                funk_metric(body.clone()).and_then(|f| {
                    let c = vec![0.1; n];
                    sum(f, minkowski(ConvexBody::ball(c, 1.0)?)?)
                }),
            ),
        ];
        if label.starts_with("ball") {
            zoo.push(("klein".into(), Ok(klein_metric(n))));
            zoo.push(("spherical".into(), Ok(spherical_projective_metric(n))));
            zoo.push((
                "minkowski".into(),
                ConvexBody::ball(vec![0.2; n], 1.0).and_then(minkowski),
            ));
        }
        let r = region(&body);
        let probes: Vec<(Vec<f64>, Vec<f64>)> = (0..cfg.count(50))
            .map(|_| (sampler.point_in(&r), sampler.unit_vector(n)))
            .collect();
        for (name, m) in zoo {
            let m = match m {
                Ok(m) => m,
                Err(e) => {
                    checks.error(&name, e);
                    continue;
                }
            };
            let mut worst: f64 = 0.0;
            for (x, y) in &probes {
                match hamel_residual(&m, x, y) {
                    Ok(v) => worst = worst.max(v),
                    Err(e) => checks.error(&name, e),
                }
            }
            checks.check(&format!("{name} on {label}"), worst, 1e-6);
        }
    }
    match hamel_residual(&conformal_control(2), &[0.5, 0.2], &[0.3, 1.0]) {
        Ok(v) => checks.check_above("conformal control", v, 1e-3),
        Err(e) => checks.error("conformal control", e),
    }
    checks.finish(7, "hamel-classification", start)
}

/// Projective factor identities for Funk and Hilbert metrics.
pub fn criterion_8(cfg: &VerifyConfig) -> CriterionReport {
    let start = Instant::now();
    let mut sampler = Sampler::new(cfg.seed ^ 8);
    let mut checks = Checks::new();
    for (label, body) in test_bodies() {
        let n = body.dim();
        let funk = funk_metric(body.clone()).expect("test body");
        let hilb = hilbert_metric(body.clone()).expect("test body");
        let r = region(&body);
        let mut worst = [0.0f64; 4];
        for _ in 0..cfg.count(100) {
            let x = sampler.point_in(&r);
            let y = sampler.gaussian(n);
            let neg: Vec<f64> = y.iter().map(|a| -a).collect();
            let run = || -> Result<[f64; 4]> {
                let ff = funk.eval(&x, &y)?;
                let fb = funk.eval(&x, &neg)?;
                let scale = 1.0 + ff + fb;
                let pf = projective_factor(&funk, &x, &y)?;
                let ph = projective_factor(&hilb, &x, &y)?;
                let ph_neg = projective_factor(&hilb, &x, &neg)?;
                let ident = projective_factor_gradient_identity(&funk, &x, &y)?
                    .max(projective_factor_gradient_identity(&hilb, &x, &y)?);
                Ok([
                    (pf - 0.5 * ff).abs() / scale,
                    (ph - 0.5 * (ff - fb)).abs() / scale,
                    ident,
                    (ph + ph_neg).abs() / scale,
                ])
            };
            match run() {
                Ok(v) => {
                    for i in 0..4 {
                        worst[i] = worst[i].max(v[i]);
                    }
                }
                Err(e) => checks.error(&label, e),
            }
        }
        let names = [
            "P_funk=F/2",
            "P_hilbert=(F-F*)/2",
            "2FP-gradient-identity",
            "P_hilbert-odd",
        ];
        for (name, w) in names.iter().zip(worst) {
            checks.check(&format!("{label} {name}"), w, 1e-7);
        }
    }
    checks.finish(8, "projective-factor-identities", start)
}

/// Distances recovered from Hamel potentials match the closed forms.
pub fn criterion_9(cfg: &VerifyConfig) -> CriterionReport {
    let start = Instant::now();
    let mut sampler = Sampler::new(cfg.seed ^ 9);
    let mut checks = Checks::new();
    let opts = QuadOptions {
        rel_tol: 1e-12,
        abs_tol: 1e-15,
        max_depth: 50,
    };
    for (label, body) in test_bodies() {
        let funk = funk_metric(body.clone()).expect("test body");
        let hilb = hilbert_metric(body.clone()).expect("test body");
        let p0 = body.witness();
        let pairs = random_pairs(&body, cfg.count(50), &mut sampler);
        let errors: Vec<Result<f64>> = pairs
            .par_iter()
            .map(|(p, q)| {
                let a =
                    distance_from_potential(&funk, &p0, p, q, opts)? - funk_distance(&body, p, q)?;
                let b = distance_from_potential(&hilb, &p0, p, q, opts)?
                    - hilbert_distance(&body, p, q)?;
                Ok(a.abs().max(b.abs()))
            })
            .collect();
        let mut worst: f64 = 0.0;
        for e in errors {
            match e {
                Ok(e) => worst = worst.max(e),
                Err(e) => checks.error(&label, e),
            }
        }
        checks.check(&label, worst, 1e-7);
    }
    checks.finish(9, "hamel-potential-distances", start)
}

/// Schwarzian values, Möbius invariance, constant-Schwarzian solutions, and
/// agreement of the Schwarzian route with the flag curvature.
pub fn criterion_10(cfg: &VerifyConfig) -> CriterionReport {
    let start = Instant::now();
    let mut sampler = Sampler::new(cfg.seed ^ 10);
    let mut checks = Checks::new();
    let table: [(&str, Result<f64>, f64); 3] = [
        (
            "{e^2s}",
            schwarzian(&Exponential { lambda: 2.0 }, 0.4),
            -2.0,
        ),
        ("{1/s}", schwarzian(&Reciprocal, 1.0), 0.0),
        ("{tan s}", schwarzian(&Tangent { lambda: 1.0 }, 0.3), 2.0),
    ];
    for (name, got, want) in table {
        match got {
            Ok(v) => checks.check(name, (v - want).abs(), 1e-10),
            Err(e) => checks.error(name, e),
        }
    }
    let mut moebius: f64 = 0.0;
    for _ in 0..cfg.count(20) {
        let (a, b, c, d) = loop {
            let v = sampler.gaussian(4);
            if (v[0] * v[3] - v[1] * v[2]).abs() > 0.2 {
                break (v[0], v[1], v[2], v[3]);
            }
        };
        let s = sampler.uniform(-0.5, 0.5);
        let base = Exponential { lambda: 1.3 };
        let lhs = schwarzian(
            &MoebiusMap {
                a,
                b,
                c,
                d,
                inner: base,
            },
            s,
        );
        let rhs = schwarzian(&base, s);
        if let (Ok(l), Ok(r)) = (lhs, rhs) {
            // Skip probes next to a pole of the Möbius image.
            if (c * base.eval(s) + d).abs() > 0.05 {
                moebius = moebius.max((l - r).abs());
            }
        }
    }
    checks.check("moebius-invariance", moebius, 1e-10);
    let mut lemma: f64 = 0.0;
    for rho in [-2.0, -0.5, 0.0, 1.5] {
        let ratio = SolutionRatio {
            rho,
            u: [0.3, 1.0],
            v: [1.0, -0.4],
        };
        for k in 0..10 {
            let s = -0.5 + 0.1 * k as f64;
            match schwarzian(&ratio, s) {
                Ok(v) => lemma = lemma.max((v - rho).abs()).max(ratio.ode_residual(s)),
                Err(e) => checks.error("constant-schwarzian", e),
            }
        }
    }
    checks.check("constant-schwarzian-solutions", lemma, 1e-9);
    let opts = cfg.curvature(CurvatureMethod::Exact);
    let mut agree: f64 = 0.0;
    for (label, body) in test_bodies() {
        for (name, m) in [
            ("funk", funk_metric(body.clone())),
            ("hilbert", hilbert_metric(body.clone())),
        ] {
            let m = m.expect("test body");
            for fl in random_flags(&body, cfg.count(10), &mut sampler) {
                let run = || -> Result<f64> {
                    let k =
                        riemann_curvature_with(&m, &fl.x, &fl.y, opts)?.flag_curvature(&fl.w)?;
                    Ok((curvature_via_schwarzian(&m, &fl.x, &fl.y)? - k).abs())
                };
                match run() {
                    Ok(v) => agree = agree.max(v),
                    Err(e) => checks.error(&format!("{name} on {label}"), e),
                }
            }
        }
    }
    for (name, m) in [
        ("klein", klein_metric(2)),
        ("spherical", spherical_projective_metric(2)),
    ] {
        for fl in ball_flags(2, cfg.count(10), 0.8, &mut sampler) {
            let run = || -> Result<f64> {
                let k = riemann_curvature_with(&m, &fl.x, &fl.y, opts)?.flag_curvature(&fl.w)?;
                Ok((curvature_via_schwarzian(&m, &fl.x, &fl.y)? - k).abs())
            };
            match run() {
                Ok(v) => agree = agree.max(v),
                Err(e) => checks.error(name, e),
            }
        }
    }
    checks.check("schwarzian-route-vs-flag-curvature", agree, 1e-4);
    checks.finish(10, "schwarzian-table", start)
}

/// From `K = −1` and the boundary limits of the chord, the Möbius
/// reconstruction recovers the Hilbert geodesic and distance.
pub fn criterion_11(cfg: &VerifyConfig) -> CriterionReport {
    let start = Instant::now();
    let mut sampler = Sampler::new(cfg.seed ^ 11);
    let mut checks = Checks::new();
    let (_, body) = test_bodies().swap_remove(1);
    let funk = funk_metric(body.clone()).expect("ellipse");
    let (mut wphi, mut wdist) = (0.0f64, 0.0f64);
    for (p, q) in random_pairs(&body, cfg.count(20), &mut sampler) {
        let xi: Vec<f64> = q.iter().zip(&p).map(|(a, b)| a - b).collect();
        let neg: Vec<f64> = xi.iter().map(|a| -a).collect();
        let run = || -> Result<(f64, f64)> {
            let data = BoundaryData::Limits {
                plus: 1.0 / funk.eval(&p, &xi)?,
                minus: -1.0 / funk.eval(&p, &neg)?,
            };
            // Curvature −1 gives {φ, s} = 2K = −2 for unit speed.
            let phi = moebius_reconstruct(-2.0, data)?;
            let closed = hilbert_geodesic(&body, &p, &xi)?;
            let mut dphi: f64 = 0.0;
            for k in 0..20 {
                let s = -4.0 + 8.0 * k as f64 / 19.0;
                dphi = dphi.max((phi.value(s) - closed.phi(s)).abs());
            }
            let s_q = phi.inverse(1.0).unwrap_or(f64::NAN);
            Ok((dphi, (s_q - hilbert_distance(&body, &p, &q)?).abs()))
        };
        match run() {
            Ok((a, b)) => {
                wphi = wphi.max(a);
                wdist = wdist.max(b);
            }
            Err(e) => checks.error("reconstruction", e),
        }
    }
    checks.check("reconstructed-phi", wphi, 1e-12);
    checks.check("reconstructed-distance", wdist, 1e-8);
    checks.finish(11, "funk-berwald-uniqueness-probe", start)
}

/// Structure of the Riemann curvature of projectively flat metrics.
pub fn criterion_12(cfg: &VerifyConfig) -> CriterionReport {
    let start = Instant::now();
    let mut sampler = Sampler::new(cfg.seed ^ 12);
    let mut checks = Checks::new();
    let opts = cfg.curvature(CurvatureMethod::Exact);
    let mut cases: Vec<(String, FinslerMetric, Vec<Flag>)> = Vec::new();
    for (label, body) in test_bodies() {
        let flags = random_flags(&body, cfg.count(50), &mut sampler);
        cases.push((
            format!("funk {label}"),
            funk_metric(body.clone()).expect("test body"),
            flags.clone(),
        ));
        cases.push((
            format!("hilbert {label}"),
            hilbert_metric(body.clone()).expect("test body"),
            flags,
        ));
    }
    for n in [2, 3] {
        cases.push((
            format!("klein n={n}"),
            klein_metric(n),
            ball_flags(n, cfg.count(50), 0.8, &mut sampler),
        ));
        cases.push((
            format!("spherical n={n}"),
            spherical_projective_metric(n),
            ball_flags(n, cfg.count(50), 2.0, &mut sampler),
        ));
    }
    for (label, metric, flags) in cases {
        let extra: Vec<Vec<Vec<f64>>> = flags
            .iter()
            .map(|f| (0..10).map(|_| sampler.transverse(&f.y)).collect())
            .collect();
        let rows: Vec<Result<[f64; 5]>> = flags
            .par_iter()
            .zip(&extra)
            .map(|(f, ws)| {
                let r = riemann_curvature_with(&metric, &f.x, &f.y, opts)?;
                let sc = scalar_sc(&metric, &f.x, &f.y)?;
                let ric = (r.ricci() - (f.x.len() as f64 - 1.0) * sc).abs() / sc.abs().max(1.0);
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for w in ws {
                    let k = r.flag_curvature(w)?;
                    lo = lo.min(k);
                    hi = hi.max(k);
                }
                Ok([
                    r.symmetry_residual(),
                    r.kernel_residual(),
                    r.projection_residual(sc),
                    ric,
                    hi - lo,
                ])
            })
            .collect();
        let mut worst = [0.0f64; 5];
        for row in rows {
            match row {
                Ok(v) => {
                    for i in 0..5 {
                        worst[i] = worst[i].max(v[i]);
                    }
                }
                Err(e) => checks.error(&label, e),
            }
        }
        let names = [
            ("R_mk-symmetry", 1e-8),
            ("R(y)=0", 1e-8),
            ("R=Sc*P", 1e-6),
            ("Ric=(n-1)Sc", 1e-5),
            ("flag-spread", 1e-8),
        ];
        for ((name, tol), w) in names.iter().zip(worst) {
            checks.check(&format!("{label} {name}"), w, *tol);
        }
    }
    checks.finish(12, "riemann-tensor-structure", start)
}

pub type Criterion = fn(&VerifyConfig) -> CriterionReport;

pub const CRITERIA: [Criterion; 12] = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
    criterion_11,
    criterion_12,
];

pub fn run_all(cfg: &VerifyConfig) -> VerifyReport {
    let criteria: Vec<CriterionReport> = CRITERIA.iter().map(|c| c(cfg)).collect();
    VerifyReport {
        config: *cfg,
        version: env!("CARGO_PKG_VERSION").to_string(),
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    }
}
