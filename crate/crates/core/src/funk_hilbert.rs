//! Funk (tautological) and Hilbert structures on convex bodies, with their
//! closed-form distances and geodesics, and the Klein and gnomonic-sphere
//! model metrics.

use rayon::prelude::*;
use serde::Serialize;

use crate::ad::{dot, norm_sq, Real};
use crate::body::ConvexBody;
use crate::error::{check_dim, FinslerError, Result};
use crate::generic_lagrangian;
use crate::metric::{FinslerMetric, Lagrangian, MetricKind, Scalar};
use crate::sampling::Sampler;

/// `F_f(x, ξ) = 1/t*(x, ξ)`: the unit ball at `x` is the body recentered at `x`.
#[derive(Debug, Clone)]
pub struct FunkMetric {
    body: ConvexBody,
}

impl FunkMetric {
    fn eval_generic<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        self.body.inverse_hit(x, y)
    }
}

impl Lagrangian for FunkMetric {
    generic_lagrangian!();
    fn dim(&self) -> usize {
        self.body.dim()
    }
    fn name(&self) -> String {
        "funk".into()
    }
    fn kind(&self) -> MetricKind {
        MetricKind::Funk
    }
    fn body(&self) -> Option<&ConvexBody> {
        Some(&self.body)
    }
    fn is_strict(&self) -> bool {
        self.body.is_bounded()
    }
}

/// `F_f(x, −ξ)`.
#[derive(Debug, Clone)]
pub struct ReverseFunkMetric {
    body: ConvexBody,
}

impl ReverseFunkMetric {
    fn eval_generic<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        let neg: Vec<S> = y.iter().map(|a| -*a).collect();
        self.body.inverse_hit(x, &neg)
    }
}

impl Lagrangian for ReverseFunkMetric {
    generic_lagrangian!();
    fn dim(&self) -> usize {
        self.body.dim()
    }
    fn name(&self) -> String {
        "reverse-funk".into()
    }
    fn kind(&self) -> MetricKind {
        MetricKind::ReverseFunk
    }
    fn body(&self) -> Option<&ConvexBody> {
        Some(&self.body)
    }
    fn is_strict(&self) -> bool {
        self.body.is_bounded()
    }
}

/// `F_h = ½(F_f(x, ξ) + F_f(x, −ξ))` on a bounded body.
#[derive(Debug, Clone)]
pub struct HilbertMetric {
    body: ConvexBody,
}

impl HilbertMetric {
    fn eval_generic<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        let neg: Vec<S> = y.iter().map(|a| -*a).collect();
        Ok((self.body.inverse_hit(x, y)? + self.body.inverse_hit(x, &neg)?) * 0.5)
    }
}

impl Lagrangian for HilbertMetric {
    generic_lagrangian!();
    fn dim(&self) -> usize {
        self.body.dim()
    }
    fn name(&self) -> String {
        "hilbert".into()
    }
    fn kind(&self) -> MetricKind {
        MetricKind::Hilbert
    }
    fn body(&self) -> Option<&ConvexBody> {
        Some(&self.body)
    }
    fn is_reversible(&self) -> bool {
        true
    }
}

/// Klein model: `√((1 − |x|²)|ξ|² + ⟨x,ξ⟩²)/(1 − |x|²)` on the unit ball.
#[derive(Debug, Clone)]
pub struct KleinMetric {
    ball: ConvexBody,
}

impl KleinMetric {
    fn eval_generic<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        check_dim(self.ball.dim(), x.len())?;
        check_dim(self.ball.dim(), y.len())?;
        let c = S::one() - norm_sq(x);
        if c.value() <= 0.0 {
            return Err(FinslerError::OutsideUnitBall);
        }
        let p = dot(x, y);
        Ok((c * norm_sq(y) + p * p).sqrt() / c)
    }
}

impl Lagrangian for KleinMetric {
    generic_lagrangian!();
    fn dim(&self) -> usize {
        self.ball.dim()
    }
    fn name(&self) -> String {
        "klein".into()
    }
    fn kind(&self) -> MetricKind {
        MetricKind::Klein
    }
    fn body(&self) -> Option<&ConvexBody> {
        Some(&self.ball)
    }
    fn is_reversible(&self) -> bool {
        true
    }
}

/// Round sphere in gnomonic coordinates:
/// `√((1 + |x|²)|ξ|² − ⟨x,ξ⟩²)/(1 + |x|²)` on all of `ℝⁿ`.
#[derive(Debug, Clone)]
pub struct SphericalMetric {
    n: usize,
}

impl SphericalMetric {
    fn eval_generic<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        check_dim(self.n, x.len())?;
        check_dim(self.n, y.len())?;
        let c = S::one() + norm_sq(x);
        let p = dot(x, y);
        Ok((c * norm_sq(y) - p * p).sqrt() / c)
    }
}

impl Lagrangian for SphericalMetric {
    generic_lagrangian!();
    fn dim(&self) -> usize {
        self.n
    }
    fn name(&self) -> String {
        "spherical".into()
    }
    fn kind(&self) -> MetricKind {
        MetricKind::Spherical
    }
    fn is_reversible(&self) -> bool {
        true
    }
}

pub fn funk_metric(body: ConvexBody) -> Result<FinslerMetric> {
    Ok(FinslerMetric::new(FunkMetric { body }))
}

pub fn reverse_funk_metric(body: ConvexBody) -> Result<FinslerMetric> {
    Ok(FinslerMetric::new(ReverseFunkMetric { body }))
}

pub fn hilbert_metric(body: ConvexBody) -> Result<FinslerMetric> {
    if !body.is_bounded() {
        return Err(FinslerError::UnboundedBody);
    }
    Ok(FinslerMetric::new(HilbertMetric { body }))
}

pub fn klein_metric(n: usize) -> FinslerMetric {
    FinslerMetric::new(KleinMetric {
        ball: ConvexBody::unit_ball(n),
    })
}

pub fn spherical_projective_metric(n: usize) -> FinslerMetric {
    FinslerMetric::new(SphericalMetric { n })
}

fn check_points(body: &ConvexBody, p: &[f64], q: &[f64]) -> Result<()> {
    check_dim(body.dim(), p.len())?;
    check_dim(body.dim(), q.len())?;
    if !body.contains(p) || !body.contains(q) {
        return Err(FinslerError::PointOutsideBody);
    }
    Ok(())
}

/// `log(|a − p|/|a − q|)` with `a` the boundary point hit by the ray from
/// `p` through `q`, evaluated as `log(F_f(q, q − p)/F_f(p, q − p))` to avoid
/// cancellation near the boundary. Zero when the ray escapes.
pub fn funk_distance(body: &ConvexBody, p: &[f64], q: &[f64]) -> Result<f64> {
    check_points(body, p, q)?;
    if p == q {
        return Ok(0.0);
    }
    let xi: Vec<f64> = q.iter().zip(p).map(|(a, b)| a - b).collect();
    let fp: f64 = body.inverse_hit(p, &xi)?;
    if fp == 0.0 {
        return Ok(0.0);
    }
    let fq: f64 = body.inverse_hit(q, &xi)?;
    Ok((fq / fp).ln())
}

pub fn reverse_funk_distance(body: &ConvexBody, p: &[f64], q: &[f64]) -> Result<f64> {
    funk_distance(body, q, p)
}

/// Half the sum of the two Funk distances: half the log cross-ratio.
pub fn hilbert_distance(body: &ConvexBody, p: &[f64], q: &[f64]) -> Result<f64> {
    if !body.is_bounded() {
        return Err(FinslerError::UnboundedBody);
    }
    Ok(0.5 * (funk_distance(body, p, q)? + funk_distance(body, q, p)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceKind {
    Funk,
    ReverseFunk,
    Hilbert,
}

pub fn distance(body: &ConvexBody, kind: DistanceKind, p: &[f64], q: &[f64]) -> Result<f64> {
    match kind {
        DistanceKind::Funk => funk_distance(body, p, q),
        DistanceKind::ReverseFunk => reverse_funk_distance(body, p, q),
        DistanceKind::Hilbert => hilbert_distance(body, p, q),
    }
}

/// All ordered pairwise distances, computed in parallel, row-major.
pub fn distance_matrix(
    body: &ConvexBody,
    kind: DistanceKind,
    points: &[Vec<f64>],
) -> Vec<Vec<Result<f64>>> {
    points
        .par_iter()
        .map(|p| points.iter().map(|q| distance(body, kind, p, q)).collect())
        .collect()
}

/// Unit-speed Funk geodesic `s ↦ p + φ(s)ξ`, `φ(s) = (1 − e^{−s})/F_f(p, ξ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunkGeodesic {
    pub p: Vec<f64>,
    pub xi: Vec<f64>,
    /// `F_f(p, ξ)`.
    pub speed: f64,
}

impl FunkGeodesic {
    pub fn phi<S: Real>(&self, s: S) -> S {
        (S::one() - (-s).exp()) / self.speed
    }

    pub fn phi_dot(&self, s: f64) -> f64 {
        (-s).exp() / self.speed
    }

    pub fn point(&self, s: f64) -> Vec<f64> {
        let t = self.phi(s);
        self.p
            .iter()
            .zip(&self.xi)
            .map(|(a, b)| a + t * b)
            .collect()
    }

    pub fn velocity(&self, s: f64) -> Vec<f64> {
        let t = self.phi_dot(s);
        self.xi.iter().map(|b| t * b).collect()
    }

    /// The forward limit `p + ξ/F_f(p, ξ) ∈ ∂U`.
    pub fn endpoint(&self) -> Vec<f64> {
        self.p
            .iter()
            .zip(&self.xi)
            .map(|(a, b)| a + b / self.speed)
            .collect()
    }
}

pub fn funk_geodesic(body: &ConvexBody, p: &[f64], xi: &[f64]) -> Result<FunkGeodesic> {
    check_dim(body.dim(), xi.len())?;
    let speed: f64 = body.inverse_hit(p, xi)?;
    if speed <= 0.0 {
        return Err(FinslerError::EscapingDirection);
    }
    Ok(FunkGeodesic {
        p: p.to_vec(),
        xi: xi.to_vec(),
        speed,
    })
}

/// Unit-speed Hilbert geodesic `s ↦ p + φ(s)ξ` with
/// `φ(s) = (e^s − e^{−s})/(F e^s + F* e^{−s})`, `F = F_f(p, ξ)`,
/// `F* = F_f(p, −ξ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertGeodesic {
    pub p: Vec<f64>,
    pub xi: Vec<f64>,
    pub forward: f64,
    pub backward: f64,
}

impl HilbertGeodesic {
    pub fn phi<S: Real>(&self, s: S) -> S {
        if s.value() >= 0.0 {
            let e = (s * -2.0).exp();
            (S::one() - e) / (e * self.backward + self.forward)
        } else {
            let e = (s * 2.0).exp();
            (e - 1.0) / (e * self.forward + self.backward)
        }
    }

    pub fn phi_dot(&self, s: f64) -> f64 {
        let d = self.forward * s.exp() + self.backward * (-s).exp();
        if d.is_finite() {
            2.0 * (self.forward + self.backward) / (d * d)
        } else {
            0.0
        }
    }

    pub fn point(&self, s: f64) -> Vec<f64> {
        let t = self.phi(s);
        self.p
            .iter()
            .zip(&self.xi)
            .map(|(a, b)| a + t * b)
            .collect()
    }

    pub fn velocity(&self, s: f64) -> Vec<f64> {
        let t = self.phi_dot(s);
        self.xi.iter().map(|b| t * b).collect()
    }

    /// Limits at `s → +∞` and `s → −∞`.
    pub fn endpoints(&self) -> (Vec<f64>, Vec<f64>) {
        let a = self
            .p
            .iter()
            .zip(&self.xi)
            .map(|(x, v)| x + v / self.forward)
            .collect();
        let b = self
            .p
            .iter()
            .zip(&self.xi)
            .map(|(x, v)| x - v / self.backward)
            .collect();
        (a, b)
    }
}

pub fn hilbert_geodesic(body: &ConvexBody, p: &[f64], xi: &[f64]) -> Result<HilbertGeodesic> {
    if !body.is_bounded() {
        return Err(FinslerError::UnboundedBody);
    }
    check_dim(body.dim(), xi.len())?;
    let neg: Vec<f64> = xi.iter().map(|a| -a).collect();
    let forward: f64 = body.inverse_hit(p, xi)?;
    let backward: f64 = body.inverse_hit(p, &neg)?;
    if forward <= 0.0 || backward <= 0.0 {
        return Err(FinslerError::UnboundedBody);
    }
    Ok(HilbertGeodesic {
        p: p.to_vec(),
        xi: xi.to_vec(),
        forward,
        backward,
    })
}

/// Outcome of a midpoint-convexity probe; `witness` holds `(p, q)` whose
/// Euclidean midpoint left the metric ball.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityProbe {
    pub convex: bool,
    pub trials: usize,
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
}

/// Samples pairs of points of the closed Hilbert ball `B(center, radius)`
/// along random geodesic rays and checks their midpoints stay in the ball.
pub fn hilbert_ball_convexity_probe(
    body: &ConvexBody,
    center: &[f64],
    radius: f64,
    trials: usize,
    sampler: &mut Sampler,
) -> Result<ConvexityProbe> {
    if !body.is_bounded() {
        return Err(FinslerError::UnboundedBody);
    }
    if !body.contains(center) {
        return Err(FinslerError::PointOutsideBody);
    }
    let n = body.dim();
    if radius <= 0.0 {
        return Ok(ConvexityProbe {
            convex: true,
            trials: 0,
            witness: None,
        });
    }
    let draw = |s: &mut Sampler| -> Result<Vec<f64>> {
        let u = s.unit_vector(n);
        let r = radius * s.uniform(0.0, 1.0).powf(1.0 / n as f64);
        Ok(hilbert_geodesic(body, center, &u)?.point(r))
    };
    for _ in 0..trials {
        let p = draw(sampler)?;
        let q = draw(sampler)?;
        let mid: Vec<f64> = p.iter().zip(&q).map(|(a, b)| 0.5 * (a + b)).collect();
        if hilbert_distance(body, center, &mid)? > radius * (1.0 + 1e-12) + 1e-12 {
            return Ok(ConvexityProbe {
                convex: false,
                trials,
                witness: Some((p, q)),
            });
        }
    }
    Ok(ConvexityProbe {
        convex: true,
        trials,
        witness: None,
    })
}

/// Hyperbolic translation of the Klein ball along the first axis:
/// `x ↦ ((x₁ + t)/(1 + t x₁), x' √(1 − t²)/(1 + t x₁))`, `|t| < 1`.
///
/// This is a projective map preserving the unit ball.
pub fn klein_translation(t: f64, x: &[f64]) -> Vec<f64> {
    let den = 1.0 + t * x[0];
    let k = (1.0 - t * t).sqrt();
    let mut out = Vec::with_capacity(x.len());
    out.push((x[0] + t) / den);
    out.extend(x[1..].iter().map(|a| a * k / den));
    out
}
