use super::FinslerMetric;
use crate::error::{FinslerError, Result};
use crate::quadrature::integrate;
pub use crate::quadrature::QuadOptions as QuadratureOptions;

/// Piecewise-smooth parametrized curve `β : [a, b] → ℝⁿ`.
pub trait Curve {
    fn interval(&self) -> (f64, f64);
    fn point(&self, t: f64) -> Vec<f64>;
    fn velocity(&self, t: f64) -> Vec<f64>;
}

/// `t ↦ p + t(q − p)` on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Segment {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl Segment {
    pub fn new(p: &[f64], q: &[f64]) -> Self {
        Self {
            p: p.to_vec(),
            q: q.to_vec(),
        }
    }
}

impl Curve for Segment {
    fn interval(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
    fn point(&self, t: f64) -> Vec<f64> {
        self.p
            .iter()
            .zip(&self.q)
            .map(|(a, b)| a + t * (b - a))
            .collect()
    }
    fn velocity(&self, _: f64) -> Vec<f64> {
        self.p.iter().zip(&self.q).map(|(a, b)| b - a).collect()
    }
}

/// Curve from closures for position and velocity.
pub struct FnCurve<P, V> {
    pub a: f64,
    pub b: f64,
    pub pos: P,
    pub vel: V,
}

impl<P, V> Curve for FnCurve<P, V>
where
    P: Fn(f64) -> Vec<f64>,
    V: Fn(f64) -> Vec<f64>,
{
    fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }
    fn point(&self, t: f64) -> Vec<f64> {
        (self.pos)(t)
    }
    fn velocity(&self, t: f64) -> Vec<f64> {
        (self.vel)(t)
    }
}

fn integrand(metric: &FinslerMetric, curve: &dyn Curve, t: f64, power: i32) -> Result<f64> {
    let x = curve.point(t);
    if !metric.in_domain(&x) {
        return Err(FinslerError::CurveLeavesDomain { t });
    }
    let v = curve.velocity(t);
    Ok(metric.eval(&x, &v)?.powi(power))
}

/// `ℓ(β) = ∫ F(β, β̇) dt`.
pub fn length(metric: &FinslerMetric, curve: &dyn Curve, opts: QuadratureOptions) -> Result<f64> {
    let (a, b) = curve.interval();
    integrate(|t| integrand(metric, curve, t, 1), a, b, opts)
}

/// `E(β) = ∫ F(β, β̇)² dt`.
pub fn energy(metric: &FinslerMetric, curve: &dyn Curve, opts: QuadratureOptions) -> Result<f64> {
    let (a, b) = curve.interval();
    integrate(|t| integrand(metric, curve, t, 2), a, b, opts)
}
