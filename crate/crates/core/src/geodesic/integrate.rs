use rayon::prelude::*;
use serde::Serialize;

use super::spray::spray_with;
use crate::ad::DerivativeMethod;
use crate::error::{check_dim, FinslerError, Result};
use crate::metric::FinslerMetric;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeodesicOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    /// Stop once the Euclidean gap to the boundary along the direction of
    /// motion falls below this fraction of `1 + |x|`.
    pub boundary_tol: f64,
    pub max_steps: usize,
    /// `None` uses the metric's default derivative method.
    pub method: Option<DerivativeMethod>,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            max_step: 0.1,
            boundary_tol: 1e-6,
            max_steps: 200_000,
            method: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicSample {
    pub s: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `ẏ = −2G(x, y)`.
    pub accel: Vec<f64>,
    /// `F(x, y)`.
    pub speed: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Termination {
    Completed,
    BoundaryReached { s: f64 },
}

/// Samples of a geodesic at the accepted steps, with speed diagnostics.
/// Samples are ordered by integration direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicTrace {
    pub samples: Vec<GeodesicSample>,
    pub initial_speed: f64,
    pub max_speed_drift: f64,
    pub stats: IntegratorStats,
    pub termination: Termination,
}

impl GeodesicTrace {
    pub fn last(&self) -> &GeodesicSample {
        self.samples.last().expect("trace holds the initial sample")
    }

    /// Cubic Hermite interpolation of `(x, y)` at parameter `s`.
    pub fn state_at(&self, s: f64) -> Option<(Vec<f64>, Vec<f64>)> {
        let first = self.samples.first()?.s;
        let last = self.last().s;
        let (lo, hi) = if first <= last {
            (first, last)
        } else {
            (last, first)
        };
        if s < lo - 1e-12 || s > hi + 1e-12 {
            return None;
        }
        let idx = self
            .samples
            .windows(2)
            .position(|w| (w[0].s - s) * (w[1].s - s) <= 0.0)
            .unwrap_or(0);
        if self.samples.len() == 1 {
            let a = &self.samples[0];
            return Some((a.x.clone(), a.y.clone()));
        }
        let (a, b) = (&self.samples[idx], &self.samples[idx + 1]);
        let h = b.s - a.s;
        let t = (s - a.s) / h;
        let (h00, h10, h01, h11) = (
            2.0 * t.powi(3) - 3.0 * t * t + 1.0,
            t.powi(3) - 2.0 * t * t + t,
            -2.0 * t.powi(3) + 3.0 * t * t,
            t.powi(3) - t * t,
        );
        let herm = |p0: &[f64], m0: &[f64], p1: &[f64], m1: &[f64]| -> Vec<f64> {
            (0..p0.len())
                .map(|i| h00 * p0[i] + h10 * h * m0[i] + h01 * p1[i] + h11 * h * m1[i])
                .collect()
        };
        Some((
            herm(&a.x, &a.y, &b.x, &b.y),
            herm(&a.y, &a.accel, &b.y, &b.accel),
        ))
    }
}

// Dormand–Prince 5(4) tableau (autonomous system, nodes not needed).
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct System<'a> {
    metric: &'a FinslerMetric,
    method: DerivativeMethod,
    n: usize,
    evals: usize,
}

impl System<'_> {
    /// `(y, −2G(x, y))`, or `None` outside the domain.
    fn rhs(&mut self, z: &[f64]) -> Result<Option<Vec<f64>>> {
        self.evals += 1;
        let (x, y) = z.split_at(self.n);
        if !self.metric.in_domain(x) || z.iter().any(|a| !a.is_finite()) {
            return Ok(None);
        }
        match spray_with(self.metric, x, y, self.method) {
            Ok(g) => {
                let mut out = y.to_vec();
                out.extend(g.coefficients.iter().map(|v| -2.0 * v));
                Ok(Some(out))
            }
            Err(FinslerError::PointOutsideBody | FinslerError::OutsideUnitBall) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

fn near_boundary(
    metric: &FinslerMetric,
    x: &[f64],
    y: &[f64],
    sign: f64,
    tol: f64,
) -> Result<bool> {
    let Some(body) = metric.body() else {
        return Ok(false);
    };
    let dir: Vec<f64> = y.iter().map(|a| sign * a).collect();
    let ynorm = y.iter().map(|a| a * a).sum::<f64>().sqrt();
    let xnorm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let gap = body.ray_hit(x, &dir)? * ynorm;
    Ok(gap < tol * (1.0 + xnorm))
}

/// Integrates `ẋ = y, ẏ = −2G(x, y)` from `(p, ξ)` to `s_end` (either
/// sign). Reaching the boundary ends the trace with
/// [`Termination::BoundaryReached`] instead of an error.
pub fn trace_geodesic(
    metric: &FinslerMetric,
    p: &[f64],
    xi: &[f64],
    s_end: f64,
    opts: &GeodesicOptions,
) -> Result<GeodesicTrace> {
    let n = metric.dim();
    check_dim(n, p.len())?;
    check_dim(n, xi.len())?;
    if xi.iter().all(|&a| a == 0.0) {
        return Err(FinslerError::ZeroVector);
    }
    if !metric.in_domain(p) {
        return Err(FinslerError::PointOutsideBody);
    }
    let mut sys = System {
        metric,
        method: opts.method.unwrap_or_else(|| metric.default_method()),
        n,
        evals: 0,
    };
    let sign = if s_end >= 0.0 { 1.0 } else { -1.0 };
    let mut z: Vec<f64> = p.iter().chain(xi).copied().collect();
    let mut k0 = sys.rhs(&z)?.ok_or(FinslerError::PointOutsideBody)?;
    let initial_speed = metric.eval(p, xi)?;
    let mut trace = GeodesicTrace {
        samples: vec![GeodesicSample {
            s: 0.0,
            x: p.to_vec(),
            y: xi.to_vec(),
            accel: k0[n..].to_vec(),
            speed: initial_speed,
        }],
        initial_speed,
        max_speed_drift: 0.0,
        stats: IntegratorStats::default(),
        termination: Termination::Completed,
    };
    let mut s = 0.0;
    let mut h = sign * opts.max_step.min(0.01).min(s_end.abs().max(1e-300));
    let dim = 2 * n;
    while (s_end - s) * sign > 0.0 {
        if trace.stats.accepted + trace.stats.rejected >= opts.max_steps {
            return Err(FinslerError::StepUnderflow { s });
        }
        if (s + h - s_end) * sign > 0.0 {
            h = s_end - s;
        }
        if h.abs() < 1e-14 * s.abs().max(1.0) {
            return Err(FinslerError::StepUnderflow { s });
        }
        let mut k: Vec<Vec<f64>> = vec![k0.clone()];
        let mut inside = true;
        for stage in 1..7 {
            let zi: Vec<f64> = (0..dim)
                .map(|i| z[i] + h * (0..stage).map(|j| A[stage][j] * k[j][i]).sum::<f64>())
                .collect();
            match sys.rhs(&zi)? {
                Some(ki) => k.push(ki),
                None => {
                    inside = false;
                    break;
                }
            }
        }
        if !inside {
            trace.stats.rejected += 1;
            h *= 0.25;
            continue;
        }
        let znew: Vec<f64> = (0..dim)
            .map(|i| z[i] + h * (0..6).map(|j| A[6][j] * k[j][i]).sum::<f64>())
            .collect();
        let mut err = 0.0;
        for i in 0..dim {
            let e = h * (0..7).map(|j| (B5[j] - B4[j]) * k[j][i]).sum::<f64>();
            let sc = opts.atol + opts.rtol * z[i].abs().max(znew[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / dim as f64).sqrt();
        if err <= 1.0 {
            s += h;
            z = znew;
            k0 = k[6].clone();
            trace.stats.accepted += 1;
            let (x, y) = z.split_at(n);
            let speed = metric.eval(x, y)?;
            trace.max_speed_drift = trace.max_speed_drift.max((speed - initial_speed).abs());
            trace.samples.push(GeodesicSample {
                s,
                x: x.to_vec(),
                y: y.to_vec(),
                accel: k0[n..].to_vec(),
                speed,
            });
            if near_boundary(metric, x, y, sign, opts.boundary_tol)? {
                trace.termination = Termination::BoundaryReached { s };
                break;
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = sign * (h.abs() * factor).min(opts.max_step);
        } else {
            trace.stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
    trace.stats.rhs_evals = sys.evals;
    Ok(trace)
}

/// As [`trace_geodesic`], but reaching the boundary is an error carrying
/// the last interior state.
pub fn integrate_geodesic(
    metric: &FinslerMetric,
    p: &[f64],
    xi: &[f64],
    s_end: f64,
    opts: &GeodesicOptions,
) -> Result<GeodesicTrace> {
    let trace = trace_geodesic(metric, p, xi, s_end, opts)?;
    match trace.termination {
        Termination::Completed => Ok(trace),
        Termination::BoundaryReached { s } => {
            let last = trace.last();
            Err(FinslerError::BoundaryReached {
                s,
                x: last.x.clone(),
                y: last.y.clone(),
            })
        }
    }
}

/// Integrates many geodesics in parallel; results keep the input order.
pub fn integrate_many(
    metric: &FinslerMetric,
    starts: &[(Vec<f64>, Vec<f64>)],
    s_end: f64,
    opts: &GeodesicOptions,
) -> Vec<Result<GeodesicTrace>> {
    starts
        .par_iter()
        .map(|(p, xi)| integrate_geodesic(metric, p, xi, s_end, opts))
        .collect()
}

/// `σ_ξ(1)`: endpoint at parameter 1 of the geodesic with initial velocity `ξ`.
pub fn exponential(metric: &FinslerMetric, p: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
    exponential_with(metric, p, xi, &GeodesicOptions::default())
}

pub fn exponential_with(
    metric: &FinslerMetric,
    p: &[f64],
    xi: &[f64],
    opts: &GeodesicOptions,
) -> Result<Vec<f64>> {
    if xi.iter().all(|&a| a == 0.0) {
        return Ok(p.to_vec());
    }
    Ok(integrate_geodesic(metric, p, xi, 1.0, opts)?
        .last()
        .x
        .clone())
}
