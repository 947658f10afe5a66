//! Projective flatness: Hamel residuals, the projective factor, the Hilbert
//! 1-form and Hamel potentials.
//!
//! Residuals are divided by the local scale `F + ‖∇ₓF‖` so thresholds do not
//! depend on the size of the domain.

use serde::Serialize;

use crate::ad::{directional, grad_y, seed, unit, Perturbation, TaylorScalar, T1};
use crate::error::{check_dim, FinslerError, Result};
use crate::metric::{FinslerMetric, Lagrangian, Scalar};
use crate::quadrature::{integrate, QuadOptions};
use crate::sampling::Sampler;

struct FirstJets {
    f: f64,
    grad_x: Vec<f64>,
    grad_y: Vec<f64>,
    /// `mixed[j][m] = ∂²F/∂xʲ∂yᵐ`.
    mixed: Vec<Vec<f64>>,
    /// `yᵏ ∂²F/∂xᵏ∂yᵐ`.
    transport: Vec<f64>,
}

fn first_jets(f: &dyn Lagrangian, x: &[f64], y: &[f64]) -> Result<FirstJets> {
    let n = f.dim();
    check_dim(n, x.len())?;
    check_dim(n, y.len())?;
    let mut grad_x = vec![0.0; n];
    let mut grad_y = vec![0.0; n];
    let mut mixed = vec![vec![0.0; n]; n];
    let mut transport = vec![0.0; n];
    let mut value = 0.0;
    for j in 0..n {
        let ej = unit::<f64>(n, j);
        for m in 0..n {
            let em = unit::<f64>(n, m);
            let r = directional(f, x, y, Perturbation::x(&ej), Perturbation::y(&em))?;
            mixed[j][m] = r.d12;
            grad_x[j] = r.d1;
            grad_y[m] = r.d2;
            value = r.v;
        }
        let r = directional(f, x, y, Perturbation::x(y), Perturbation::y(&ej))?;
        transport[j] = r.d12;
    }
    Ok(FirstJets {
        f: value,
        grad_x,
        grad_y,
        mixed,
        transport,
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// `‖yᵏ ∂²F/∂xᵏ∂yᵐ − ∂F/∂xᵐ‖ / (F + ‖∇ₓF‖)`.
pub fn hamel_residual(metric: &FinslerMetric, x: &[f64], y: &[f64]) -> Result<f64> {
    let j = first_jets(metric.lagrangian(), x, y)?;
    let r: Vec<f64> = j
        .transport
        .iter()
        .zip(&j.grad_x)
        .map(|(a, b)| a - b)
        .collect();
    Ok(norm(&r) / (j.f + norm(&j.grad_x)))
}

/// Frobenius norm of `∂²F/∂xʲ∂yᵐ − ∂²F/∂xᵐ∂yʲ`, relative to the mixed
/// Hessian plus `(F + ‖∇ₓF‖)/‖y‖`.
pub fn hamel_symmetry_residual(metric: &FinslerMetric, x: &[f64], y: &[f64]) -> Result<f64> {
    let j = first_jets(metric.lagrangian(), x, y)?;
    let n = x.len();
    let mut anti = 0.0;
    let mut full = 0.0;
    for a in 0..n {
        for b in 0..n {
            anti += (j.mixed[a][b] - j.mixed[b][a]).powi(2);
            full += j.mixed[a][b].powi(2);
        }
    }
    Ok(anti.sqrt() / (full.sqrt() + (j.f + norm(&j.grad_x)) / norm(y)))
}

/// `P = yᵏ ∂F/∂xᵏ / (2F)` over any scalar admitting one more jet level.
pub fn projective_factor_generic<S>(f: &dyn Lagrangian, x: &[S], y: &[S]) -> Result<S>
where
    S: Scalar,
    TaylorScalar<S>: Scalar,
{
    let r = directional(f, x, y, Perturbation::x(y), Perturbation::none())?;
    if r.v.value() <= 0.0 {
        return Err(FinslerError::ZeroLagrangian);
    }
    Ok(r.d1 / (r.v * 2.0))
}

/// Projective factor `P(x, y)`, defined by `G = P·y` for flat metrics.
pub fn projective_factor(metric: &FinslerMetric, x: &[f64], y: &[f64]) -> Result<f64> {
    check_dim(metric.dim(), x.len())?;
    check_dim(metric.dim(), y.len())?;
    projective_factor_generic::<f64>(metric.lagrangian(), x, y)
}

/// `‖∂F/∂xᵐ − P ∂F/∂yᵐ − F ∂P/∂yᵐ‖ / (F + ‖∇ₓF‖)`.
pub fn projective_factor_gradient_identity(
    metric: &FinslerMetric,
    x: &[f64],
    y: &[f64],
) -> Result<f64> {
    let f = metric.lagrangian();
    let n = f.dim();
    let j = first_jets(f, x, y)?;
    let p = projective_factor(metric, x, y)?;
    let mut sq = 0.0;
    for m in 0..n {
        let em = unit::<f64>(n, m);
        let xs: Vec<T1> = seed(x, None, None);
        let ys: Vec<T1> = seed(y, Some(&em), None);
        let dp = projective_factor_generic::<T1>(f, &xs, &ys)?.d1;
        sq += (j.grad_x[m] - p * j.grad_y[m] - j.f * dp).powi(2);
    }
    Ok(sq.sqrt() / (j.f + norm(&j.grad_x)))
}

/// Hilbert 1-form `ω_j = ∂F/∂yʲ`.
pub fn hilbert_form(metric: &FinslerMetric, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    if y.iter().all(|&a| a == 0.0) {
        return Err(FinslerError::ZeroVector);
    }
    grad_y(metric.lagrangian(), x, y)
}

/// `h(x, y) = ∫₀¹ ⟨x − p₀, ∂F/∂y(p₀ + t(x − p₀), y)⟩ dt`.
pub fn hamel_potential(
    metric: &FinslerMetric,
    p0: &[f64],
    x: &[f64],
    y: &[f64],
    opts: QuadOptions,
) -> Result<f64> {
    let n = metric.dim();
    check_dim(n, p0.len())?;
    check_dim(n, x.len())?;
    check_dim(n, y.len())?;
    if !metric.in_domain(p0) || !metric.in_domain(x) {
        return Err(FinslerError::SegmentLeavesDomain);
    }
    let d: Vec<f64> = x.iter().zip(p0).map(|(a, b)| a - b).collect();
    if d.iter().all(|&a| a == 0.0) {
        return Ok(0.0);
    }
    integrate(
        |t| {
            let z: Vec<f64> = p0.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            if !metric.in_domain(&z) {
                return Err(FinslerError::SegmentLeavesDomain);
            }
            let w = hilbert_form(metric, &z, y)?;
            Ok(w.iter().zip(&d).map(|(a, b)| a * b).sum())
        },
        0.0,
        1.0,
        opts,
    )
}

/// `h(q, q − p) − h(p, q − p)`.
pub fn distance_from_potential(
    metric: &FinslerMetric,
    p0: &[f64],
    p: &[f64],
    q: &[f64],
    opts: QuadOptions,
) -> Result<f64> {
    if p == q {
        return Ok(0.0);
    }
    let y: Vec<f64> = q.iter().zip(p).map(|(a, b)| a - b).collect();
    Ok(hamel_potential(metric, p0, q, &y, opts)? - hamel_potential(metric, p0, p, &y, opts)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlatnessVerdict {
    Flat,
    NotFlat,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatnessReport {
    pub verdict: FlatnessVerdict,
    pub samples: usize,
    pub max_residual: f64,
}

pub const FLAT_THRESHOLD: f64 = 1e-6;
pub const NOT_FLAT_THRESHOLD: f64 = 1e-3;

/// Three-way verdict from [`hamel_residual`] at `samples` random points:
/// flat if all residuals are below [`FLAT_THRESHOLD`], not flat if any is
/// above [`NOT_FLAT_THRESHOLD`], indeterminate otherwise.
pub fn classify_projective_flatness<P>(
    metric: &FinslerMetric,
    mut points: P,
    samples: usize,
    sampler: &mut Sampler,
) -> Result<FlatnessReport>
where
    P: FnMut(&mut Sampler) -> Vec<f64>,
{
    let n = metric.dim();
    let mut max_residual: f64 = 0.0;
    for _ in 0..samples {
        let x = points(sampler);
        let y = sampler.unit_vector(n);
        max_residual = max_residual.max(hamel_residual(metric, &x, &y)?);
    }
    let verdict = if max_residual > NOT_FLAT_THRESHOLD {
        FlatnessVerdict::NotFlat
    } else if max_residual < FLAT_THRESHOLD {
        FlatnessVerdict::Flat
    } else {
        FlatnessVerdict::Indeterminate
    };
    Ok(FlatnessReport {
        verdict,
        samples,
        max_residual,
    })
}
