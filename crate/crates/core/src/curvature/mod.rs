//! Riemann, flag and Ricci curvature from the spray, the scalar `Sc` of
//! projectively flat metrics, and the Schwarzian route to curvature.

mod schwarzian;

pub use schwarzian::{
    curvature_via_schwarzian, moebius_reconstruct, schwarzian, schwarzian_fd, BoundaryData,
    Exponential, Linear, MoebiusFamily, MoebiusMap, MoebiusSolution, Reciprocal, Reparametrization,
    SolutionRatio, Tangent,
};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::ad::{fd_first, fd_second, seed, unit, T1};
use crate::error::{check_dim, FinslerError, Result};
use crate::geodesic::{spray_fd_steps, spray_generic};
use crate::metric::{fundamental_tensor_generic, FinslerMetric};
use crate::projective::projective_factor_generic;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CurvatureMethod {
    /// Nested Taylor jets: the spray over first-order jets.
    Exact,
    /// Richardson-refined differences of a finite-difference spray.
    ///
    /// With `levels > 1` the steps run through `levels` values growing by
    /// `√2`, and the result is taken at the finer end of the consecutive
    /// pair that agrees best.
    FiniteDifference {
        spray_step: f64,
        outer_step: f64,
        levels: u32,
    },
}

impl CurvatureMethod {
    pub fn finite_difference() -> Self {
        CurvatureMethod::FiniteDifference {
            spray_step: 1e-2,
            outer_step: 1.5e-2,
            levels: 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureOptions {
    pub method: CurvatureMethod,
    /// Flips the sign of the `2Gʲ ∂²Gⁱ/∂yʲ∂yᵏ` term; harness self-test only.
    pub inject_sign_bug: bool,
}

impl Default for CurvatureOptions {
    fn default() -> Self {
        Self {
            method: CurvatureMethod::Exact,
            inject_sign_bug: false,
        }
    }
}

impl CurvatureOptions {
    pub fn for_metric(metric: &FinslerMetric) -> Self {
        let method = if metric.has_exact_jets() {
            CurvatureMethod::Exact
        } else {
            CurvatureMethod::finite_difference()
        };
        Self {
            method,
            inject_sign_bug: false,
        }
    }
}

/// Riemann curvature `Rⁱ_k(x, y)` together with `g_y` and `F(x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiemannCurvature {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `r[(i, k)] = Rⁱ_k`.
    pub r: DMatrix<f64>,
    /// `lowered[(m, k)] = g_mi Rⁱ_k`.
    pub lowered: DMatrix<f64>,
    pub g: DMatrix<f64>,
    pub f: f64,
}

impl RiemannCurvature {
    pub fn ricci(&self) -> f64 {
        self.r.trace()
    }

    /// `‖R_mk − R_km‖ / max(1, ‖R_mk‖)`.
    pub fn symmetry_residual(&self) -> f64 {
        let l = &self.lowered;
        (l - l.transpose()).norm() / l.norm().max(1.0)
    }

    /// `‖Rⁱ_k yᵏ‖ / (max(1, ‖R‖) ‖y‖)`.
    pub fn kernel_residual(&self) -> f64 {
        let y = DVector::from_column_slice(&self.y);
        (&self.r * &y).norm() / (self.r.norm().max(1.0) * y.norm())
    }

    /// `δⁱ_k − yⁱ g_kj yʲ / F²`, the `g_y`-orthogonal projection onto `y^⊥`.
    pub fn projector(&self) -> DMatrix<f64> {
        let n = self.y.len();
        let y = DVector::from_column_slice(&self.y);
        let gy = &self.g * &y;
        DMatrix::identity(n, n) - (&y * gy.transpose()) / (self.f * self.f)
    }

    /// `‖R − Sc·P_{y⊥}‖ / max(1, |Sc|)`.
    pub fn projection_residual(&self, sc: f64) -> f64 {
        (&self.r - self.projector() * sc).norm() / sc.abs().max(1.0)
    }

    pub fn flag_curvature(&self, w: &[f64]) -> Result<f64> {
        let n = self.y.len();
        check_dim(n, w.len())?;
        let wv = DVector::from_column_slice(w);
        let y = DVector::from_column_slice(&self.y);
        let gww = wv.dot(&(&self.g * &wv));
        let gwy = wv.dot(&(&self.g * &y));
        let gyy = self.f * self.f;
        let den = gyy * gww - gwy * gwy;
        if den <= 1e-12 * gyy * gww {
            return Err(FinslerError::DegenerateFlag(format!(
                "Gram determinant {den:e} under g_y"
            )));
        }
        // The flag depends only on the plane; the g_y-orthogonal representative
        // keeps residual errors in R(y) out of the quotient.
        let perp = &wv - &y * (gwy / gyy);
        Ok(perp.dot(&(&self.lowered * &perp)) / den)
    }
}

/// A flag `(x, y, w)`: flagpole `y` and a transverse vector `w`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Flag {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub w: Vec<f64>,
}

impl Flag {
    pub fn new(x: Vec<f64>, y: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        check_dim(x.len(), y.len())?;
        check_dim(x.len(), w.len())?;
        if y.iter().all(|&a| a == 0.0) {
            return Err(FinslerError::ZeroVector);
        }
        Ok(Self { x, y, w })
    }
}

/// Derivatives of the spray needed by the curvature formula.
struct SprayJets {
    /// `dx[k][i] = ∂Gⁱ/∂xᵏ`.
    dx: Vec<Vec<f64>>,
    /// `n[k][i] = ∂Gⁱ/∂yᵏ`.
    n: Vec<Vec<f64>>,
    /// `mixed[k][i] = yʲ ∂²Gⁱ/∂xʲ∂yᵏ`.
    mixed: Vec<Vec<f64>>,
    /// `vert[k][i] = Gʲ ∂²Gⁱ/∂yʲ∂yᵏ`.
    vert: Vec<Vec<f64>>,
}

fn exact_jets(metric: &FinslerMetric, x: &[f64], y: &[f64]) -> Result<SprayJets> {
    let f = metric.lagrangian();
    let n = x.len();
    let g0 = spray_generic::<f64>(f, x, y)?;
    let mut jets = SprayJets {
        dx: Vec::with_capacity(n),
        n: Vec::with_capacity(n),
        mixed: Vec::with_capacity(n),
        vert: Vec::with_capacity(n),
    };
    for k in 0..n {
        let ek = unit::<f64>(n, k);
        let xs: Vec<T1> = seed(x, Some(&ek), None);
        let ys: Vec<T1> = seed(y, None, Some(&ek));
        let a = spray_generic::<T1>(f, &xs, &ys)?;
        jets.dx.push(a.iter().map(|v| v.d1).collect());
        jets.n.push(a.iter().map(|v| v.d2).collect());

        let xs: Vec<T1> = seed(x, Some(y), None);
        let ys: Vec<T1> = seed(y, None, Some(&ek));
        let b = spray_generic::<T1>(f, &xs, &ys)?;
        jets.mixed.push(b.iter().map(|v| v.d12).collect());

        let xs: Vec<T1> = seed(x, None, None);
        let ys: Vec<T1> = seed(y, Some(&g0), Some(&ek));
        let c = spray_generic::<T1>(f, &xs, &ys)?;
        jets.vert.push(c.iter().map(|v| v.d12).collect());
    }
    Ok(jets)
}

/// Distance to the domain boundary along the coordinate axes, capped at 1.
fn local_scale(metric: &FinslerMetric, x: &[f64]) -> f64 {
    let Some(body) = metric.body() else {
        return 1.0;
    };
    let n = x.len();
    let mut scale: f64 = 1.0;
    for k in 0..2 * n {
        let mut e = vec![0.0; n];
        e[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
        if let Ok(t) = body.ray_hit(x, &e) {
            scale = scale.min(t);
        }
    }
    scale
}

/// Steps are relative to the local scale `ℓ` of [`local_scale`]: `x` moves
/// by `step·ℓ` and `y` by `step·√ℓ·|y|`.
fn fd_jets(
    metric: &FinslerMetric,
    x: &[f64],
    y: &[f64],
    spray_step: f64,
    outer: f64,
) -> Result<SprayJets> {
    let f = metric.lagrangian();
    let n = x.len();
    let ell = local_scale(metric, x);
    let ely = ell.sqrt();
    let ynorm = y.iter().map(|a| a * a).sum::<f64>().sqrt();
    let z: Vec<f64> = x.iter().chain(y).copied().collect();
    let (sx, sy) = (spray_step * ell, spray_step * ely * ynorm);
    let g = |w: &[f64]| {
        let yn = w[n..].iter().map(|a| a * a).sum::<f64>().sqrt();
        spray_fd_steps(f, &w[..n], &w[n..], sx, sy * yn / ynorm)
    };
    let g0 = g(&z)?;
    let (hx, hy) = (outer * ell, outer * ely * ynorm);
    let block = |a: &[f64], sa: f64, b: &[f64], sb: f64| -> Vec<f64> {
        a.iter()
            .map(|v| v * sa)
            .chain(b.iter().map(|v| v * sb))
            .collect()
    };
    let zero = vec![0.0; n];
    let yhat: Vec<f64> = y.iter().map(|a| a / ynorm).collect();
    let gnorm = g0.iter().map(|a| a * a).sum::<f64>().sqrt();
    let mut jets = SprayJets {
        dx: Vec::with_capacity(n),
        n: Vec::with_capacity(n),
        mixed: Vec::with_capacity(n),
        vert: Vec::with_capacity(n),
    };
    for k in 0..n {
        let ek = unit::<f64>(n, k);
        jets.dx
            .push(fd_first(&g, &z, &block(&ek, 1.0, &zero, 0.0), hx)?);
        jets.n
            .push(fd_first(&g, &z, &block(&zero, 0.0, &ek, 1.0), hy)?);
        let m = fd_second(
            &g,
            &z,
            &block(&yhat, hx, &zero, 0.0),
            &block(&zero, 0.0, &ek, hy),
            1.0,
        )?;
        jets.mixed
            .push(m.iter().map(|v| v * ynorm / (hx * hy)).collect());
        if gnorm > 0.0 {
            let ghat: Vec<f64> = g0.iter().map(|a| a / gnorm).collect();
            let v = fd_second(
                &g,
                &z,
                &block(&zero, 0.0, &ghat, 1.0),
                &block(&zero, 0.0, &ek, 1.0),
                hy,
            )?;
            jets.vert.push(v.iter().map(|a| a * gnorm).collect());
        } else {
            jets.vert.push(vec![0.0; n]);
        }
    }
    Ok(jets)
}

fn assemble(jets: &SprayJets, vert_sign: f64) -> DMatrix<f64> {
    let n = jets.dx.len();
    DMatrix::from_fn(n, n, |i, k| {
        let nn: f64 = (0..n).map(|j| jets.n[j][i] * jets.n[k][j]).sum();
        2.0 * jets.dx[k][i] - jets.mixed[k][i] + vert_sign * jets.vert[k][i] - nn
    })
}

pub fn riemann_curvature(metric: &FinslerMetric, x: &[f64], y: &[f64]) -> Result<RiemannCurvature> {
    riemann_curvature_with(metric, x, y, CurvatureOptions::for_metric(metric))
}

/// `Rⁱ_k = 2∂Gⁱ/∂xᵏ − yʲ ∂²Gⁱ/∂xʲ∂yᵏ + 2Gʲ ∂²Gⁱ/∂yʲ∂yᵏ − ∂Gⁱ/∂yʲ ∂Gʲ/∂yᵏ`.
pub fn riemann_curvature_with(
    metric: &FinslerMetric,
    x: &[f64],
    y: &[f64],
    opts: CurvatureOptions,
) -> Result<RiemannCurvature> {
    let n = metric.dim();
    check_dim(n, x.len())?;
    check_dim(n, y.len())?;
    if !metric.is_strict() {
        return Err(FinslerError::WeakMetric);
    }
    if y.iter().all(|&a| a == 0.0) {
        return Err(FinslerError::ZeroVector);
    }
    if !metric.in_domain(x) {
        return Err(FinslerError::PointOutsideBody);
    }
    let vert_sign = if opts.inject_sign_bug { -2.0 } else { 2.0 };
    let r = match opts.method {
        CurvatureMethod::Exact => assemble(&exact_jets(metric, x, y)?, vert_sign),
        CurvatureMethod::FiniteDifference {
            spray_step,
            outer_step,
            levels,
        } => {
            let ladder = (0..levels.max(1))
                .map(|k| {
                    let c = std::f64::consts::SQRT_2.powi(k as i32);
                    Ok(assemble(
                        &fd_jets(metric, x, y, c * spray_step, c * outer_step)?,
                        vert_sign,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            let best = (0..ladder.len().saturating_sub(1))
                .min_by(|&a, &b| {
                    let da = (&ladder[a + 1] - &ladder[a]).norm();
                    let db = (&ladder[b + 1] - &ladder[b]).norm();
                    da.total_cmp(&db)
                })
                .unwrap_or(0);
            ladder[best].clone()
        }
    };
    let gt = fundamental_tensor_generic::<f64>(metric.lagrangian(), x, y)?;
    let g = DMatrix::from_fn(n, n, |i, j| gt[i][j]);
    let lowered = &g * &r;
    let f = metric.eval(x, y)?;
    Ok(RiemannCurvature {
        x: x.to_vec(),
        y: y.to_vec(),
        r,
        lowered,
        g,
        f,
    })
}

pub fn flag_curvature(metric: &FinslerMetric, flag: &Flag) -> Result<f64> {
    flag_curvature_with(metric, flag, CurvatureOptions::for_metric(metric))
}

/// `K = R_mk wᵏ wᵐ / (F² g(w, w) − g(w, y)²)`.
pub fn flag_curvature_with(
    metric: &FinslerMetric,
    flag: &Flag,
    opts: CurvatureOptions,
) -> Result<f64> {
    riemann_curvature_with(metric, &flag.x, &flag.y, opts)?.flag_curvature(&flag.w)
}

/// Flag curvature over many flags, in parallel, in input order.
pub fn flag_curvature_field(
    metric: &FinslerMetric,
    flags: &[Flag],
    opts: CurvatureOptions,
) -> Vec<Result<f64>> {
    flags
        .par_iter()
        .map(|fl| flag_curvature_with(metric, fl, opts))
        .collect()
}

/// Trace of `Rⁱ_k`.
pub fn ricci(metric: &FinslerMetric, x: &[f64], y: &[f64]) -> Result<f64> {
    Ok(riemann_curvature(metric, x, y)?.ricci())
}

/// `Sc = P² − yʲ ∂P/∂xʲ`; the flag curvature of a projectively flat metric
/// is `Sc/F²`.
pub fn scalar_sc(metric: &FinslerMetric, x: &[f64], y: &[f64]) -> Result<f64> {
    let n = metric.dim();
    check_dim(n, x.len())?;
    check_dim(n, y.len())?;
    let f = metric.lagrangian();
    if f.has_exact_jets() {
        let xs: Vec<T1> = seed(x, Some(y), None);
        let ys: Vec<T1> = seed(y, None, None);
        let p = projective_factor_generic::<T1>(f, &xs, &ys)?;
        return Ok(p.v * p.v - p.d1);
    }
    let z: Vec<f64> = x.iter().chain(y).copied().collect();
    let pf = |w: &[f64]| -> Result<Vec<f64>> {
        let h = 1e-3;
        let (xa, ya) = (&w[..n], &w[n..]);
        let fa = f.eval_f64(xa, ya)?;
        if fa <= 0.0 {
            return Err(FinslerError::ZeroLagrangian);
        }
        let d = fd_first(&|v: &[f64]| Ok(vec![f.eval_f64(v, ya)?]), xa, ya, h)?[0];
        Ok(vec![d / (2.0 * fa)])
    };
    let p = pf(&z)?[0];
    let dir: Vec<f64> = y
        .iter()
        .copied()
        .chain(std::iter::repeat(0.0).take(n))
        .collect();
    let dp = fd_first(&pf, &z, &dir, 1e-2)?[0];
    Ok(p * p - dp)
}

/// Largest minus smallest flag curvature over the transverse vectors `ws`.
pub fn scalar_curvature_spread(
    metric: &FinslerMetric,
    x: &[f64],
    y: &[f64],
    ws: &[Vec<f64>],
) -> Result<f64> {
    let r = riemann_curvature(metric, x, y)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for w in ws {
        let k = r.flag_curvature(w)?;
        lo = lo.min(k);
        hi = hi.max(k);
    }
    Ok(if ws.is_empty() { 0.0 } else { hi - lo })
}
