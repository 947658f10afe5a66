use nalgebra::DMatrix;
use serde::Serialize;

use crate::ad::{
    directional, fd_first, fd_second, seed, unit, DerivativeMethod, Perturbation, TaylorScalar, T1,
};
use crate::error::{check_dim, FinslerError, Result};
use crate::linalg::spd_solve;
use crate::metric::{fundamental_tensor_generic, FinslerMetric, Lagrangian, Scalar};

/// Spray coefficients `Gᵏ(x, y)`; geodesics solve `ẏ + 2G = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SprayCoefficients {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub coefficients: Vec<f64>,
}

/// `Gᵏ = ¼ gᵏˡ (∂²F²/∂xᵐ∂yˡ yᵐ − ∂F²/∂xˡ)` over any scalar admitting one
/// more jet level.
pub fn spray_generic<S>(f: &dyn Lagrangian, x: &[S], y: &[S]) -> Result<Vec<S>>
where
    S: Scalar,
    TaylorScalar<S>: Scalar,
{
    let n = f.dim();
    let g = fundamental_tensor_generic(f, x, y)?;
    let mut rhs = vec![S::zero(); n];
    let mut l = 0;
    while l < n {
        let el = unit::<S>(n, l);
        let r = directional(f, x, y, Perturbation::x(y), Perturbation::y(&el))?;
        rhs[l] = (r * r).d12;
        // Two x-gradient components per evaluation.
        let em = if l + 1 < n {
            unit::<S>(n, l + 1)
        } else {
            vec![S::zero(); n]
        };
        let r = directional(f, x, y, Perturbation::x(&el), Perturbation::x(&em))?;
        let sq = r * r;
        rhs[l] = (rhs[l] - sq.d1) * 0.25;
        if l + 1 < n {
            let el1 = unit::<S>(n, l + 1);
            let r = directional(f, x, y, Perturbation::x(y), Perturbation::y(&el1))?;
            rhs[l + 1] = ((r * r).d12 - sq.d2) * 0.25;
        }
        l += 2;
    }
    spd_solve(&g, &rhs)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Spray from finite differences of `F²` with relative step `h`.
pub fn spray_fd(f: &dyn Lagrangian, x: &[f64], y: &[f64], h: f64) -> Result<Vec<f64>> {
    spray_fd_steps(f, x, y, h, h * norm(y).max(1.0))
}

/// Spray from finite differences of `F²` with step `hx` along `x` and `hy`
/// along `y`.
pub fn spray_fd_steps(
    f: &dyn Lagrangian,
    x: &[f64],
    y: &[f64],
    hx: f64,
    hy: f64,
) -> Result<Vec<f64>> {
    let n = f.dim();
    let z: Vec<f64> = x.iter().chain(y).copied().collect();
    let f2 = |w: &[f64]| -> Result<Vec<f64>> { Ok(vec![f.eval_f64(&w[..n], &w[n..])?.powi(2)]) };
    let block = |xpart: Option<&[f64]>, ypart: Option<&[f64]>| -> Vec<f64> {
        let mut u = vec![0.0; 2 * n];
        if let Some(a) = xpart {
            u[..n].copy_from_slice(a);
        }
        if let Some(b) = ypart {
            u[n..].copy_from_slice(b);
        }
        u
    };
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = 0.5
                * fd_second(
                    &f2,
                    &z,
                    &block(None, Some(&unit(n, i))),
                    &block(None, Some(&unit(n, j))),
                    hy,
                )?[0];
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    let yn = norm(y);
    let yhat: Vec<f64> = y.iter().map(|a| a / yn).collect();
    let mut rhs = vec![0.0; n];
    for l in 0..n {
        let el = unit(n, l);
        let u: Vec<f64> = yhat.iter().map(|a| a * hx).collect();
        let v: Vec<f64> = el.iter().map(|a| a * hy).collect();
        let m = yn * fd_second(&f2, &z, &block(Some(&u), None), &block(None, Some(&v)), 1.0)?[0]
            / (hx * hy);
        let d = fd_first(&f2, &z, &block(Some(&el), None), hx)?[0];
        rhs[l] = 0.25 * (m - d);
    }
    spd_solve(&g, &rhs)
}

pub fn spray(metric: &FinslerMetric, x: &[f64], y: &[f64]) -> Result<SprayCoefficients> {
    spray_with(metric, x, y, metric.default_method())
}

pub fn spray_with(
    metric: &FinslerMetric,
    x: &[f64],
    y: &[f64],
    method: DerivativeMethod,
) -> Result<SprayCoefficients> {
    let n = metric.dim();
    check_dim(n, x.len())?;
    check_dim(n, y.len())?;
    if !metric.is_strict() {
        return Err(FinslerError::WeakMetric);
    }
    if y.iter().all(|&a| a == 0.0) {
        return Err(FinslerError::ZeroVector);
    }
    let coefficients = match method {
        DerivativeMethod::ExactTaylor => spray_generic::<f64>(metric.lagrangian(), x, y)?,
        DerivativeMethod::CentralFd { step } => {
            spray_fd(metric.lagrangian(), x, y, step.unwrap_or(1e-3))?
        }
    };
    Ok(SprayCoefficients {
        x: x.to_vec(),
        y: y.to_vec(),
        coefficients,
    })
}

/// Formal Christoffel symbols `γᵏ_ij(x, y)`, returned as `gamma[k][(i, j)]`.
pub fn christoffel(metric: &FinslerMetric, x: &[f64], y: &[f64]) -> Result<Vec<DMatrix<f64>>> {
    let n = metric.dim();
    check_dim(n, x.len())?;
    check_dim(n, y.len())?;
    let f = metric.lagrangian();
    let g = fundamental_tensor_generic::<f64>(f, x, y)?;
    // dg[j][i][mu] = ∂g_{i mu}/∂x^j
    let mut dg = Vec::with_capacity(n);
    for j in 0..n {
        let ej = unit::<f64>(n, j);
        let xs: Vec<T1> = seed(x, Some(&ej), None);
        let ys: Vec<T1> = seed(y, None, None);
        let gj = fundamental_tensor_generic::<T1>(f, &xs, &ys)?;
        dg.push(
            gj.iter()
                .map(|row| row.iter().map(|v| v.d1).collect::<Vec<f64>>())
                .collect::<Vec<_>>(),
        );
    }
    let mut gamma = vec![DMatrix::zeros(n, n); n];
    for i in 0..n {
        for j in i..n {
            let lower: Vec<f64> = (0..n)
                .map(|mu| 0.5 * (dg[j][i][mu] + dg[i][j][mu] - dg[mu][i][j]))
                .collect();
            let up = spd_solve(&g, &lower)?;
            for k in 0..n {
                gamma[k][(i, j)] = up[k];
                gamma[k][(j, i)] = up[k];
            }
        }
    }
    Ok(gamma)
}

/// `Gᵏ = ½ γᵏ_ij yⁱ yʲ`.
pub fn spray_via_christoffel(metric: &FinslerMetric, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let gamma = christoffel(metric, x, y)?;
    let v = nalgebra::DVector::from_column_slice(y);
    Ok(gamma.iter().map(|gk| 0.5 * v.dot(&(gk * &v))).collect())
}

/// `‖ẍ + 2G(x, ẋ)‖` for a curve with position, velocity and acceleration.
pub fn geodesic_equation_residual(
    metric: &FinslerMetric,
    x: &[f64],
    v: &[f64],
    a: &[f64],
) -> Result<f64> {
    let g = spray(metric, x, v)?.coefficients;
    Ok(a.iter()
        .zip(&g)
        .map(|(ai, gi)| (ai + 2.0 * gi).powi(2))
        .sum::<f64>()
        .sqrt())
}
