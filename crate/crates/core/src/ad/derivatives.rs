use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Real, TaylorScalar, T1, T2};
use crate::error::{check_dim, FinslerError, Result};
use crate::metric::{Lagrangian, Scalar};

/// Which half of the slit tangent bundle coordinate a derivative acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Block {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeMethod {
    ExactTaylor,
    /// Five-point central stencils with one Richardson step. `step` is a
    /// relative step scaled by `max(1, ‖y‖)`; `None` picks a per-order
    /// default (`ε^(1/3)` for first, `ε^(1/6)` for second derivatives).
    CentralFd {
        step: Option<f64>,
    },
}

impl Default for DerivativeMethod {
    fn default() -> Self {
        DerivativeMethod::ExactTaylor
    }
}

impl DerivativeMethod {
    pub fn central_fd() -> Self {
        DerivativeMethod::CentralFd { step: None }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, DerivativeMethod::ExactTaylor)
    }

    fn step(&self, order: usize, scale: f64) -> f64 {
        let rel = match self {
            DerivativeMethod::CentralFd { step: Some(h) } => *h,
            _ if order <= 1 => f64::EPSILON.cbrt(),
            _ => f64::EPSILON.powf(1.0 / 6.0),
        };
        rel * scale.max(1.0)
    }
}

/// A partial derivative `∂^k f / ∂z_1 … ∂z_k` where each factor is a
/// `(block, index, order)` triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeRequest {
    pub orders: Vec<(Block, usize, u32)>,
    pub method: DerivativeMethod,
}

impl DerivativeRequest {
    pub fn exact(orders: Vec<(Block, usize, u32)>) -> Self {
        Self {
            orders,
            method: DerivativeMethod::ExactTaylor,
        }
    }

    pub fn total_order(&self) -> u32 {
        self.orders.iter().map(|o| o.2).sum()
    }
}

/// Tangent of a base point `(x, y)`.
#[derive(Debug, Clone, Copy)]
pub struct Perturbation<'a, S> {
    pub dx: Option<&'a [S]>,
    pub dy: Option<&'a [S]>,
}

impl<'a, S> Perturbation<'a, S> {
    pub fn none() -> Self {
        Self { dx: None, dy: None }
    }
    pub fn x(dx: &'a [S]) -> Self {
        Self {
            dx: Some(dx),
            dy: None,
        }
    }
    pub fn y(dy: &'a [S]) -> Self {
        Self {
            dx: None,
            dy: Some(dy),
        }
    }
    pub fn xy(dx: &'a [S], dy: &'a [S]) -> Self {
        Self {
            dx: Some(dx),
            dy: Some(dy),
        }
    }
}

/// Lifts `base` to jets with tangents `d1` and `d2`.
pub fn seed<S: Real>(base: &[S], d1: Option<&[S]>, d2: Option<&[S]>) -> Vec<TaylorScalar<S>> {
    base.iter()
        .enumerate()
        .map(|(i, &b)| {
            TaylorScalar::variable(
                b,
                d1.map_or(S::zero(), |d| d[i]),
                d2.map_or(S::zero(), |d| d[i]),
            )
        })
        .collect()
}

/// Evaluates `f` on the jet `(x, y) + p1·e1 + p2·e2`.
///
/// The result has `d1 = Df[p1]`, `d2 = Df[p2]` and `d12 = D²f[p1, p2]`.
pub fn directional<S>(
    f: &dyn Lagrangian,
    x: &[S],
    y: &[S],
    p1: Perturbation<'_, S>,
    p2: Perturbation<'_, S>,
) -> Result<TaylorScalar<S>>
where
    S: Scalar,
    TaylorScalar<S>: Scalar,
{
    let xs = seed(x, p1.dx, p2.dx);
    let ys = seed(y, p1.dy, p2.dy);
    TaylorScalar::<S>::lagrangian(f, &xs, &ys)
}

pub fn unit<S: Real>(n: usize, k: usize) -> Vec<S> {
    let mut e = vec![S::zero(); n];
    e[k] = S::one();
    e
}

fn checked(f: &dyn Lagrangian, x: &[f64], y: &[f64]) -> Result<usize> {
    let n = f.dim();
    check_dim(n, x.len())?;
    check_dim(n, y.len())?;
    Ok(n)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// `∂f/∂y` at `(x, y)`.
pub fn grad_y(f: &dyn Lagrangian, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    grad_y_with(f, x, y, DerivativeMethod::ExactTaylor)
}

pub fn grad_y_with(
    f: &dyn Lagrangian,
    x: &[f64],
    y: &[f64],
    method: DerivativeMethod,
) -> Result<Vec<f64>> {
    let n = checked(f, x, y)?;
    let mut out = vec![0.0; n];
    match method {
        DerivativeMethod::ExactTaylor => {
            let mut k = 0;
            while k < n {
                let e1 = unit::<f64>(n, k);
                let e2 = if k + 1 < n {
                    unit::<f64>(n, k + 1)
                } else {
                    vec![0.0; n]
                };
                let r = directional(f, x, y, Perturbation::y(&e1), Perturbation::y(&e2))?;
                out[k] = r.d1;
                if k + 1 < n {
                    out[k + 1] = r.d2;
                }
                k += 2;
            }
        }
        DerivativeMethod::CentralFd { .. } => {
            let h = method.step(1, norm(y));
            let g = joined(f, n);
            let z = join(x, y);
            for (k, o) in out.iter_mut().enumerate() {
                let mut u = vec![0.0; 2 * n];
                u[n + k] = 1.0;
                *o = fd_first(&g, &z, &u, h)?[0];
            }
        }
    }
    Ok(out)
}

/// `∂²f/∂y^i∂y^j` at `(x, y)`.
pub fn hess_y(f: &dyn Lagrangian, x: &[f64], y: &[f64]) -> Result<DMatrix<f64>> {
    hess_y_with(f, x, y, DerivativeMethod::ExactTaylor)
}

pub fn hess_y_with(
    f: &dyn Lagrangian,
    x: &[f64],
    y: &[f64],
    method: DerivativeMethod,
) -> Result<DMatrix<f64>> {
    let n = checked(f, x, y)?;
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = second(f, x, y, (Block::Y, i), (Block::Y, j), method)?;
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    Ok(h)
}

/// `∂²f/∂x^i∂y^j` at `(x, y)`.
pub fn mixed_xy(f: &dyn Lagrangian, x: &[f64], y: &[f64], i: usize, j: usize) -> Result<f64> {
    mixed_xy_with(f, x, y, i, j, DerivativeMethod::ExactTaylor)
}

pub fn mixed_xy_with(
    f: &dyn Lagrangian,
    x: &[f64],
    y: &[f64],
    i: usize,
    j: usize,
    method: DerivativeMethod,
) -> Result<f64> {
    let n = checked(f, x, y)?;
    if i >= n || j >= n {
        return Err(FinslerError::InvalidRequest(format!(
            "index out of range for n = {n}"
        )));
    }
    second(f, x, y, (Block::X, i), (Block::Y, j), method)
}

fn second(
    f: &dyn Lagrangian,
    x: &[f64],
    y: &[f64],
    a: (Block, usize),
    b: (Block, usize),
    method: DerivativeMethod,
) -> Result<f64> {
    let n = f.dim();
    match method {
        DerivativeMethod::ExactTaylor => {
            let ea = unit::<f64>(n, a.1);
            let eb = unit::<f64>(n, b.1);
            let pa = match a.0 {
                Block::X => Perturbation::x(&ea),
                Block::Y => Perturbation::y(&ea),
            };
            let pb = match b.0 {
                Block::X => Perturbation::x(&eb),
                Block::Y => Perturbation::y(&eb),
            };
            Ok(directional(f, x, y, pa, pb)?.d12)
        }
        DerivativeMethod::CentralFd { .. } => {
            let h = method.step(2, norm(y));
            let g = joined(f, n);
            let z = join(x, y);
            let u = block_unit(n, a);
            let v = block_unit(n, b);
            Ok(fd_second(&g, &z, &u, &v, h)?[0])
        }
    }
}

fn block_unit(n: usize, (b, i): (Block, usize)) -> Vec<f64> {
    let mut u = vec![0.0; 2 * n];
    match b {
        Block::X => u[i] = 1.0,
        Block::Y => u[n + i] = 1.0,
    }
    u
}

fn join(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut z = x.to_vec();
    z.extend_from_slice(y);
    z
}

fn joined(f: &dyn Lagrangian, n: usize) -> impl Fn(&[f64]) -> Result<Vec<f64>> + '_ {
    move |z: &[f64]| Ok(vec![f.eval_f64(&z[..n], &z[n..])?])
}

/// General partial derivative of total order ≤ 4 (exact) or ≤ 2 (finite
/// differences).
pub fn partial(f: &dyn Lagrangian, x: &[f64], y: &[f64], req: &DerivativeRequest) -> Result<f64> {
    let n = checked(f, x, y)?;
    let mut dirs: Vec<(Block, usize)> = Vec::new();
    for &(b, i, k) in &req.orders {
        if i >= n {
            return Err(FinslerError::InvalidRequest(format!(
                "index {i} out of range"
            )));
        }
        for _ in 0..k {
            dirs.push((b, i));
        }
    }
    let total = dirs.len();
    let limit = if req.method.is_exact() { 4 } else { 2 };
    if total > limit {
        return Err(FinslerError::InvalidRequest(format!(
            "total order {total} exceeds {limit} for {:?}",
            req.method
        )));
    }
    if total == 0 {
        return f.eval_f64(x, y);
    }
    if let DerivativeMethod::CentralFd { .. } = req.method {
        let g = joined(f, n);
        let z = join(x, y);
        let u = block_unit(n, dirs[0]);
        let h = req.method.step(total, norm(y));
        return Ok(if total == 1 {
            fd_first(&g, &z, &u, h)?[0]
        } else {
            fd_second(&g, &z, &u, &block_unit(n, dirs[1]), h)?[0]
        });
    }
    // Slots: inner e1, inner e2, outer e1, outer e2.
    let mut tangents = vec![vec![0.0; 2 * n]; 4];
    for (slot, d) in dirs.iter().enumerate() {
        tangents[slot] = block_unit(n, *d);
    }
    let lift = |k: usize| -> Vec<T2> {
        (0..n)
            .map(|i| {
                let inner = T1::new(
                    if k == 0 { x[i] } else { y[i] },
                    tangents[0][k * n + i],
                    tangents[1][k * n + i],
                    0.0,
                );
                T2::new(
                    inner,
                    T1::cst(tangents[2][k * n + i]),
                    T1::cst(tangents[3][k * n + i]),
                    T1::zero(),
                )
            })
            .collect()
    };
    let r = f.eval_t2(&lift(0), &lift(1))?;
    Ok(match total {
        1 => r.v.d1,
        2 => r.v.d12,
        3 => r.d1.d12,
        _ => r.d12.d12,
    })
}

fn axpy(z: &[f64], u: &[f64], t: f64) -> Vec<f64> {
    z.iter().zip(u).map(|(a, b)| a + t * b).collect()
}

fn stencil1<F>(f: &F, z: &[f64], u: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let p2 = f(&axpy(z, u, 2.0 * h))?;
    let p1 = f(&axpy(z, u, h))?;
    let m1 = f(&axpy(z, u, -h))?;
    let m2 = f(&axpy(z, u, -2.0 * h))?;
    Ok((0..p1.len())
        .map(|i| (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * h))
        .collect())
}

fn stencil2<F>(f: &F, z: &[f64], u: &[f64], h: f64, f0: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let p2 = f(&axpy(z, u, 2.0 * h))?;
    let p1 = f(&axpy(z, u, h))?;
    let m1 = f(&axpy(z, u, -h))?;
    let m2 = f(&axpy(z, u, -2.0 * h))?;
    Ok((0..p1.len())
        .map(|i| (-p2[i] + 16.0 * p1[i] - 30.0 * f0[i] + 16.0 * m1[i] - m2[i]) / (12.0 * h * h))
        .collect())
}

/// Directional derivative `Df(z)[u]` of a vector-valued map by a five-point
/// stencil refined with one Richardson step.
pub fn fd_first<F>(f: &F, z: &[f64], u: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let coarse = stencil1(f, z, u, h)?;
    let fine = stencil1(f, z, u, 0.5 * h)?;
    Ok(fine
        .iter()
        .zip(&coarse)
        .map(|(a, b)| (16.0 * a - b) / 15.0)
        .collect())
}

/// Second directional derivative `D²f(z)[u, v]`; mixed directions go
/// through polarization.
pub fn fd_second<F>(f: &F, z: &[f64], u: &[f64], v: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let f0 = f(z)?;
    let pure = |w: &[f64]| -> Result<Vec<f64>> {
        let coarse = stencil2(f, z, w, h, &f0)?;
        let fine = stencil2(f, z, w, 0.5 * h, &f0)?;
        Ok(fine
            .iter()
            .zip(&coarse)
            .map(|(a, b)| (16.0 * a - b) / 15.0)
            .collect())
    };
    if u == v {
        return pure(u);
    }
    let sum: Vec<f64> = u.iter().zip(v).map(|(a, b)| 0.5 * (a + b)).collect();
    let diff: Vec<f64> = u.iter().zip(v).map(|(a, b)| 0.5 * (a - b)).collect();
    let a = pure(&sum)?;
    let b = pure(&diff)?;
    Ok(a.iter().zip(&b).map(|(p, q)| p - q).collect())
}
