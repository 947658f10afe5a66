use nalgebra::DMatrix;
use serde::Serialize;

use super::{FinslerMetric, Lagrangian, Scalar};
use crate::ad::{directional, fd_second, unit, DerivativeMethod, Perturbation, TaylorScalar};
use crate::error::{check_dim, FinslerError, Result};
use crate::sampling::Sampler;

/// `g_ij(x, y) = ½ ∂²F²/∂yⁱ∂yʲ` together with its smallest eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FundamentalTensor {
    pub g: DMatrix<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub min_eigenvalue: f64,
}

impl FundamentalTensor {
    pub fn is_positive_definite(&self) -> bool {
        self.min_eigenvalue > 0.0
    }

    /// `g(u, v)`.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = u.len();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.g[(i, j)] * u[i] * v[j];
            }
        }
        acc
    }
}

/// Fundamental tensor over any scalar that admits one more jet level.
pub fn fundamental_tensor_generic<S>(f: &dyn Lagrangian, x: &[S], y: &[S]) -> Result<Vec<Vec<S>>>
where
    S: Scalar,
    TaylorScalar<S>: Scalar,
{
    let n = f.dim();
    let mut g = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        let ei = unit::<S>(n, i);
        for j in i..n {
            let ej = unit::<S>(n, j);
            let r = directional(f, x, y, Perturbation::y(&ei), Perturbation::y(&ej))?;
            let v = (r * r).d12 * 0.5;
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    Ok(g)
}

pub fn fundamental_tensor(
    metric: &FinslerMetric,
    x: &[f64],
    y: &[f64],
) -> Result<FundamentalTensor> {
    fundamental_tensor_with(metric, x, y, metric.default_method())
}

/// Rejects weak metrics and zero directions. A tensor that fails to be
/// positive definite is returned with `min_eigenvalue ≤ 0` rather than as
/// an error.
pub fn fundamental_tensor_with(
    metric: &FinslerMetric,
    x: &[f64],
    y: &[f64],
    method: DerivativeMethod,
) -> Result<FundamentalTensor> {
    let n = metric.dim();
    check_dim(n, x.len())?;
    check_dim(n, y.len())?;
    if !metric.is_strict() {
        return Err(FinslerError::WeakMetric);
    }
    if y.iter().all(|&a| a == 0.0) {
        return Err(FinslerError::ZeroVector);
    }
    if metric.eval(x, y)? <= 0.0 {
        return Err(FinslerError::DegenerateDirection(y.to_vec()));
    }
    let g = match method {
        DerivativeMethod::ExactTaylor => {
            let rows = fundamental_tensor_generic::<f64>(metric.lagrangian(), x, y)?;
            DMatrix::from_fn(n, n, |i, j| rows[i][j])
        }
        DerivativeMethod::CentralFd { step } => {
            let scale = y.iter().map(|a| a * a).sum::<f64>().sqrt().max(1.0);
            let h = step.unwrap_or(f64::EPSILON.powf(1.0 / 6.0)) * scale;
            let f2 = |v: &[f64]| -> Result<Vec<f64>> { Ok(vec![metric.eval(x, v)?.powi(2)]) };
            let mut g = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    let v = 0.5 * fd_second(&f2, y, &unit(n, i), &unit(n, j), h)?[0];
                    g[(i, j)] = v;
                    g[(j, i)] = v;
                }
            }
            g
        }
    };
    let min_eigenvalue = g.clone().symmetric_eigen().eigenvalues.min();
    Ok(FundamentalTensor {
        g,
        x: x.to_vec(),
        y: y.to_vec(),
        min_eigenvalue,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StrongConvexityReport {
    pub samples: usize,
    pub failures: usize,
    pub min_eigenvalue: f64,
    pub worst_x: Vec<f64>,
    pub worst_y: Vec<f64>,
}

impl StrongConvexityReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Sampled check that `g` is positive definite. `points` draws base points;
/// directions are uniform on the sphere. Eigenvalues are reported for
/// `g(x, y/|y|)`, which is the same matrix by 0-homogeneity.
pub fn strong_convexity_check<P>(
    metric: &FinslerMetric,
    mut points: P,
    samples: usize,
    sampler: &mut Sampler,
) -> Result<StrongConvexityReport>
where
    P: FnMut(&mut Sampler) -> Vec<f64>,
{
    let n = metric.dim();
    let mut report = StrongConvexityReport {
        samples,
        failures: 0,
        min_eigenvalue: f64::INFINITY,
        worst_x: vec![],
        worst_y: vec![],
    };
    for _ in 0..samples {
        let x = points(sampler);
        let y = sampler.unit_vector(n);
        let ok = match fundamental_tensor(metric, &x, &y) {
            Ok(t) => {
                if t.min_eigenvalue < report.min_eigenvalue {
                    report.min_eigenvalue = t.min_eigenvalue;
                    report.worst_x = x.clone();
                    report.worst_y = y.clone();
                }
                t.is_positive_definite()
            }
            Err(FinslerError::NonSmoothPoint(_)) => true,
            Err(e) => return Err(e),
        };
        if !ok {
            report.failures += 1;
        }
    }
    Ok(report)
}

/// `count` points of the indicatrix `{ξ : F(x, ξ) = 1}` along equidistributed
/// directions (uniform angles for n = 2, a Fibonacci lattice for n = 3,
/// seeded uniform directions otherwise).
pub fn indicatrix_sample(metric: &FinslerMetric, x: &[f64], count: usize) -> Result<Vec<Vec<f64>>> {
    let n = metric.dim();
    check_dim(n, x.len())?;
    let dirs: Vec<Vec<f64>> = match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * k as f64;
                    vec![r * a.cos(), r * a.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut s = Sampler::new(count as u64);
            (0..count).map(|_| s.unit_vector(n)).collect()
        }
    };
    dirs.into_iter()
        .map(|u| {
            let f = metric.eval(x, &u)?;
            if f <= 0.0 {
                return Err(FinslerError::DegenerateDirection(u));
            }
            Ok(u.iter().map(|a| a / f).collect())
        })
        .collect()
}
