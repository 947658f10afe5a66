//! Metric constructors: Minkowski norms, Randers metrics, reverse, sums,
//! Zermelo transforms and a non-flat conformal control.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{FinslerMetric, Lagrangian, MetricKind, Scalar};
use crate::ad::{directional, dot, lift, norm_sq, values, Perturbation, Real};
use crate::body::ConvexBody;
use crate::error::{check_dim, FinslerError, Result};
use crate::generic_lagrangian;

fn check_xy<S>(n: usize, x: &[S], y: &[S]) -> Result<()> {
    check_dim(n, x.len())?;
    check_dim(n, y.len())
}

#[derive(Debug, Clone)]
pub struct Euclidean {
    n: usize,
}

impl Euclidean {
    fn eval_generic<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        check_xy(self.n, x, y)?;
        Ok(norm_sq(y).sqrt())
    }
}

impl Lagrangian for Euclidean {
    generic_lagrangian!();
    fn dim(&self) -> usize {
        self.n
    }
    fn name(&self) -> String {
        "euclidean".into()
    }
    fn kind(&self) -> MetricKind {
        MetricKind::Euclidean
    }
    fn is_reversible(&self) -> bool {
        true
    }
}

pub fn euclidean(n: usize) -> FinslerMetric {
    FinslerMetric::new(Euclidean { n })
}

/// Gauge of a bounded convex body containing the origin.
#[derive(Debug, Clone)]
pub struct Minkowski {
    body: ConvexBody,
    origin: Vec<f64>,
}

impl Minkowski {
    fn eval_generic<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        check_xy(self.origin.len(), x, y)?;
        self.body.inverse_hit(&lift::<S>(&self.origin), y)
    }
}

impl Lagrangian for Minkowski {
    generic_lagrangian!();
    fn dim(&self) -> usize {
        self.origin.len()
    }
    fn name(&self) -> String {
        "minkowski".into()
    }
    fn kind(&self) -> MetricKind {
        MetricKind::Minkowski
    }
}

/// `F(x, ξ) = inf{t > 0 : ξ/t ∈ Ω₀}` for the unit body `Ω₀`.
pub fn minkowski(unit_body: ConvexBody) -> Result<FinslerMetric> {
    let n = unit_body.dim();
    let origin = vec![0.0; n];
    if !unit_body.is_bounded() {
        return Err(FinslerError::UnboundedBody);
    }
    if !unit_body.contains(&origin) {
        return Err(FinslerError::OriginNotInterior);
    }
    Ok(FinslerMetric::new(Minkowski {
        body: unit_body,
        origin,
    }))
}

/// Riemannian metric field `x ↦ g_x`.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixField {
    Constant(DMatrix<f64>),
    /// `g_x(ξ,ξ) = ((1 − |x|²)|ξ|² + ⟨x,ξ⟩²)/(1 − |x|²)²` on the unit ball.
    KleinBall,
}

impl MatrixField {
    fn is_ball(&self) -> bool {
        matches!(self, MatrixField::KleinBall)
    }

    pub fn quad<S: Real>(&self, x: &[S], xi: &[S]) -> S {
        match self {
            MatrixField::Constant(g) => {
                let n = xi.len();
                let mut acc = S::zero();
                for i in 0..n {
                    for j in 0..n {
                        acc += xi[i] * xi[j] * g[(i, j)];
                    }
                }
                acc
            }
            MatrixField::KleinBall => {
                let c = S::one() - norm_sq(x);
                let p = dot(x, xi);
                (c * norm_sq(xi) + p * p) / (c * c)
            }
        }
    }

    pub fn matrix_at(&self, x: &[f64]) -> DMatrix<f64> {
        match self {
            MatrixField::Constant(g) => g.clone(),
            MatrixField::KleinBall => {
                let n = x.len();
                let c = 1.0 - norm_sq(x);
                DMatrix::from_fn(n, n, |i, j| {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    (c * delta + x[i] * x[j]) / (c * c)
                })
            }
        }
    }
}

/// 1-form field `x ↦ θ_x`.
#[derive(Debug, Clone, PartialEq)]
pub enum FormField {
    Zero,
    Constant(Vec<f64>),
    /// `θ_x(ξ) = ⟨x, ξ⟩/(1 − |x|²)` on the unit ball.
    FunkBall,
}

impl FormField {
    fn is_ball(&self) -> bool {
        matches!(self, FormField::FunkBall)
    }

    pub fn apply<S: Real>(&self, x: &[S], xi: &[S]) -> S {
        match self {
            FormField::Zero => S::zero(),
            FormField::Constant(b) => dot(&lift::<S>(b), xi),
            FormField::FunkBall => dot(x, xi) / (S::one() - norm_sq(x)),
        }
    }

    pub fn covector_at(&self, x: &[f64]) -> Vec<f64> {
        match self {
            FormField::Zero => vec![0.0; x.len()],
            FormField::Constant(b) => b.clone(),
            FormField::FunkBall => {
                let c = 1.0 - norm_sq(x);
                x.iter().map(|a| a / c).collect()
            }
        }
    }
}

/// `F(x, ξ) = √(g_x(ξ, ξ)) + θ_x(ξ)`.
#[derive(Debug, Clone)]
pub struct Randers {
    n: usize,
    g: MatrixField,
    theta: FormField,
    domain: Option<ConvexBody>,
}

impl Randers {
    fn eval_generic<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        check_xy(self.n, x, y)?;
        if let Some(b) = &self.domain {
            if !b.contains(&values(x)) {
                return Err(FinslerError::OutsideUnitBall);
            }
        }
        Ok(self.g.quad(x, y).sqrt() + self.theta.apply(x, y))
    }
}

impl Lagrangian for Randers {
    generic_lagrangian!();
    fn dim(&self) -> usize {
        self.n
    }
    fn name(&self) -> String {
        "randers".into()
    }
    fn kind(&self) -> MetricKind {
        MetricKind::Randers
    }
    fn body(&self) -> Option<&ConvexBody> {
        self.domain.as_ref()
    }
    fn is_reversible(&self) -> bool {
        self.theta == FormField::Zero
    }
}

fn default_probes(n: usize, ball: bool) -> Vec<Vec<f64>> {
    let radii: &[f64] = if ball {
        &[0.5, 0.9, 0.99]
    } else {
        &[0.5, 1.0, 10.0]
    };
    let mut out = vec![vec![0.0; n]];
    for &r in radii {
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut p = vec![0.0; n];
                p[i] = s * r;
                out.push(p);
            }
        }
    }
    out
}

/// Randers metric with the form-size condition checked at default probes.
pub fn randers(n: usize, g: MatrixField, theta: FormField) -> Result<FinslerMetric> {
    let probes = default_probes(n, g.is_ball() || theta.is_ball());
    randers_with_probes(n, g, theta, &probes)
}

pub fn randers_with_probes(
    n: usize,
    g: MatrixField,
    theta: FormField,
    probes: &[Vec<f64>],
) -> Result<FinslerMetric> {
    if let MatrixField::Constant(m) = &g {
        check_dim(n, m.nrows())?;
        check_dim(n, m.ncols())?;
    }
    if let FormField::Constant(b) = &theta {
        check_dim(n, b.len())?;
    }
    for p in probes {
        check_dim(n, p.len())?;
        let gm = g.matrix_at(p);
        let chol = gm
            .clone()
            .cholesky()
            .ok_or_else(|| FinslerError::InvalidMetric("g is not positive definite".into()))?;
        let b = DVector::from_column_slice(&theta.covector_at(p));
        let norm = b.dot(&chol.solve(&b)).sqrt();
        if norm >= 1.0 {
            return Err(FinslerError::FormTooLarge {
                norm,
                probe: p.clone(),
            });
        }
    }
    let domain = if g.is_ball() || theta.is_ball() {
        Some(ConvexBody::unit_ball(n))
    } else {
        None
    };
    Ok(FinslerMetric::new(Randers {
        n,
        g,
        theta,
        domain,
    }))
}

/// `F*(x, ξ) = F(x, −ξ)`.
#[derive(Debug, Clone)]
pub struct Reverse {
    inner: FinslerMetric,
}

impl Reverse {
    fn eval_generic<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        let neg: Vec<S> = y.iter().map(|a| -*a).collect();
        S::lagrangian(self.inner.lagrangian(), x, &neg)
    }
}

impl Lagrangian for Reverse {
    generic_lagrangian!();
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn name(&self) -> String {
        format!("reverse({})", self.inner.name())
    }
    fn kind(&self) -> MetricKind {
        MetricKind::Reverse
    }
    fn body(&self) -> Option<&ConvexBody> {
        self.inner.body()
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        self.inner.in_domain(x)
    }
    fn is_reversible(&self) -> bool {
        self.inner.is_reversible()
    }
    fn is_strict(&self) -> bool {
        self.inner.is_strict()
    }
    fn has_exact_jets(&self) -> bool {
        self.inner.has_exact_jets()
    }
}

pub fn reverse(inner: FinslerMetric) -> FinslerMetric {
    FinslerMetric::new(Reverse { inner })
}

/// Pointwise sum `F₁ + F₂`.
#[derive(Debug, Clone)]
pub struct Sum {
    a: FinslerMetric,
    b: FinslerMetric,
}

impl Sum {
    fn eval_generic<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        Ok(S::lagrangian(self.a.lagrangian(), x, y)? + S::lagrangian(self.b.lagrangian(), x, y)?)
    }
}

impl Lagrangian for Sum {
    generic_lagrangian!();
    fn dim(&self) -> usize {
        self.a.dim()
    }
    fn name(&self) -> String {
        format!("{}+{}", self.a.name(), self.b.name())
    }
    fn kind(&self) -> MetricKind {
        MetricKind::Sum
    }
    fn body(&self) -> Option<&ConvexBody> {
        self.a.body().or_else(|| self.b.body())
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        self.a.in_domain(x) && self.b.in_domain(x)
    }
    fn is_reversible(&self) -> bool {
        self.a.is_reversible() && self.b.is_reversible()
    }
    fn is_strict(&self) -> bool {
        self.a.is_strict() || self.b.is_strict()
    }
    fn has_exact_jets(&self) -> bool {
        self.a.has_exact_jets() && self.b.has_exact_jets()
    }
}

pub fn sum(a: FinslerMetric, b: FinslerMetric) -> Result<FinslerMetric> {
    check_dim(a.dim(), b.dim())?;
    Ok(FinslerMetric::new(Sum { a, b }))
}

/// Wind field `Z(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum WindField {
    Constant(Vec<f64>),
    /// `Z(x) = x`.
    Position,
    /// `Z(x) = M x + b`.
    Linear(DMatrix<f64>, Vec<f64>),
}

impl WindField {
    pub fn at<S: Real>(&self, x: &[S]) -> Vec<S> {
        match self {
            WindField::Constant(z) => lift(z),
            WindField::Position => x.to_vec(),
            WindField::Linear(m, b) => (0..b.len())
                .map(|i| {
                    let mut acc = S::cst(b[i]);
                    for (j, xj) in x.iter().enumerate() {
                        acc += *xj * m[(i, j)];
                    }
                    acc
                })
                .collect(),
        }
    }
}

/// Zermelo transform: `F_Z(x, ξ) = u` with `F(x, ξ/u + Z(x)) = 1`.
#[derive(Debug, Clone)]
pub struct Zermelo {
    base: FinslerMetric,
    wind: WindField,
}

impl Zermelo {
    fn eval_generic<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        check_xy(self.base.dim(), x, y)?;
        let z = self.wind.at(x);
        let xf = values(x);
        let zf = values(&z);
        let base = self.base.lagrangian();
        let speed = base.eval_f64(&xf, &zf)?;
        if speed >= 1.0 {
            return Err(FinslerError::WindTooStrong { speed });
        }
        if self.base.kind() == MetricKind::Euclidean {
            let b = dot(y, &z);
            let c = S::one() - norm_sq(&z);
            return Ok((b + (b * b + c * norm_sq(y)).sqrt()) / c);
        }
        let yf = values(y);
        let u0 = self.solve_f64(&xf, &yf, &zf)?;
        if !S::JET || u0 == 0.0 {
            return Ok(S::cst(u0));
        }
        // Chord iterations with the exact real slope; each one gains a jet order.
        let w: Vec<f64> = yf.iter().zip(&zf).map(|(a, b)| a + u0 * b).collect();
        let slope = if base.has_exact_jets() {
            1.0 - directional(base, &xf, &w, Perturbation::y(&zf), Perturbation::none())?.d1
        } else {
            let h = 1e-6 * (1.0 + u0);
            let hp = self.residual(&xf, &yf, &zf, u0 + h)?;
            let hm = self.residual(&xf, &yf, &zf, u0 - h)?;
            (hp - hm) / (2.0 * h)
        };
        let mut u = S::cst(u0);
        for _ in 0..5 {
            let arg: Vec<S> = y.iter().zip(&z).map(|(a, b)| *a + u * *b).collect();
            let r = u - S::lagrangian(base, x, &arg)?;
            u = u - r / slope;
        }
        Ok(u)
    }

    /// `u − F(x, ξ + uZ)`, increasing in `u`.
    fn residual(&self, x: &[f64], y: &[f64], z: &[f64], u: f64) -> Result<f64> {
        let arg: Vec<f64> = y.iter().zip(z).map(|(a, b)| a + u * b).collect();
        Ok(u - self.base.eval(x, &arg)?)
    }

    fn solve_f64(&self, x: &[f64], y: &[f64], z: &[f64]) -> Result<f64> {
        let fy = self.base.eval(x, y)?;
        if fy == 0.0 && y.iter().all(|&a| a == 0.0) {
            return Ok(0.0);
        }
        let fz = self.base.eval(x, z)?;
        let negz: Vec<f64> = z.iter().map(|a| -a).collect();
        let fnz = self.base.eval(x, &negz)?;
        let (mut a, mut b) = (
            fy / (1.0 + fnz) * (1.0 - 1e-12),
            fy / (1.0 - fz) * (1.0 + 1e-12) + 1e-300,
        );
        let (mut fa, mut fb) = (self.residual(x, y, z, a)?, self.residual(x, y, z, b)?);
        if fa > 0.0 || fb < 0.0 {
            return Err(FinslerError::Numerical("Zermelo bracket failed".into()));
        }
        // Illinois regula falsi.
        let mut side = 0;
        for _ in 0..200 {
            let c = (a * fb - b * fa) / (fb - fa);
            let fc = self.residual(x, y, z, c)?;
            if fc == 0.0 || (b - a).abs() <= 1e-15 * c.abs() {
                return Ok(c);
            }
            if fc < 0.0 {
                a = c;
                fa = fc;
                if side == -1 {
                    fb *= 0.5;
                }
                side = -1;
            } else {
                b = c;
                fb = fc;
                if side == 1 {
                    fa *= 0.5;
                }
                side = 1;
            }
        }
        Ok(0.5 * (a + b))
    }
}

impl Lagrangian for Zermelo {
    generic_lagrangian!();
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn name(&self) -> String {
        format!("zermelo({})", self.base.name())
    }
    fn kind(&self) -> MetricKind {
        MetricKind::Zermelo
    }
    fn body(&self) -> Option<&ConvexBody> {
        self.base.body()
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        self.base.in_domain(x)
            && self
                .base
                .eval(x, &self.wind.at(x))
                .map_or(false, |s| s < 1.0)
    }
    fn has_exact_jets(&self) -> bool {
        self.base.has_exact_jets()
    }
}

pub fn zermelo(base: FinslerMetric, wind: WindField) -> Result<FinslerMetric> {
    let n = base.dim();
    match &wind {
        WindField::Constant(z) => check_dim(n, z.len())?,
        WindField::Position => {}
        WindField::Linear(m, b) => {
            check_dim(n, m.nrows())?;
            check_dim(n, m.ncols())?;
            check_dim(n, b.len())?;
        }
    }
    if let WindField::Constant(z) = &wind {
        let speed = base.eval(&vec![0.0; n], z)?;
        if speed >= 1.0 {
            return Err(FinslerError::WindTooStrong { speed });
        }
    }
    Ok(FinslerMetric::new(Zermelo { base, wind }))
}

/// `(1 + |x|²)·|y|`: Riemannian, conformally flat, not projectively flat.
#[derive(Debug, Clone)]
pub struct Conformal {
    n: usize,
}

impl Conformal {
    fn eval_generic<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        check_xy(self.n, x, y)?;
        Ok((S::one() + norm_sq(x)) * norm_sq(y).sqrt())
    }
}

impl Lagrangian for Conformal {
    generic_lagrangian!();
    fn dim(&self) -> usize {
        self.n
    }
    fn name(&self) -> String {
        "conformal-control".into()
    }
    fn kind(&self) -> MetricKind {
        MetricKind::Conformal
    }
    fn is_reversible(&self) -> bool {
        true
    }
}

pub fn conformal_control(n: usize) -> FinslerMetric {
    FinslerMetric::new(Conformal { n })
}

type RealFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;

/// Lagrangian known only through real evaluations; derivatives fall back
/// to finite differences.
#[derive(Clone)]
pub struct BlackBox {
    n: usize,
    name: String,
    f: Arc<RealFn>,
    domain: Option<ConvexBody>,
}

impl fmt::Debug for BlackBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlackBox")
            .field("n", &self.n)
            .field("name", &self.name)
            .finish()
    }
}

impl Lagrangian for BlackBox {
    fn dim(&self) -> usize {
        self.n
    }
    fn name(&self) -> String {
        self.name.clone()
    }
    fn kind(&self) -> MetricKind {
        MetricKind::BlackBox
    }
    fn body(&self) -> Option<&ConvexBody> {
        self.domain.as_ref()
    }
    fn has_exact_jets(&self) -> bool {
        false
    }
    fn eval_f64(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_xy(self.n, x, y)?;
        if !self.in_domain(x) {
            return Err(FinslerError::PointOutsideBody);
        }
        Ok((self.f)(x, y))
    }
    fn eval_t1(&self, _: &[crate::ad::T1], _: &[crate::ad::T1]) -> Result<crate::ad::T1> {
        Err(FinslerError::NotDifferentiable(self.name.clone()))
    }
    fn eval_t2(&self, _: &[crate::ad::T2], _: &[crate::ad::T2]) -> Result<crate::ad::T2> {
        Err(FinslerError::NotDifferentiable(self.name.clone()))
    }
}

pub fn black_box<F>(n: usize, name: &str, domain: Option<ConvexBody>, f: F) -> FinslerMetric
where
    F: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
{
    FinslerMetric::new(BlackBox {
        n,
        name: name.into(),
        f: Arc::new(f),
        domain,
    })
}
