//! Schwarzian derivative, Möbius-type solutions of `{φ, s} = ρ`, and the
//! reparametrization route to flag curvature.

use serde::Serialize;

use crate::ad::{fd_first, seed, Real, TaylorScalar, T1, T2};
use crate::error::{check_dim, FinslerError, Result};
use crate::funk_hilbert::{funk_geodesic, hilbert_geodesic, FunkGeodesic, HilbertGeodesic};
use crate::geodesic::{spray_fd, spray_generic};
use crate::metric::{FinslerMetric, MetricKind};
use crate::projective::{hamel_residual, NOT_FLAT_THRESHOLD};

/// A scalar function of one variable, generic over jets.
pub trait Reparametrization {
    fn eval<S: Real>(&self, s: S) -> S;
}

impl Reparametrization for FunkGeodesic {
    fn eval<S: Real>(&self, s: S) -> S {
        self.phi(s)
    }
}

impl Reparametrization for HilbertGeodesic {
    fn eval<S: Real>(&self, s: S) -> S {
        self.phi(s)
    }
}

/// `e^{λs}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    pub lambda: f64,
}

impl Reparametrization for Exponential {
    fn eval<S: Real>(&self, s: S) -> S {
        (s * self.lambda).exp()
    }
}

/// `1/s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reciprocal;

impl Reparametrization for Reciprocal {
    fn eval<S: Real>(&self, s: S) -> S {
        s.recip()
    }
}

/// `tan(λs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangent {
    pub lambda: f64,
}

impl Reparametrization for Tangent {
    fn eval<S: Real>(&self, s: S) -> S {
        (s * self.lambda).tan()
    }
}

/// `a·s + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linear {
    pub a: f64,
    pub b: f64,
}

impl Reparametrization for Linear {
    fn eval<S: Real>(&self, s: S) -> S {
        s * self.a + self.b
    }
}

/// `(a·φ + b)/(c·φ + d)` applied to an inner function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap<R> {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub inner: R,
}

impl<R: Reparametrization> Reparametrization for MoebiusMap<R> {
    fn eval<S: Real>(&self, s: S) -> S {
        let u = self.inner.eval(s);
        (u * self.a + self.b) / (u * self.c + self.d)
    }
}

/// Ratio `u/v` of two solutions of `ẅ + ½ρw = 0`, each given by its initial
/// values `[w(0), ẇ(0)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionRatio {
    pub rho: f64,
    pub u: [f64; 2],
    pub v: [f64; 2],
}

impl SolutionRatio {
    /// Fundamental solutions with `(w, ẇ)(0) = (1, 0)` and `(0, 1)`.
    fn basis<S: Real>(rho: f64, s: S) -> (S, S) {
        if rho > 0.0 {
            let k = (0.5 * rho).sqrt();
            ((s * k).cos(), (s * k).sin() / k)
        } else if rho < 0.0 {
            let k = (-0.5 * rho).sqrt();
            ((s * k).cosh(), (s * k).sinh() / k)
        } else {
            (S::one(), s)
        }
    }

    pub fn numerator<S: Real>(&self, s: S) -> S {
        let (c, sn) = Self::basis(self.rho, s);
        c * self.u[0] + sn * self.u[1]
    }

    pub fn denominator<S: Real>(&self, s: S) -> S {
        let (c, sn) = Self::basis(self.rho, s);
        c * self.v[0] + sn * self.v[1]
    }

    pub fn is_independent(&self) -> bool {
        (self.u[0] * self.v[1] - self.u[1] * self.v[0]).abs() > 1e-12
    }

    /// Largest `|ẅ + ½ρw|` over the two solutions at `s`.
    pub fn ode_residual(&self, s: f64) -> f64 {
        let t = T1::variable(s, 1.0, 1.0);
        let a = self.numerator(t);
        let b = self.denominator(t);
        let ra = (a.d12 + 0.5 * self.rho * a.v).abs();
        let rb = (b.d12 + 0.5 * self.rho * b.v).abs();
        ra.max(rb)
    }
}

impl Reparametrization for SolutionRatio {
    fn eval<S: Real>(&self, s: S) -> S {
        self.numerator(s) / self.denominator(s)
    }
}

/// First three derivatives at `s`, exact through nested jets.
fn derivatives3<R: Reparametrization>(phi: &R, s: f64) -> (f64, f64, f64) {
    let t = T2 {
        v: T1::variable(s, 1.0, 1.0),
        d1: T1::new(1.0, 0.0, 0.0, 0.0),
        d2: T1::new(0.0, 0.0, 0.0, 0.0),
        d12: T1::new(0.0, 0.0, 0.0, 0.0),
    };
    let r: TaylorScalar<T1> = phi.eval(t);
    (r.v.d1, r.v.d12, r.d1.d12)
}

fn schwarzian_from(d1: f64, d2: f64, d3: f64) -> Result<f64> {
    if d1 == 0.0 || !d1.is_finite() {
        return Err(FinslerError::StationaryPoint);
    }
    let r = d3 / d1 - 1.5 * (d2 / d1).powi(2);
    if r.is_finite() {
        Ok(r)
    } else {
        Err(FinslerError::Numerical(format!(
            "non-finite Schwarzian {r}"
        )))
    }
}

/// `{φ, s} = φ⃛/φ̇ − (3/2)(φ̈/φ̇)²`.
pub fn schwarzian<R: Reparametrization>(phi: &R, s: f64) -> Result<f64> {
    let (d1, d2, d3) = derivatives3(phi, s);
    schwarzian_from(d1, d2, d3)
}

/// Schwarzian of a plain function from five-point stencils with step `h`,
/// each refined by one Richardson step.
pub fn schwarzian_fd<F: Fn(f64) -> f64>(phi: F, s: f64, h: f64) -> Result<f64> {
    let stencils = |h: f64| {
        let (m2, m1, f0, p1, p2) = (
            phi(s - 2.0 * h),
            phi(s - h),
            phi(s),
            phi(s + h),
            phi(s + 2.0 * h),
        );
        (
            (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h),
            (-m2 + 16.0 * m1 - 30.0 * f0 + 16.0 * p1 - p2) / (12.0 * h * h),
            (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * h * h * h),
        )
    };
    let (a1, a2, a3) = stencils(h);
    let (b1, b2, b3) = stencils(0.5 * h);
    schwarzian_from(
        (16.0 * b1 - a1) / 15.0,
        (16.0 * b2 - a2) / 15.0,
        (4.0 * b3 - a3) / 3.0,
    )
}

/// Boundary data selecting one solution of `{φ, s} = ρ` with `φ(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BoundaryData {
    /// `φ(+∞) = plus > 0`, `φ(−∞) = minus < 0`; one side may be infinite.
    Limits { plus: f64, minus: f64 },
    /// Odd solution with `φ̇(0) = slope > 0`.
    Odd { slope: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MoebiusFamily {
    /// Möbius image of `e^{λs}`, `ρ = −½λ²`.
    Exponential { lambda: f64 },
    /// Möbius image of `s`, `ρ = 0`.
    Linear,
    /// Möbius image of `tan(ks)`, `ρ = 2k²`.
    Trigonometric { k: f64 },
}

/// `φ(s) = (a·u(s) + b)/(c·u(s) + d)` with `u` the family generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MoebiusSolution {
    pub rho: f64,
    pub family: MoebiusFamily,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Reparametrization for MoebiusSolution {
    fn eval<S: Real>(&self, s: S) -> S {
        match self.family {
            MoebiusFamily::Exponential { lambda } => {
                if s.value() * lambda >= 0.0 {
                    let e = (s * -lambda).exp();
                    (e * self.b + self.a) / (e * self.d + self.c)
                } else {
                    let e = (s * lambda).exp();
                    (e * self.a + self.b) / (e * self.c + self.d)
                }
            }
            MoebiusFamily::Linear => (s * self.a + self.b) / (s * self.c + self.d),
            MoebiusFamily::Trigonometric { k } => {
                let t = (s * k).tan();
                (t * self.a + self.b) / (t * self.c + self.d)
            }
        }
    }
}

impl MoebiusSolution {
    pub fn value(&self, s: f64) -> f64 {
        self.eval(s)
    }

    /// The `s` with `φ(s) = v`, if it exists.
    pub fn inverse(&self, v: f64) -> Option<f64> {
        let u = (self.b - self.d * v) / (self.c * v - self.a);
        let s = match self.family {
            MoebiusFamily::Exponential { lambda } => {
                if u <= 0.0 {
                    return None;
                }
                u.ln() / lambda
            }
            MoebiusFamily::Linear => u,
            MoebiusFamily::Trigonometric { k } => u.atan() / k,
        };
        s.is_finite().then_some(s)
    }
}

/// Solves `{φ, s} = ρ` with `φ(0) = 0`, `φ̇(0) > 0` and the given boundary
/// data, within the closed families above.
pub fn moebius_reconstruct(rho: f64, data: BoundaryData) -> Result<MoebiusSolution> {
    let bad = |m: &str| Err(FinslerError::InconsistentBoundaryData(m.to_string()));
    if !rho.is_finite() {
        return bad("ρ must be finite");
    }
    match data {
        BoundaryData::Odd { slope } => {
            if !(slope > 0.0 && slope.is_finite()) {
                return bad("slope must be positive and finite");
            }
            let sol = if rho < 0.0 {
                let lambda = (-2.0 * rho).sqrt();
                // 2·slope/λ · tanh(λs/2)
                let a = 2.0 * slope / lambda;
                MoebiusSolution {
                    rho,
                    family: MoebiusFamily::Exponential { lambda },
                    a,
                    b: -a,
                    c: 1.0,
                    d: 1.0,
                }
            } else if rho > 0.0 {
                let k = (0.5 * rho).sqrt();
                MoebiusSolution {
                    rho,
                    family: MoebiusFamily::Trigonometric { k },
                    a: slope / k,
                    b: 0.0,
                    c: 0.0,
                    d: 1.0,
                }
            } else {
                MoebiusSolution {
                    rho,
                    family: MoebiusFamily::Linear,
                    a: slope,
                    b: 0.0,
                    c: 0.0,
                    d: 1.0,
                }
            };
            Ok(sol)
        }
        BoundaryData::Limits { plus, minus } => {
            if rho >= 0.0 {
                return bad("solutions with ρ ≥ 0 have no distinct limits at ±∞");
            }
            if plus.is_nan() || minus.is_nan() || plus <= 0.0 || minus >= 0.0 {
                return bad("need φ(+∞) > 0 > φ(−∞)");
            }
            let c = 1.0 / plus;
            let d = -1.0 / minus;
            if c + d <= 0.0 {
                return bad("both limits infinite");
            }
            let lambda = (-2.0 * rho).sqrt();
            Ok(MoebiusSolution {
                rho,
                family: MoebiusFamily::Exponential { lambda },
                a: 1.0,
                b: -1.0,
                c,
                d,
            })
        }
    }
}

/// `K(p, ξ) = {φ, s}|₀ / (2 φ̇(0)² F(p, ξ)²)` where `p + φ(s)ξ` is the
/// geodesic through `p` with initial velocity `ξ/F(p, ξ)`.
///
/// Funk, Hilbert and Minkowski metrics use their closed-form `φ`; other
/// projectively flat metrics get the jets of `φ` at `0` from the spray.
pub fn curvature_via_schwarzian(metric: &FinslerMetric, p: &[f64], xi: &[f64]) -> Result<f64> {
    let n = metric.dim();
    check_dim(n, p.len())?;
    check_dim(n, xi.len())?;
    let residual = hamel_residual(metric, p, xi)?;
    if residual > NOT_FLAT_THRESHOLD {
        return Err(FinslerError::NotProjectivelyFlat { residual });
    }
    let f = metric.eval(p, xi)?;
    if f <= 0.0 {
        return Err(FinslerError::ZeroLagrangian);
    }
    let (d1, d2, d3) = match (metric.kind(), metric.body()) {
        (MetricKind::Funk, Some(body)) => derivatives3(&funk_geodesic(body, p, xi)?, 0.0),
        (MetricKind::Hilbert, Some(body)) => derivatives3(&hilbert_geodesic(body, p, xi)?, 0.0),
        (MetricKind::Euclidean | MetricKind::Minkowski, _) => {
            derivatives3(&Linear { a: 1.0 / f, b: 0.0 }, 0.0)
        }
        _ => {
            // φ̈ = −2φ̇²P and φ⃛ = −4φ̇φ̈P − 2φ̇³ ξ·∂ₓP along the segment,
            // with P = ⟨G, ξ⟩/|ξ|².
            let l = metric.lagrangian();
            let xi2: f64 = xi.iter().map(|a| a * a).sum();
            let (pf, q) = if l.has_exact_jets() {
                let xs: Vec<T1> = seed(p, Some(xi), None);
                let ys: Vec<T1> = seed(xi, None, None);
                let g = spray_generic::<T1>(l, &xs, &ys)?;
                let pf: f64 = g.iter().zip(xi).map(|(a, b)| a.v * b).sum::<f64>() / xi2;
                let q: f64 = g.iter().zip(xi).map(|(a, b)| a.d1 * b).sum::<f64>() / xi2;
                (pf, q)
            } else {
                let g = |w: &[f64]| spray_fd(l, w, xi, 1e-3);
                let g0 = g(p)?;
                let dg = fd_first(&g, p, xi, 1e-3)?;
                let pf: f64 = g0.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>() / xi2;
                let q: f64 = dg.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>() / xi2;
                (pf, q)
            };
            let v = 1.0 / f;
            let acc = -2.0 * v * v * pf;
            (v, acc, -4.0 * v * acc * pf - 2.0 * v * v * v * q)
        }
    };
    let s = schwarzian_from(d1, d2, d3)?;
    Ok(s / (2.0 * d1 * d1 * f * f))
}
