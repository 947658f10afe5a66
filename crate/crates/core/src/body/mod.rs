//! Proper convex domains with membership and ray–boundary queries.
//!
//! Domains are open: boundary points are reported as outside. Polytopes are
//! exact but only piecewise smooth; ellipsoids and log-sum-exp smoothed
//! polytopes have smooth strongly convex boundaries and support exact jets
//! of the hitting time.

mod ellipsoid;
mod halfspace;
mod lse;
mod polytope;
mod spec;

pub use ellipsoid::Ellipsoid;
pub use halfspace::HalfSpace;
pub use lse::LsePolytope;
pub use polytope::{Polytope, TIE_TOLERANCE};
pub use spec::{BodySpec, HalfSpaceSpec};

use nalgebra::DMatrix;

use crate::ad::{values, Real};
use crate::error::{check_dim, FinslerError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexBody {
    HalfSpace(HalfSpace),
    Polytope(Polytope),
    Ellipsoid(Ellipsoid),
    Lse(LsePolytope),
}

impl ConvexBody {
    pub fn unit_ball(n: usize) -> Self {
        Self::ball(vec![0.0; n], 1.0).expect("unit ball is valid")
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        Ok(ConvexBody::Ellipsoid(Ellipsoid::ball(center, radius)?))
    }

    pub fn ellipsoid(center: Vec<f64>, shape: DMatrix<f64>) -> Result<Self> {
        Ok(ConvexBody::Ellipsoid(Ellipsoid::new(center, shape)?))
    }

    pub fn half_space(normal: Vec<f64>, offset: f64) -> Result<Self> {
        Ok(ConvexBody::HalfSpace(HalfSpace::new(normal, offset)?))
    }

    pub fn polytope(halfspaces: Vec<HalfSpace>) -> Result<Self> {
        Ok(ConvexBody::Polytope(Polytope::new(halfspaces)?))
    }

    pub fn lse_polytope(halfspaces: Vec<HalfSpace>, beta: Option<f64>) -> Result<Self> {
        Ok(ConvexBody::Lse(LsePolytope::new(halfspaces, beta)?))
    }

    /// Facets of the regular `k`-gon with the given inradius, centered at 0.
    pub fn regular_polygon_facets(k: usize, inradius: f64) -> Vec<HalfSpace> {
        (0..k)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * (i as f64 + 0.25) / k as f64;
                HalfSpace {
                    normal: vec![a.cos(), a.sin()],
                    offset: inradius,
                }
            })
            .collect()
    }

    /// Facets of the cube `[-r, r]ⁿ`.
    pub fn cube_facets(n: usize, r: f64) -> Vec<HalfSpace> {
        let mut out = Vec::with_capacity(2 * n);
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut nu = vec![0.0; n];
                nu[i] = s;
                out.push(HalfSpace {
                    normal: nu,
                    offset: r,
                });
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::HalfSpace(h) => h.dim(),
            ConvexBody::Polytope(p) => p.dim(),
            ConvexBody::Ellipsoid(e) => e.dim(),
            ConvexBody::Lse(l) => l.dim(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            ConvexBody::HalfSpace(_) => false,
            ConvexBody::Polytope(p) => p.is_bounded(),
            ConvexBody::Ellipsoid(_) => true,
            ConvexBody::Lse(l) => l.is_bounded(),
        }
    }

    /// Whether jets of the hitting time are smooth away from measure-zero sets.
    pub fn is_smooth(&self) -> bool {
        matches!(self, ConvexBody::Ellipsoid(_) | ConvexBody::Lse(_))
    }

    /// A fixed interior point.
    pub fn witness(&self) -> Vec<f64> {
        match self {
            ConvexBody::HalfSpace(h) => {
                let len2: f64 = h.normal.iter().map(|a| a * a).sum();
                h.normal
                    .iter()
                    .map(|a| a * (h.offset - 1.0) / len2)
                    .collect()
            }
            ConvexBody::Polytope(p) => p.witness().to_vec(),
            ConvexBody::Ellipsoid(e) => e.center.clone(),
            ConvexBody::Lse(l) => l.witness().to_vec(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() || x.iter().any(|a| !a.is_finite()) {
            return false;
        }
        match self {
            ConvexBody::HalfSpace(h) => h.slack(x) > 0.0,
            ConvexBody::Polytope(p) => p.contains(x),
            ConvexBody::Ellipsoid(e) => e.level(x) < 0.0,
            ConvexBody::Lse(l) => l.contains(x),
        }
    }

    /// Hitting time `t*` with `x + t*ξ ∈ ∂U`; `+∞` when the ray stays inside.
    pub fn ray_hit(&self, x: &[f64], xi: &[f64]) -> Result<f64> {
        check_dim(self.dim(), xi.len())?;
        if !self.contains(x) {
            return Err(FinslerError::PointOutsideBody);
        }
        if xi.iter().all(|&a| a == 0.0) {
            return Err(FinslerError::ZeroVector);
        }
        Ok(match self {
            ConvexBody::HalfSpace(h) => {
                let r: f64 = h.rate(x, xi);
                if r > 0.0 {
                    1.0 / r
                } else {
                    f64::INFINITY
                }
            }
            ConvexBody::Polytope(p) => p.ray_hit(x, xi),
            ConvexBody::Ellipsoid(e) => 1.0 / e.inverse_hit(x, xi),
            ConvexBody::Lse(l) => l.ray_hit(x, xi),
        })
    }

    /// `1/t*(x, ξ)`, i.e. the Funk Lagrangian, generically over jets.
    ///
    /// Vanishes on escaping rays and is positively 1-homogeneous in `ξ`.
    pub fn inverse_hit<S: Real>(&self, x: &[S], xi: &[S]) -> Result<S> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), xi.len())?;
        if !self.contains(&values(x)) {
            return Err(FinslerError::PointOutsideBody);
        }
        if xi.iter().all(|a| a.value() == 0.0) {
            if S::JET {
                return Err(FinslerError::NonSmoothPoint("zero direction".into()));
            }
            return Ok(S::zero());
        }
        match self {
            ConvexBody::HalfSpace(h) => polytope::max_with_zero(&[h.rate(x, xi)]),
            ConvexBody::Polytope(p) => p.inverse_hit(x, xi),
            ConvexBody::Ellipsoid(e) => Ok(e.inverse_hit(x, xi)),
            ConvexBody::Lse(l) => Ok(l.inverse_hit(x, xi)),
        }
    }

    /// Jet of the hitting time `t*` itself.
    pub fn gauge_taylor<S: Real>(&self, x: &[S], xi: &[S]) -> Result<S> {
        let inv = self.inverse_hit(x, xi)?;
        if inv.value() <= 0.0 {
            return Err(FinslerError::UnboundedRay);
        }
        Ok(inv.recip())
    }

    /// Image under `z ↦ M z + b`.
    pub fn affine_image(&self, m: &DMatrix<f64>, b: &[f64]) -> Result<Self> {
        let n = self.dim();
        check_dim(n, m.nrows())?;
        check_dim(n, m.ncols())?;
        check_dim(n, b.len())?;
        let minv = m
            .clone()
            .try_inverse()
            .ok_or_else(|| FinslerError::InvalidBody("affine map is singular".into()))?;
        Ok(match self {
            ConvexBody::HalfSpace(h) => {
                ConvexBody::HalfSpace(polytope::image_halfspace(h, &minv.transpose(), b)?)
            }
            ConvexBody::Polytope(p) => ConvexBody::Polytope(p.affine_image(m, b)?),
            ConvexBody::Ellipsoid(e) => {
                let c = m * nalgebra::DVector::from_column_slice(&e.center);
                let center: Vec<f64> = c.iter().zip(b).map(|(a, s)| a + s).collect();
                let shape = minv.transpose() * &e.shape * &minv;
                let shape = (&shape + shape.transpose()) * 0.5;
                ConvexBody::Ellipsoid(Ellipsoid::new(center, shape)?)
            }
            ConvexBody::Lse(l) => ConvexBody::Lse(l.affine_image(m, b)?),
        })
    }

    pub fn from_spec(spec: &BodySpec) -> Result<Self> {
        spec.build()
    }
}
