use nalgebra::DMatrix;

use super::halfspace::HalfSpace;
use super::polytope::{image_halfspace, lse_with_derivatives, smooth_max_minimizer, Polytope};
use crate::ad::{dot, lift, Real};
use crate::error::{FinslerError, Result};

/// Smooth strictly convex body `{φ < 0}` with
/// `φ(x) = (1/β) log Σᵢ exp(β(⟨νᵢ,x⟩ − τᵢ))`.
///
/// The affine functions are used exactly as given (no normal
/// normalization), so `β` multiplies the raw facet functions.
#[derive(Debug, Clone, PartialEq)]
pub struct LsePolytope {
    pub halfspaces: Vec<HalfSpace>,
    pub beta: f64,
    witness: Vec<f64>,
    bounded: bool,
    diameter: f64,
}

impl LsePolytope {
    /// `beta = None` picks `20 / diameter` of the underlying polytope.
    pub fn new(halfspaces: Vec<HalfSpace>, beta: Option<f64>) -> Result<Self> {
        let poly = Polytope::new(halfspaces.clone())?;
        let diameter = polytope_diameter(&poly);
        let beta = beta.unwrap_or(20.0 / diameter);
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(FinslerError::InvalidBody("beta must be positive".into()));
        }
        let witness = if poly.is_bounded() {
            smooth_max_minimizer(&halfspaces, Some(beta))?
        } else {
            poly.witness().to_vec()
        };
        let body = Self {
            halfspaces,
            beta,
            witness,
            bounded: poly.is_bounded(),
            diameter,
        };
        if body.phi(&body.witness) >= 0.0 {
            return Err(FinslerError::InvalidBody(format!(
                "smoothed body is empty for beta = {beta}"
            )));
        }
        Ok(body)
    }

    pub fn dim(&self) -> usize {
        self.halfspaces[0].dim()
    }

    pub fn witness(&self) -> &[f64] {
        &self.witness
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    /// Diameter estimate of the underlying polytope.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Defining function, negative inside.
    pub fn phi(&self, x: &[f64]) -> f64 {
        lse_with_derivatives(&self.halfspaces, x, self.beta).0
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.phi(x) < 0.0
    }

    /// `φ(x + tξ)` and its t-derivative.
    fn along<S: Real>(&self, x: &[S], xi: &[S], t: S) -> (S, S) {
        let z: Vec<S> = x.iter().zip(xi).map(|(a, b)| *a + t * *b).collect();
        let mut a = Vec::with_capacity(self.halfspaces.len());
        let mut slope = Vec::with_capacity(self.halfspaces.len());
        for h in &self.halfspaces {
            let nu: Vec<S> = lift(&h.normal);
            a.push(dot(&nu, &z) - h.offset);
            slope.push(dot(&nu, xi));
        }
        let k = (0..a.len())
            .max_by(|&i, &j| a[i].value().total_cmp(&a[j].value()))
            .expect("nonempty facet list");
        let mut s = S::zero();
        let mut ds = S::zero();
        for (ai, si) in a.iter().zip(&slope) {
            let w = ((*ai - a[k]) * self.beta).exp();
            s += w;
            ds += w * *si;
        }
        (a[k] + s.ln() / self.beta, ds / s)
    }

    /// Hitting time. The body lies inside the polytope, so the polytope
    /// hit bounds the root from above; Newton from there decreases
    /// monotonically because φ is convex along the ray.
    pub fn ray_hit(&self, x: &[f64], xi: &[f64]) -> f64 {
        let (a0, slope): (Vec<f64>, Vec<f64>) = self
            .halfspaces
            .iter()
            .map(|h| {
                let a: f64 = h.normal.iter().zip(x).map(|(n, v)| n * v).sum::<f64>() - h.offset;
                let s: f64 = h.normal.iter().zip(xi).map(|(n, v)| n * v).sum();
                (a, s)
            })
            .unzip();
        let hi = a0
            .iter()
            .zip(&slope)
            .filter(|(_, &s)| s > 0.0)
            .map(|(&a, &s)| (-a / s).max(0.0))
            .fold(f64::INFINITY, f64::min);
        if !hi.is_finite() {
            return f64::INFINITY;
        }
        let phi = |t: f64| -> (f64, f64) {
            let m = a0
                .iter()
                .zip(&slope)
                .map(|(a, s)| a + t * s)
                .fold(f64::NEG_INFINITY, f64::max);
            let (mut w, mut dw) = (0.0, 0.0);
            for (a, s) in a0.iter().zip(&slope) {
                let e = ((a + t * s - m) * self.beta).exp();
                w += e;
                dw += e * s;
            }
            (m + w.ln() / self.beta, dw / w)
        };
        let mut t = hi;
        for _ in 0..200 {
            let (v, d) = phi(t);
            if v <= 0.0 || d <= 0.0 {
                break;
            }
            let next = (t - v / d).max(0.0);
            if next >= t {
                break;
            }
            let done = t - next <= 2.0 * f64::EPSILON * t;
            t = next;
            if done {
                break;
            }
        }
        t
    }

    /// Reciprocal hitting time. Jets are obtained by Newton steps on
    /// `φ(x + tξ) = 0` started from the converged real root, which is the
    /// implicit-function rule carried out in jet arithmetic.
    pub fn inverse_hit<S: Real>(&self, x: &[S], xi: &[S]) -> S {
        let xf: Vec<f64> = x.iter().map(|a| a.value()).collect();
        let xif: Vec<f64> = xi.iter().map(|a| a.value()).collect();
        let t0 = self.ray_hit(&xf, &xif);
        if !t0.is_finite() {
            return S::zero();
        }
        let mut t = S::cst(t0);
        if S::JET {
            for _ in 0..3 {
                let (v, d) = self.along(x, xi, t);
                t = t - v / d;
            }
        }
        t.recip()
    }

    pub fn affine_image(&self, m: &DMatrix<f64>, b: &[f64]) -> Result<Self> {
        let minv_t = m
            .clone()
            .try_inverse()
            .ok_or_else(|| FinslerError::InvalidBody("affine map is singular".into()))?
            .transpose();
        let hs = self
            .halfspaces
            .iter()
            .map(|h| image_halfspace(h, &minv_t, b))
            .collect::<Result<Vec<_>>>()?;
        LsePolytope::new(hs, Some(self.beta))
    }
}

/// Largest chord through the witness over coordinate and facet directions.
fn polytope_diameter(p: &Polytope) -> f64 {
    let n = p.dim();
    let w = p.witness();
    let mut dirs: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect();
    dirs.extend(p.halfspaces.iter().map(|h| h.normal.clone()));
    let mut best: f64 = 0.0;
    for d in &dirs {
        let neg: Vec<f64> = d.iter().map(|a| -a).collect();
        let chord = p.ray_hit(w, d) + p.ray_hit(w, &neg);
        if chord.is_finite() {
            best = best.max(chord);
        }
    }
    if best > 0.0 {
        best
    } else {
        p.halfspaces
            .iter()
            .map(|h| h.offset.abs())
            .fold(1.0, f64::max)
    }
}
