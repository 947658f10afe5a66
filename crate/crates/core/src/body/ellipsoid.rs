use nalgebra::DMatrix;

use crate::ad::Real;
use crate::error::{FinslerError, Result};

/// Open ellipsoid `{x : ⟨A(x − c), x − c⟩ < 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    pub center: Vec<f64>,
    pub shape: DMatrix<f64>,
}

impl Ellipsoid {
    pub fn new(center: Vec<f64>, shape: DMatrix<f64>) -> Result<Self> {
        let n = center.len();
        if n == 0 || shape.nrows() != n || shape.ncols() != n {
            return Err(FinslerError::InvalidBody(
                "ellipsoid shape must be n×n".into(),
            ));
        }
        let asym = (&shape - shape.transpose()).amax();
        if asym > 1e-12 * shape.amax().max(1.0) {
            return Err(FinslerError::InvalidBody(
                "ellipsoid shape must be symmetric".into(),
            ));
        }
        let eig = shape.clone().symmetric_eigen();
        if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
            return Err(FinslerError::InvalidBody(
                "ellipsoid shape must be positive definite".into(),
            ));
        }
        Ok(Self { center, shape })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(FinslerError::InvalidBody("radius must be positive".into()));
        }
        let n = center.len();
        Self::new(center, DMatrix::identity(n, n) / (radius * radius))
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    fn quad<S: Real>(&self, u: &[S], v: &[S]) -> S {
        let n = self.dim();
        let mut acc = S::zero();
        for i in 0..n {
            let mut row = S::zero();
            for j in 0..n {
                row += v[j] * self.shape[(i, j)];
            }
            acc += u[i] * row;
        }
        acc
    }

    /// `⟨A(x − c), x − c⟩ − 1`, negative inside.
    pub fn level(&self, x: &[f64]) -> f64 {
        let d: Vec<f64> = x.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        self.quad(&d, &d) - 1.0
    }

    /// Reciprocal hitting time `1/t*` from the quadratic formula.
    pub fn inverse_hit<S: Real>(&self, x: &[S], xi: &[S]) -> S {
        let d: Vec<S> = x.iter().zip(&self.center).map(|(a, &c)| *a - c).collect();
        let a = self.quad(xi, xi);
        let b = self.quad(xi, &d);
        let c0 = self.quad(&d, &d) - 1.0;
        let disc = (b * b - a * c0).sqrt();
        if b.value() >= 0.0 {
            (b + disc) / (-c0)
        } else {
            a / (disc - b)
        }
    }

    /// Half-widths of the axis-aligned bounding box.
    pub fn half_widths(&self) -> Vec<f64> {
        let inv = self
            .shape
            .clone()
            .try_inverse()
            .expect("positive definite shape is invertible");
        (0..self.dim()).map(|i| inv[(i, i)].sqrt()).collect()
    }
}
