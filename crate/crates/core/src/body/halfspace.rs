use serde::{Deserialize, Serialize};

use crate::ad::{dot, lift, Real};
use crate::error::{FinslerError, Result};

/// Open half-space `{x : ⟨ν, x⟩ < τ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl HalfSpace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let len = normal.iter().map(|a| a * a).sum::<f64>().sqrt();
        if normal.is_empty() || !(len > 0.0) || !offset.is_finite() {
            return Err(FinslerError::InvalidBody(
                "half-space normal must be nonzero".into(),
            ));
        }
        Ok(Self { normal, offset })
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// `τ − ⟨ν, x⟩`, positive inside.
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.offset - dot(&self.normal, x)
    }

    /// `⟨ν, ξ⟩ / (τ − ⟨ν, x⟩)`: reciprocal of the signed hitting time.
    pub fn rate<S: Real>(&self, x: &[S], xi: &[S]) -> S {
        let nu: Vec<S> = lift(&self.normal);
        dot(&nu, xi) / (S::cst(self.offset) - dot(&nu, x))
    }

    /// Same set with unit normal.
    pub fn normalized(&self) -> Self {
        let len = self.normal.iter().map(|a| a * a).sum::<f64>().sqrt();
        Self {
            normal: self.normal.iter().map(|a| a / len).collect(),
            offset: self.offset / len,
        }
    }
}
