use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Field-like scalar that Lagrangians are written against.
///
/// Branching must go through [`Real::value`], which returns the plain real
/// part; all arithmetic must stay in `Self` so derivatives propagate.
pub trait Real:
    Copy
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    /// Whether values of this type carry derivative information.
    const JET: bool;

    fn cst(v: f64) -> Self;
    fn value(&self) -> f64;

    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tan(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn recip(self) -> Self;
    fn powi(self, n: i32) -> Self;

    fn zero() -> Self {
        Self::cst(0.0)
    }

    fn one() -> Self {
        Self::cst(1.0)
    }

    /// `|x|`, differentiated as `sign(x)·x` away from zero.
    fn abs(self) -> Self {
        if self.value() < 0.0 {
            -self
        } else {
            self
        }
    }

    fn square(self) -> Self {
        self * self
    }

    fn atanh(self) -> Self {
        ((Self::one() + self) / (Self::one() - self)).ln() * 0.5
    }
}

impl Real for f64 {
    const JET: bool = false;

    fn cst(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn recip(self) -> Self {
        1.0 / self
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn atanh(self) -> Self {
        f64::atanh(self)
    }
}

/// Inner product of two equal-length slices.
pub fn dot<S: Real>(a: &[S], b: &[S]) -> S {
    let mut acc = S::zero();
    for (u, v) in a.iter().zip(b) {
        acc += *u * *v;
    }
    acc
}

pub fn norm_sq<S: Real>(a: &[S]) -> S {
    dot(a, a)
}

pub fn lift<S: Real>(v: &[f64]) -> Vec<S> {
    v.iter().map(|&a| S::cst(a)).collect()
}

pub fn values<S: Real>(v: &[S]) -> Vec<f64> {
    v.iter().map(|a| a.value()).collect()
}
