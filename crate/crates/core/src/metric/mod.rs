//! The Finsler metric abstraction.
//!
//! A metric is a [`Lagrangian`]: an evaluator of `F(x, y)` over `f64` and
//! over the jet types [`T1`] and [`T2`]. Implementations write one generic
//! `eval_generic<S: Scalar>` and forward to it with
//! [`generic_lagrangian!`](crate::generic_lagrangian).

mod curve;
mod spec;
mod tensor;
mod zoo;

pub use curve::{energy, length, Curve, FnCurve, QuadratureOptions, Segment};
pub use spec::{FieldSpec, FormSpec, MetricSpec, WindSpec};
pub use tensor::{
    fundamental_tensor, fundamental_tensor_generic, fundamental_tensor_with, indicatrix_sample,
    strong_convexity_check, FundamentalTensor, StrongConvexityReport,
};
pub use zoo::{
    black_box, conformal_control, euclidean, minkowski, randers, reverse, sum, zermelo, BlackBox,
    Conformal, Euclidean, FormField, MatrixField, Minkowski, Randers, Reverse, Sum, WindField,
    Zermelo,
};

use std::fmt::Debug;
use std::ops::Deref;
use std::sync::Arc;

use serde::Serialize;

use crate::ad::{DerivativeMethod, Real, TaylorScalar, T1, T2};
use crate::body::ConvexBody;
use crate::error::Result;

/// Scalars a [`Lagrangian`] can be evaluated over.
pub trait Scalar: Real {
    fn lagrangian(l: &dyn Lagrangian, x: &[Self], y: &[Self]) -> Result<Self>;
}

impl Scalar for f64 {
    fn lagrangian(l: &dyn Lagrangian, x: &[f64], y: &[f64]) -> Result<f64> {
        l.eval_f64(x, y)
    }
}

impl Scalar for TaylorScalar<f64> {
    fn lagrangian(l: &dyn Lagrangian, x: &[T1], y: &[T1]) -> Result<T1> {
        l.eval_t1(x, y)
    }
}

impl Scalar for TaylorScalar<T1> {
    fn lagrangian(l: &dyn Lagrangian, x: &[T2], y: &[T2]) -> Result<T2> {
        l.eval_t2(x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    Euclidean,
    Minkowski,
    Randers,
    Reverse,
    Sum,
    Zermelo,
    Funk,
    ReverseFunk,
    Hilbert,
    Klein,
    Spherical,
    Conformal,
    BlackBox,
    Custom,
}

/// A Lagrangian `F(x, y)` on a domain of `ℝⁿ`.
pub trait Lagrangian: Send + Sync + Debug {
    fn dim(&self) -> usize;
    fn name(&self) -> String;

    fn eval_f64(&self, x: &[f64], y: &[f64]) -> Result<f64>;
    fn eval_t1(&self, x: &[T1], y: &[T1]) -> Result<T1>;
    fn eval_t2(&self, x: &[T2], y: &[T2]) -> Result<T2>;

    fn kind(&self) -> MetricKind {
        MetricKind::Custom
    }

    /// Convex domain of definition; `None` means all of `ℝⁿ`.
    fn body(&self) -> Option<&ConvexBody> {
        None
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        self.body().map_or(true, |b| b.contains(x))
    }

    fn is_reversible(&self) -> bool {
        false
    }

    /// Positive off the zero section.
    fn is_strict(&self) -> bool {
        true
    }

    /// Whether `eval_t1`/`eval_t2` are available.
    fn has_exact_jets(&self) -> bool {
        true
    }
}

/// Implements the three evaluation entry points of [`Lagrangian`] by
/// forwarding to an inherent `eval_generic<S: Scalar>` method.
#[macro_export]
macro_rules! generic_lagrangian {
    () => {
        fn eval_f64(&self, x: &[f64], y: &[f64]) -> $crate::Result<f64> {
            self.eval_generic(x, y)
        }
        fn eval_t1(
            &self,
            x: &[$crate::ad::T1],
            y: &[$crate::ad::T1],
        ) -> $crate::Result<$crate::ad::T1> {
            self.eval_generic(x, y)
        }
        fn eval_t2(
            &self,
            x: &[$crate::ad::T2],
            y: &[$crate::ad::T2],
        ) -> $crate::Result<$crate::ad::T2> {
            self.eval_generic(x, y)
        }
    };
}

/// Shared handle to a Lagrangian.
#[derive(Clone, Debug)]
pub struct FinslerMetric(Arc<dyn Lagrangian>);

impl FinslerMetric {
    pub fn new<L: Lagrangian + 'static>(l: L) -> Self {
        FinslerMetric(Arc::new(l))
    }

    pub fn from_arc(l: Arc<dyn Lagrangian>) -> Self {
        FinslerMetric(l)
    }

    pub fn lagrangian(&self) -> &dyn Lagrangian {
        &*self.0
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.0.eval_f64(x, y)
    }

    pub fn eval_jet<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        S::lagrangian(&*self.0, x, y)
    }

    /// Exact jets when available, finite differences otherwise.
    pub fn default_method(&self) -> DerivativeMethod {
        if self.0.has_exact_jets() {
            DerivativeMethod::ExactTaylor
        } else {
            DerivativeMethod::central_fd()
        }
    }
}

impl Deref for FinslerMetric {
    type Target = dyn Lagrangian;

    fn deref(&self) -> &Self::Target {
        &*self.0
    }
}
