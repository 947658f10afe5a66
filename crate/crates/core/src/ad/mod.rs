//! Scalar types and derivative operators.
//!
//! [`TaylorScalar`] is a hyper-dual number with two nilpotent directions
//! (`e1² = e2² = 0`). Nesting it once (`TaylorScalar<TaylorScalar<f64>>`)
//! gives four independent directions, so any partial derivative of total
//! order at most four comes out exactly as one coefficient.

mod derivatives;
mod real;
mod taylor;

pub use derivatives::{
    directional, fd_first, fd_second, grad_y, grad_y_with, hess_y, hess_y_with, mixed_xy,
    mixed_xy_with, partial, seed, unit, Block, DerivativeMethod, DerivativeRequest, Perturbation,
};
pub use real::{dot, lift, norm_sq, values, Real};
pub use taylor::{TaylorScalar, T1, T2};
