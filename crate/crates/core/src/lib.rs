//! Funk and Hilbert geometries on convex domains, together with the Finsler
//! machinery needed to study them numerically: exact jets of Lagrangians,
//! fundamental tensors, sprays, geodesics, projective flatness tests and
//! flag curvature.
//!
//! Every Lagrangian is written once, generically over [`ad::Real`], and is
//! then evaluated over plain `f64` or over nested hyper-dual scalars to obtain
//! exact partial derivatives up to order four.

pub mod ad;
pub mod body;
pub mod curvature;
pub mod error;
pub mod funk_hilbert;
pub mod geodesic;
pub mod linalg;
pub mod metric;
pub mod projective;
pub mod quadrature;
pub mod sampling;
pub mod verify;

pub use error::{FinslerError, Result};
pub use metric::{FinslerMetric, Lagrangian};
