//! Variational machinery: Christoffel symbols, sprays, geodesic
//! integration, the exponential map and the Berwald probe.

mod berwald;
mod integrate;
mod spray;

pub use berwald::berwald_quadraticity_residual;
pub use integrate::{
    exponential, exponential_with, integrate_geodesic, integrate_many, trace_geodesic,
    GeodesicOptions, GeodesicSample, GeodesicTrace, IntegratorStats, Termination,
};
pub use spray::{
    christoffel, geodesic_equation_residual, spray, spray_fd, spray_fd_steps, spray_generic,
    spray_via_christoffel, spray_with, SprayCoefficients,
};
