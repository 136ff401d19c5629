//! Multi-hop wireless ad hoc network capacity under random per-link packet
//! losses: spherical geometry, Voronoi tessellation, straight-line and
//! arbitrary routing, SINR link models, TDMA schedules (constant-reuse and
//! exclusion-radius), closed-form bounds, and a Monte-Carlo experiment engine.

pub mod analysis;
pub mod deployment;
pub mod error;
pub mod phy;
pub mod real;
pub mod rng;
pub mod routing;
pub mod scheduling;
pub mod sim;
pub mod sphere;
pub mod tessellation;

pub use error::{
    AnalysisError, ConfigError, GeometryError, RoutingError, ScheduleError, SimError,
    TessellationError,
};
pub use real::Real;
pub use rng::RngStream;

/// Default scalar used by the simulation stack.
pub type Scalar = f64;

/// Concrete aliases for the generic geometry layer.
pub type SphereParams = sphere::SphereParams<Scalar>;
pub type SpherePoint = sphere::SpherePoint<Scalar>;
pub type GeodesicSegment = sphere::GeodesicSegment<Scalar>;

pub type SphereParams32 = sphere::SphereParams<f32>;
pub type SpherePoint32 = sphere::SpherePoint<f32>;
