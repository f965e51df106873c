//! Inclusion identification for convex bodies.
//!
//! The crate decides whether one convex body is contained in another (possibly
//! after a translation) and, when it is not, constructs a fractional-linear map
//! under which the first body's image beats the second's in volume, surface
//! area or any quermassintegral. Around that core it provides:
//!
//! - [`bodies`]: V-polytopes and ellipsoids, support functions, Minkowski sums,
//!   polars, projections, sections and LP-based translative inclusion.
//! - [`measures`]: exact volumes, surface areas, mixed volumes by polarization,
//!   quermassintegrals and a Monte-Carlo oracle.
//! - [`projective`]: fractional-linear maps acting on points, polytopes and
//!   ellipsoids.
//! - [`witness`]: ball separation and witness-map construction.
//! - [`identify`]: Minkowski-sum based identification suites.
//! - [`tuples`]: affine and projective n-tuple comparisons.
//!
//! Exact measures are implemented for dimensions 2 and 3.

pub mod bodies;
pub mod error;
pub mod hull;
pub mod identify;
pub mod linalg;
pub mod lp;
pub mod measures;
pub mod projective;
pub mod report;
pub mod sampling;
pub mod tuples;
pub mod witness;

pub use bodies::{Body, Ellipsoid, EllipsoidParams, VPolytope, Vector};
pub use error::{Error, Result};
pub use projective::FLMap;
pub use report::{SuiteRecord, SuiteReport};
pub use witness::{Functional, WitnessCertificate};

/// Tolerance for geometric predicates (relative to the scale of the data
/// where a scale is available).
pub const EPS_GEO: f64 = 1e-9;

/// Tolerance for comparisons inside identification suites.
pub const EPS_CMP: f64 = 1e-7;
