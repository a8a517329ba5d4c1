//! Numerical metric geometry on discretized planar domains.
//!
//! The crate samples a domain `G` on a lattice ([`metric_core`]), builds its
//! quasihyperbolic metric ([`quasihyperbolic`]), measures Gromov hyperbolicity
//! ([`hyperbolicity`]), applies conformal deformations ([`deformations`]) and
//! estimates the distortion data of sampled homeomorphisms ([`mapping`]).
//! [`ledger`] turns measured constants into the constants predicted by the
//! ∂-biLipschitz characterization chain, and [`scenario`] runs whole check
//! suites from JSON and writes reports.

pub mod deformations;
pub mod error;
pub mod hyperbolicity;
pub mod ledger;
pub mod mapping;
pub mod metric_core;
pub mod quasihyperbolic;
pub mod sampling;
pub mod scenario;

pub use error::{Error, Result};
pub use metric_core::{build_grid_domain, DomainSample, Point, Shape, ShapeSpec};
pub use quasihyperbolic::QuasihyperbolicMetric;
