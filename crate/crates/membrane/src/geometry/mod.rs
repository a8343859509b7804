//! Grids, domain rasterization, discrete fields, and the measure-constrained
//! sublevel-set (quantile) operation.
//!
//! Everything downstream works on a uniform tensor grid: `ScalarField` holds
//! nodal values (zero outside the domain mask), `DomainMask` holds per-cell
//! clipped area weights so that measures and integrals are first-order
//! accurate without a mesh generator.

mod domain;
mod field;
mod grid;
mod mask;
mod quadrature;
mod quantile;

pub use domain::{BoundaryPoint, DomainSpec};
pub use field::{g17, ScalarField};
pub use grid::Grid2D;
pub use mask::{rasterize_domain, DomainMask};
pub use quadrature::{ball_is_interior, circle_integral, circle_integral_with, disk_integral};
pub use quantile::{weighted_quantile, QuantileCut};
