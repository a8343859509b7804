//! Numerical solver for the composite membrane problem: minimize the first
//! Dirichlet eigenvalue of `-Δ + α·χ_D` over subsets `D ⊂ Ω` of prescribed
//! measure `A`, together with free-boundary diagnostics for the optimal
//! configuration (Pohozaev identity, cut-level uniqueness, Weiss energy
//! monotonicity, blow-up classification, exact homogeneous solutions).
//!
//! The crate is organized around the pipeline
//!
//! ```text
//! geometry  ->  spectral  ->  optimizer  ->  diagnostics / freeboundary
//! ```
//!
//! with `homogeneous2d` providing exact degree-2 homogeneous solutions used
//! as oracles for the free-boundary machinery.

pub mod diagnostics;
pub mod error;
pub mod freeboundary;
pub mod geometry;
pub mod homogeneous2d;
pub mod optimizer;
pub mod parallel;
pub mod spectral;

pub use error::{Error, Result};

#[cfg(test)]
pub(crate) mod test_util {
    use crate::geometry::{rasterize_domain, DomainMask, DomainSpec, Grid2D};
    use std::sync::Arc;

    /// Unit square aligned with the grid so the discrete spectrum is known in
    /// closed form: interior unknowns form an m×m lattice with h = 1/(m+1).
    pub fn unit_square_setup(m: usize) -> Arc<DomainMask> {
        let h = 1.0 / (m as f64 + 1.0);
        let nx = m + 4;
        let g = Arc::new(Grid2D::new((-h, 1.0 + h, -h, 1.0 + h), nx, nx).unwrap());
        let s = DomainSpec::rectangle(0.5, 0.5, 0.5, 0.5).unwrap();
        rasterize_domain(&s, &g).unwrap()
    }
}
