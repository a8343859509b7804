//! Rasterized domains: per-cell clipped area weights plus the active node set.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Grid2D};

/// Default subsampling resolution for boundary-cell area clipping.
pub const DEFAULT_SUBSAMPLES: usize = 4;

/// A measurable region on a grid: cell area weights (clipped to the region)
/// and, for rasterized domains, the set of nodes treated as unknowns.
///
/// Nodes are active when they lie at least half a cell inside the boundary,
/// so the zero-value layer straddles the true boundary symmetrically; this
/// keeps the effective Dirichlet boundary centered on `∂Ω`.
#[derive(Debug, Clone)]
pub struct DomainMask {
    grid: Arc<Grid2D>,
    spec: Option<Arc<DomainSpec>>,
    cell_weight: Vec<f64>,
    node_active: Vec<bool>,
    measure: f64,
}

impl DomainMask {
    /// Mask covering the whole grid rectangle (synthetic fields, unit-ball grids).
    pub fn full(grid: Arc<Grid2D>) -> Arc<DomainMask> {
        let cell_weight = vec![grid.cell_area(); grid.n_cells()];
        let node_active = vec![true; grid.n_nodes()];
        let measure = cell_weight.iter().sum();
        Arc::new(DomainMask { grid, spec: None, cell_weight, node_active, measure })
    }

    /// Mask for a sub-region given by explicit cell weights (e.g. a sublevel set).
    pub fn from_cell_weights(parent: &DomainMask, cell_weight: Vec<f64>) -> Arc<DomainMask> {
        assert_eq!(cell_weight.len(), parent.grid.n_cells());
        let grid = parent.grid.clone();
        let mut node_active = vec![false; grid.n_nodes()];
        for j in 0..grid.ny - 1 {
            for i in 0..grid.nx - 1 {
                if cell_weight[grid.cell_idx(i, j)] > 0.0 {
                    for (di, dj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                        node_active[grid.idx(i + di, j + dj)] = true;
                    }
                }
            }
        }
        let measure = cell_weight.iter().sum();
        Arc::new(DomainMask { grid, spec: None, cell_weight, node_active, measure })
    }

    #[inline]
    pub fn grid(&self) -> &Arc<Grid2D> {
        &self.grid
    }

    pub fn spec(&self) -> Option<&DomainSpec> {
        self.spec.as_deref()
    }

    #[inline]
    pub fn measure(&self) -> f64 {
        self.measure
    }

    #[inline]
    pub fn cell_weight(&self, ci: usize) -> f64 {
        self.cell_weight[ci]
    }

    pub fn cell_weights(&self) -> &[f64] {
        &self.cell_weight
    }

    #[inline]
    pub fn is_active(&self, idx: usize) -> bool {
        self.node_active[idx]
    }

    pub fn active_nodes(&self) -> &[bool] {
        &self.node_active
    }

    pub fn n_active(&self) -> usize {
        self.node_active.iter().filter(|&&a| a).count()
    }

    /// Measure of the symmetric difference of two regions on the same grid.
    pub fn symdiff_measure(&self, other: &DomainMask) -> f64 {
        assert!(self.grid.same_as(&other.grid), "symdiff across different grids");
        self.cell_weight
            .iter()
            .zip(&other.cell_weight)
            .map(|(a, b)| {
                let both_in = a > &0.0 && b > &0.0;
                if both_in { (a - b).abs() } else { a + b }
            })
            .sum()
    }

    /// Whether every cell of `self` is contained (by weight) in `other`.
    pub fn is_subset_of(&self, other: &DomainMask) -> bool {
        self.grid.same_as(&other.grid)
            && self
                .cell_weight
                .iter()
                .zip(&other.cell_weight)
                .all(|(a, b)| *a <= *b + 1e-12 * self.grid.cell_area())
    }

    /// Fraction of the cell's full area covered by the region.
    #[inline]
    pub fn cell_fraction(&self, ci: usize) -> f64 {
        self.cell_weight[ci] / self.grid.cell_area()
    }
}

/// Rasterize a shape onto a grid with the default 4×4 boundary subsampling.
pub fn rasterize_domain(spec: &DomainSpec, grid: &Arc<Grid2D>) -> Result<Arc<DomainMask>> {
    rasterize_domain_with(spec, grid, DEFAULT_SUBSAMPLES)
}

/// Rasterize with an explicit subsampling resolution (≥ 4 per direction).
pub fn rasterize_domain_with(
    spec: &DomainSpec,
    grid: &Arc<Grid2D>,
    subsamples: usize,
) -> Result<Arc<DomainMask>> {
    let sub = subsamples.max(4);
    let (sxmin, sxmax, symin, symax) = spec.bbox();
    if sxmin < grid.xmin + grid.hx - 1e-12 * grid.hx
        || sxmax > grid.xmax - grid.hx + 1e-12 * grid.hx
        || symin < grid.ymin + grid.hy - 1e-12 * grid.hy
        || symax > grid.ymax - grid.hy + 1e-12 * grid.hy
    {
        return Err(Error::invalid(
            "shape must be contained in the grid bbox with a one-cell margin",
        ));
    }

    let area = grid.cell_area();
    let diag = grid.hx.hypot(grid.hy);
    let mut cell_weight = vec![0.0; grid.n_cells()];
    for j in 0..grid.ny - 1 {
        for i in 0..grid.nx - 1 {
            let (x0, y0) = (grid.x(i), grid.y(j));
            // Corner distances give a conservative full/empty classification.
            let d = [
                spec.signed_distance(x0, y0),
                spec.signed_distance(x0 + grid.hx, y0),
                spec.signed_distance(x0, y0 + grid.hy),
                spec.signed_distance(x0 + grid.hx, y0 + grid.hy),
            ];
            let dmin = d.iter().cloned().fold(f64::MAX, f64::min);
            let dmax = d.iter().cloned().fold(f64::MIN, f64::max);
            let w = if dmax < -diag {
                area
            } else if dmin > diag {
                0.0
            } else {
                // Straddling cell: count subsample centroids inside.
                let mut hits = 0usize;
                for sj in 0..sub {
                    let y = y0 + (sj as f64 + 0.5) / sub as f64 * grid.hy;
                    for si in 0..sub {
                        let x = x0 + (si as f64 + 0.5) / sub as f64 * grid.hx;
                        if spec.contains(x, y) {
                            hits += 1;
                        }
                    }
                }
                area * hits as f64 / (sub * sub) as f64
            };
            cell_weight[grid.cell_idx(i, j)] = w;
        }
    }

    let margin = 0.5 * grid.hx.min(grid.hy);
    let mut node_active = vec![false; grid.n_nodes()];
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            node_active[grid.idx(i, j)] = spec.signed_distance(grid.x(i), grid.y(j)) < -margin;
        }
    }

    let measure: f64 = cell_weight.iter().sum();
    if measure <= 0.0 {
        return Err(Error::invalid("shape does not intersect the grid"));
    }
    Ok(Arc::new(DomainMask {
        grid: grid.clone(),
        spec: Some(Arc::new(spec.clone())),
        cell_weight,
        node_active,
        measure,
    }))
}
