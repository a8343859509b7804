//! Uniform tensor-product grid on a rectangle.

use crate::error::{Error, Result};

/// Node-centered uniform grid on `[xmin,xmax] × [ymin,ymax]`.
///
/// Node `(i, j)` sits at `(xmin + i·hx, ymin + j·hy)` with `i < nx`, `j < ny`;
/// linear storage is row-major in `j` (index `j·nx + i`). Cells are the
/// `(nx-1)·(ny-1)` rectangles between nodes, indexed the same way.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
}

impl Grid2D {
    pub fn new(bbox: (f64, f64, f64, f64), nx: usize, ny: usize) -> Result<Self> {
        let (xmin, xmax, ymin, ymax) = bbox;
        if nx < 3 || ny < 3 {
            return Err(Error::invalid(format!(
                "grid needs at least 3 nodes per direction, got {nx}x{ny}"
            )));
        }
        if !(xmax > xmin && ymax > ymin) || !bboxfinite(bbox) {
            return Err(Error::invalid(format!("degenerate bbox {bbox:?}")));
        }
        Ok(Grid2D {
            xmin,
            xmax,
            ymin,
            ymax,
            nx,
            ny,
            hx: (xmax - xmin) / (nx - 1) as f64,
            hy: (ymax - ymin) / (ny - 1) as f64,
        })
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        (self.nx - 1) * (self.ny - 1)
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn cell_idx(&self, i: usize, j: usize) -> usize {
        j * (self.nx - 1) + i
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.xmin + i as f64 * self.hx
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.ymin + j as f64 * self.hy
    }

    /// Area of one full cell.
    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }

    /// Bilinear interpolation weights for a point; clamps to the grid box.
    ///
    /// Returns the cell origin `(i, j)` and local coordinates `(s, t)` in `[0,1]²`.
    #[inline]
    pub fn locate(&self, x: f64, y: f64) -> (usize, usize, f64, f64) {
        let fx = ((x - self.xmin) / self.hx).clamp(0.0, (self.nx - 1) as f64 - 1e-12);
        let fy = ((y - self.ymin) / self.hy).clamp(0.0, (self.ny - 1) as f64 - 1e-12);
        let i = fx.floor() as usize;
        let j = fy.floor() as usize;
        (i, j, fx - i as f64, fy - j as f64)
    }

    /// Whether two grids describe the same discretization.
    pub fn same_as(&self, other: &Grid2D) -> bool {
        self == other
    }
}

fn bboxfinite(b: (f64, f64, f64, f64)) -> bool {
    b.0.is_finite() && b.1.is_finite() && b.2.is_finite() && b.3.is_finite()
}
