//! Nodal scalar fields with Dirichlet-zero values outside the domain mask.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{DomainMask, Grid2D};

/// Real values on grid nodes, zero at inactive nodes.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<Grid2D>,
    mask: Arc<DomainMask>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(mask: &Arc<DomainMask>) -> ScalarField {
        ScalarField {
            grid: mask.grid().clone(),
            mask: mask.clone(),
            values: vec![0.0; mask.grid().n_nodes()],
        }
    }

    /// Evaluate `f(x, y)` at active nodes (inactive nodes stay zero).
    pub fn from_fn(mask: &Arc<DomainMask>, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        let grid = mask.grid().clone();
        let mut values = vec![0.0; grid.n_nodes()];
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let idx = grid.idx(i, j);
                if mask.is_active(idx) {
                    let v = f(grid.x(i), grid.y(j));
                    debug_assert!(v.is_finite());
                    values[idx] = v;
                }
            }
        }
        ScalarField { grid, mask: mask.clone(), values }
    }

    /// Wrap raw nodal values; zeroes any inactive entry.
    pub fn from_values(mask: &Arc<DomainMask>, mut values: Vec<f64>) -> ScalarField {
        assert_eq!(values.len(), mask.grid().n_nodes());
        for (idx, v) in values.iter_mut().enumerate() {
            if !mask.is_active(idx) {
                *v = 0.0;
            }
        }
        ScalarField { grid: mask.grid().clone(), mask: mask.clone(), values }
    }

    #[inline]
    pub fn grid(&self) -> &Arc<Grid2D> {
        &self.grid
    }

    #[inline]
    pub fn mask(&self) -> &Arc<DomainMask> {
        &self.mask
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    /// Bilinear interpolation (uses the zero values outside the mask).
    pub fn bilinear(&self, x: f64, y: f64) -> f64 {
        let (i, j, s, t) = self.grid.locate(x, y);
        let v00 = self.at(i, j);
        let v10 = self.at(i + 1, j);
        let v01 = self.at(i, j + 1);
        let v11 = self.at(i + 1, j + 1);
        (1.0 - s) * (1.0 - t) * v00 + s * (1.0 - t) * v10 + (1.0 - s) * t * v01 + s * t * v11
    }

    /// Catmull-Rom bicubic interpolation; falls back to bilinear where the
    /// 4×4 stencil would leave the grid or touch inactive nodes.
    pub fn bicubic(&self, x: f64, y: f64) -> f64 {
        let (i, j, s, t) = self.grid.locate(x, y);
        if i == 0 || j == 0 || i + 2 >= self.grid.nx || j + 2 >= self.grid.ny {
            return self.bilinear(x, y);
        }
        for jj in j - 1..=j + 2 {
            for ii in i - 1..=i + 2 {
                if !self.mask.is_active(self.grid.idx(ii, jj)) {
                    return self.bilinear(x, y);
                }
            }
        }
        let mut rows = [0.0; 4];
        for (k, jj) in (j - 1..=j + 2).enumerate() {
            rows[k] = catmull_rom(
                self.at(i - 1, jj),
                self.at(i, jj),
                self.at(i + 1, jj),
                self.at(i + 2, jj),
                s,
            );
        }
        catmull_rom(rows[0], rows[1], rows[2], rows[3], t)
    }

    /// Discrete gradient: central differences at interior nodes, one-sided at
    /// the mask boundary, zero where no active neighbor exists.
    pub fn gradient(&self) -> (ScalarField, ScalarField) {
        let g = &self.grid;
        let mut gx = ScalarField::zeros(&self.mask);
        let mut gy = ScalarField::zeros(&self.mask);
        for j in 0..g.ny {
            for i in 0..g.nx {
                let idx = g.idx(i, j);
                if !self.mask.is_active(idx) {
                    continue;
                }
                let act = |ii: isize, jj: isize| -> Option<f64> {
                    if ii < 0 || jj < 0 || ii >= g.nx as isize || jj >= g.ny as isize {
                        return None;
                    }
                    let id = g.idx(ii as usize, jj as usize);
                    self.mask.is_active(id).then(|| self.values[id])
                };
                let (i, j) = (i as isize, j as isize);
                let vx = match (act(i - 1, j), act(i + 1, j)) {
                    (Some(l), Some(r)) => (r - l) / (2.0 * g.hx),
                    (None, Some(r)) => (r - self.values[idx]) / g.hx,
                    (Some(l), None) => (self.values[idx] - l) / g.hx,
                    (None, None) => 0.0,
                };
                let vy = match (act(i, j - 1), act(i, j + 1)) {
                    (Some(d), Some(u)) => (u - d) / (2.0 * g.hy),
                    (None, Some(u)) => (u - self.values[idx]) / g.hy,
                    (Some(d), None) => (self.values[idx] - d) / g.hy,
                    (None, None) => 0.0,
                };
                gx.values[idx] = vx;
                gy.values[idx] = vy;
            }
        }
        (gx, gy)
    }

    /// Cell-weighted integral `∫ f` over the masked region (corner-average rule,
    /// i.e. the exact integral of the bilinear interpolant on full cells).
    pub fn integrate(&self) -> f64 {
        self.integrate_with(|v| v)
    }

    /// Cell-weighted integral of `map(f)`.
    pub fn integrate_with(&self, map: impl Fn(f64) -> f64) -> f64 {
        let g = &self.grid;
        let mut total = 0.0;
        for j in 0..g.ny - 1 {
            for i in 0..g.nx - 1 {
                let w = self.mask.cell_weight(g.cell_idx(i, j));
                if w > 0.0 {
                    let s = map(self.at(i, j))
                        + map(self.at(i + 1, j))
                        + map(self.at(i, j + 1))
                        + map(self.at(i + 1, j + 1));
                    total += w * s / 4.0;
                }
            }
        }
        total
    }

    /// Cell-weighted L² norm over the masked region.
    pub fn norm_l2(&self) -> f64 {
        self.integrate_with(|v| v * v).max(0.0).sqrt()
    }

    pub fn min_max_active(&self) -> (f64, f64) {
        let mut mn = f64::MAX;
        let mut mx = f64::MIN;
        for (idx, &v) in self.values.iter().enumerate() {
            if self.mask.is_active(idx) {
                mn = mn.min(v);
                mx = mx.max(v);
            }
        }
        (mn, mx)
    }

    /// Maximum of `|∇f|` over active nodes.
    pub fn max_gradient_norm(&self) -> f64 {
        let (gx, gy) = self.gradient();
        let mut m: f64 = 0.0;
        for idx in 0..self.values.len() {
            if self.mask.is_active(idx) {
                m = m.max(gx.values[idx].hypot(gy.values[idx]));
            }
        }
        m
    }

    /// Plain-text dump: header `nx ny xmin xmax ymin ymax`, then `ny` rows of
    /// `nx` values in row-major order, `%.17g` formatting.
    pub fn dump(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w)
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        let g = &self.grid;
        writeln!(
            w,
            "{} {} {} {} {} {}",
            g.nx,
            g.ny,
            g17(g.xmin),
            g17(g.xmax),
            g17(g.ymin),
            g17(g.ymax)
        )?;
        for j in 0..g.ny {
            let row: Vec<String> = (0..g.nx).map(|i| g17(self.at(i, j))).collect();
            writeln!(w, "{}", row.join(" "))?;
        }
        Ok(())
    }

    /// Read a dump produced by [`ScalarField::dump`] onto an existing mask.
    pub fn load(path: &Path, mask: &Arc<DomainMask>) -> Result<ScalarField> {
        let file = std::fs::File::open(path)?;
        let mut lines = BufReader::new(file).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::invalid("empty field dump"))??;
        let head: Vec<f64> = header
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| Error::invalid("bad dump header")))
            .collect::<Result<_>>()?;
        if head.len() != 6 {
            return Err(Error::invalid("dump header must have 6 entries"));
        }
        let g = mask.grid();
        if head[0] as usize != g.nx
            || head[1] as usize != g.ny
            || (head[2] - g.xmin).abs() > 1e-12
            || (head[3] - g.xmax).abs() > 1e-12
            || (head[4] - g.ymin).abs() > 1e-12
            || (head[5] - g.ymax).abs() > 1e-12
        {
            return Err(Error::invalid("dump header does not match the grid"));
        }
        let mut values = Vec::with_capacity(g.n_nodes());
        for line in lines {
            let line = line?;
            for tok in line.split_whitespace() {
                values.push(
                    tok.parse::<f64>()
                        .map_err(|_| Error::invalid(format!("bad value token '{tok}'")))?,
                );
            }
        }
        if values.len() != g.n_nodes() {
            return Err(Error::invalid(format!(
                "dump has {} values, grid needs {}",
                values.len(),
                g.n_nodes()
            )));
        }
        Ok(ScalarField::from_values(mask, values))
    }
}

#[inline]
fn catmull_rom(pm1: f64, p0: f64, p1: f64, p2: f64, s: f64) -> f64 {
    p0 + 0.5
        * s
        * (p1 - pm1
            + s * (2.0 * pm1 - 5.0 * p0 + 4.0 * p1 - p2 + s * (3.0 * (p0 - p1) + p2 - pm1)))
}

/// `%.17g`-style formatting: 17 significant digits, trailing zeros trimmed,
/// scientific notation outside the fixed-point range.
pub fn g17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    // Decimal exponent from the scientific rendering (exact).
    let sci = format!("{:.16e}", x);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if exp < -4 || exp >= 17 {
        let (mant, _) = sci.split_at(sci.find('e').unwrap());
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        format!("{mant}e{exp:+03}")
    } else {
        let decimals = (16 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Grid2D;

    fn full_mask(n: usize) -> Arc<DomainMask> {
        DomainMask::full(Arc::new(Grid2D::new((0.0, 1.0, 0.0, 1.0), n, n).unwrap()))
    }

    #[test]
    fn gradient_exact_on_linear_field() {
        let m = full_mask(9);
        let f = ScalarField::from_fn(&m, |x, _| x);
        let (gx, gy) = f.gradient();
        for j in 0..9 {
            for i in 0..9 {
                assert!((gx.at(i, j) - 1.0).abs() < 1e-13);
                assert!(gy.at(i, j).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn gradient_exact_on_quadratic_interior() {
        let m = full_mask(9);
        let f = ScalarField::from_fn(&m, |x, _| x * x);
        let (gx, _) = f.gradient();
        let g = m.grid().clone();
        for j in 0..9 {
            for i in 1..8 {
                assert!((gx.at(i, j) - 2.0 * g.x(i)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        let m = full_mask(7);
        let f = ScalarField::from_fn(&m, |_, _| 3.5);
        let (gx, gy) = f.gradient();
        assert!(gx.values().iter().all(|v| v.abs() < 1e-14));
        assert!(gy.values().iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn integrate_constant_equals_measure() {
        let m = full_mask(13);
        let f = ScalarField::from_fn(&m, |_, _| 2.0);
        assert!((f.integrate() - 2.0).abs() < 1e-13);
        assert!((f.norm_l2() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn dump_roundtrip_is_exact() {
        let m = full_mask(6);
        let f = ScalarField::from_fn(&m, |x, y| (1.0 + x * 7.3).sin() * (y - 0.137).exp());
        let dir = std::env::temp_dir().join("membrane_field_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("f.txt");
        f.dump(&path).unwrap();
        let f2 = ScalarField::load(&path, &m).unwrap();
        assert_eq!(f.values(), f2.values());
    }

    #[test]
    fn g17_formats() {
        assert_eq!(g17(0.0), "0");
        assert_eq!(g17(0.5), "0.5");
        assert_eq!(g17(1.0), "1");
        assert_eq!(g17(-2.25), "-2.25");
        // 17 significant digits expose that 1e-7 is not exactly representable.
        assert_eq!(g17(1e-7), "9.9999999999999995e-08");
        for &x in &[std::f64::consts::PI, 1.0 / 3.0, 6.02e23, -3.1e-12, 17.0] {
            let s = g17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "roundtrip of {s}");
        }
    }
}
