//! Measure-constrained sublevel sets: the bathtub/quantile operation that
//! realizes `D = {u ≤ c}` with `|D| = A` on a cell grid.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{DomainMask, ScalarField};

/// Result of a quantile cut: the level and the selected region.
#[derive(Debug, Clone)]
pub struct QuantileCut {
    pub c: f64,
    pub d: Arc<DomainMask>,
}

/// Select cells with the smallest field values until their measure reaches
/// `a_target`. Cells are ranked by their corner-average value; ties are
/// broken by row-major cell index, so the cut is deterministic.
///
/// The returned measure overshoots `a_target` by less than one cell area;
/// `c` is the value of the last admitted cell (`min` / `max` of the field at
/// the `A = 0` / `A = |Ω|` endpoints).
pub fn weighted_quantile(
    u: &ScalarField,
    mask: &Arc<DomainMask>,
    a_target: f64,
) -> Result<QuantileCut> {
    let grid = mask.grid();
    assert!(u.grid().same_as(grid), "field and mask grids differ");
    let total = mask.measure();
    let slack = 1e-12 * total.max(1.0);
    if !(-slack..=total + slack).contains(&a_target) {
        return Err(Error::invalid(format!(
            "target measure {a_target} outside [0, {total}]"
        )));
    }

    // (cell value, cell index), restricted to cells with positive weight.
    let mut cells: Vec<(f64, usize)> = Vec::new();
    for j in 0..grid.ny - 1 {
        for i in 0..grid.nx - 1 {
            let ci = grid.cell_idx(i, j);
            if mask.cell_weight(ci) > 0.0 {
                let v = (u.at(i, j) + u.at(i + 1, j) + u.at(i, j + 1) + u.at(i + 1, j + 1)) / 4.0;
                cells.push((v, ci));
            }
        }
    }
    cells.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

    let mut weights = vec![0.0; grid.n_cells()];
    let mut cum = 0.0;
    let mut c = cells.first().map(|&(v, _)| v).unwrap_or(0.0);
    if a_target > slack {
        for &(v, ci) in &cells {
            weights[ci] = mask.cell_weight(ci);
            cum += mask.cell_weight(ci);
            c = v;
            if cum >= a_target - slack {
                break;
            }
        }
    }
    let d = DomainMask::from_cell_weights(mask, weights);
    Ok(QuantileCut { c, d })
}
