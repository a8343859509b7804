//! Two-phase obstacle form of a solved pair: `v = c − u` satisfies
//! `Δv = f·χ_{v≥0} − g·χ_{v<0}` with `f = (Λ−α)u > 0`, `g = −Λu < 0` and
//! `f + g = −αu < 0` near the free boundary.

use crate::error::{Error, Result};
use crate::geometry::ScalarField;
use crate::optimizer::OptimalPair;

/// Where a two-phase field came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    /// Built from an optimal pair with the recorded `(α, Λ, c)`.
    Pair { alpha: f64, lambda: f64, c: f64 },
    Synthetic,
}

/// `(v, f, g)` plus cached gradients, the nodal `v²` field used by surface
/// integrals, and the node distance (in cells) to the free boundary.
#[derive(Debug, Clone)]
pub struct TwoPhaseField {
    pub v: ScalarField,
    pub f: ScalarField,
    pub g: ScalarField,
    pub provenance: Provenance,
    pub(crate) grad_v: (ScalarField, ScalarField),
    pub(crate) grad_f: (ScalarField, ScalarField),
    pub(crate) grad_g: (ScalarField, ScalarField),
    pub(crate) v_sq: ScalarField,
    /// Chebyshev node distance to the sign interface, saturating at 255.
    pub(crate) dist_to_f: Vec<u8>,
    /// Max of `|Δv − (fχ_{v≥0} − gχ_{v<0})|` over nodes off the interface band.
    pub equation_residual_off_band: f64,
}

pub const DEFAULT_BAND_CELLS: usize = 10;

/// Transform a solved pair into its two-phase form; verifies the sign
/// conditions on a band around the free boundary (default 10 cells), shrinks
/// the band once on failure, and errors if they still do not hold.
pub fn to_two_phase(pair: &OptimalPair) -> Result<TwoPhaseField> {
    to_two_phase_with(pair, DEFAULT_BAND_CELLS)
}

pub fn to_two_phase_with(pair: &OptimalPair, band_cells: usize) -> Result<TwoPhaseField> {
    if !pair.subcritical {
        return Err(Error::invalid(
            "two-phase transform needs the subcritical flag α < Λ",
        ));
    }
    let mask = pair.u.mask();
    let (lambda, alpha, c) = (pair.lambda, pair.alpha, pair.c);
    let v = ScalarField::from_values(
        mask,
        pair.u
            .values()
            .iter()
            .zip(mask.active_nodes())
            .map(|(&u, &a)| if a { c - u } else { 0.0 })
            .collect(),
    );
    let f = scale(&pair.u, lambda - alpha);
    let g = scale(&pair.u, -lambda);

    let mut tp = assemble(v, f, g, Provenance::Pair { alpha, lambda, c });
    for (attempt, band) in [band_cells, band_cells.div_ceil(2)].into_iter().enumerate() {
        match check_signs(&tp, band) {
            Ok(()) => {
                tp.equation_residual_off_band = equation_residual(&tp, band);
                return Ok(tp);
            }
            Err(e) if attempt == 1 => return Err(e),
            Err(_) => {} // shrink the band once and retry
        }
    }
    unreachable!()
}

/// Synthetic two-phase data (exact homogeneous solutions, counterexamples).
pub fn synthetic_two_phase(v: ScalarField, f: ScalarField, g: ScalarField) -> TwoPhaseField {
    let mut tp = assemble(v, f, g, Provenance::Synthetic);
    tp.equation_residual_off_band = f64::NAN;
    tp
}

fn scale(u: &ScalarField, k: f64) -> ScalarField {
    ScalarField::from_values(u.mask(), u.values().iter().map(|&x| k * x).collect())
}

fn assemble(v: ScalarField, f: ScalarField, g: ScalarField, provenance: Provenance) -> TwoPhaseField {
    let grad_v = v.gradient();
    let grad_f = f.gradient();
    let grad_g = g.gradient();
    let v_sq = ScalarField::from_values(v.mask(), v.values().iter().map(|&x| x * x).collect());
    let dist_to_f = interface_distance(&v);
    TwoPhaseField {
        v,
        f,
        g,
        provenance,
        grad_v,
        grad_f,
        grad_g,
        v_sq,
        dist_to_f,
        equation_residual_off_band: f64::NAN,
    }
}

/// Chebyshev distance (in nodes) to the nearest sign change of `v` among
/// active nodes; ties at `v = 0` count as the non-negative phase.
fn interface_distance(v: &ScalarField) -> Vec<u8> {
    let g = v.grid().clone();
    let mask = v.mask();
    let n = g.n_nodes();
    let mut dist = vec![u8::MAX; n];
    let mut frontier = Vec::new();
    for j in 0..g.ny {
        for i in 0..g.nx {
            let idx = g.idx(i, j);
            if !mask.is_active(idx) {
                continue;
            }
            let s0 = v.values()[idx] >= 0.0;
            let mut boundary = false;
            if i + 1 < g.nx && mask.is_active(idx + 1) && (v.values()[idx + 1] >= 0.0) != s0 {
                boundary = true;
            }
            if j + 1 < g.ny && mask.is_active(idx + g.nx) && (v.values()[idx + g.nx] >= 0.0) != s0 {
                boundary = true;
            }
            if i > 0 && mask.is_active(idx - 1) && (v.values()[idx - 1] >= 0.0) != s0 {
                boundary = true;
            }
            if j > 0 && mask.is_active(idx - g.nx) && (v.values()[idx - g.nx] >= 0.0) != s0 {
                boundary = true;
            }
            if boundary {
                dist[idx] = 0;
                frontier.push(idx);
            }
        }
    }
    // Breadth-first dilation in Chebyshev metric (8-neighborhood).
    let mut d = 0u8;
    while !frontier.is_empty() && d < u8::MAX - 1 {
        d += 1;
        let mut next = Vec::new();
        for &idx in &frontier {
            let (i, j) = (idx % g.nx, idx / g.nx);
            for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if ii < 0 || jj < 0 || ii >= g.nx as i64 || jj >= g.ny as i64 {
                        continue;
                    }
                    let nid = g.idx(ii as usize, jj as usize);
                    if dist[nid] == u8::MAX {
                        dist[nid] = d;
                        next.push(nid);
                    }
                }
            }
        }
        frontier = next;
    }
    dist
}

fn check_signs(tp: &TwoPhaseField, band: usize) -> Result<()> {
    let mask = tp.v.mask();
    let mut checked = 0usize;
    for idx in 0..tp.v.values().len() {
        if !mask.is_active(idx) || tp.dist_to_f[idx] as usize > band {
            continue;
        }
        checked += 1;
        let (f, g) = (tp.f.values()[idx], tp.g.values()[idx]);
        if !(f > 0.0 && g < 0.0 && f + g < 0.0) {
            return Err(Error::SignCondition(format!(
                "f={f:.3e}, g={g:.3e}, f+g={:.3e} at node {idx} within {band} cells of F",
                f + g
            )));
        }
    }
    if checked == 0 {
        return Err(Error::SignCondition("no nodes found near the free boundary".into()));
    }
    Ok(())
}

/// Max 5-point residual of `Δv = fχ_{v≥0} − gχ_{v<0}` over active nodes at
/// least `band` cells from F and two nodes from the mask boundary.
fn equation_residual(tp: &TwoPhaseField, band: usize) -> f64 {
    let g = tp.v.grid().clone();
    let mask = tp.v.mask();
    let (ihx2, ihy2) = (1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy));
    let mut worst: f64 = 0.0;
    for j in 2..g.ny - 2 {
        for i in 2..g.nx - 2 {
            let idx = g.idx(i, j);
            if !mask.is_active(idx) || (tp.dist_to_f[idx] as usize) <= band {
                continue;
            }
            let all_active = [idx - 1, idx + 1, idx - g.nx, idx + g.nx]
                .iter()
                .all(|&k| mask.is_active(k));
            if !all_active {
                continue;
            }
            let vv = tp.v.values();
            let lap = ihx2 * (vv[idx - 1] + vv[idx + 1] - 2.0 * vv[idx])
                + ihy2 * (vv[idx - g.nx] + vv[idx + g.nx] - 2.0 * vv[idx]);
            let rhs = if vv[idx] >= 0.0 { tp.f.values()[idx] } else { -tp.g.values()[idx] };
            worst = worst.max((lap - rhs).abs());
        }
    }
    worst
}

impl TwoPhaseField {
    /// `|∇v|` at an arbitrary point (bilinear interpolation of the nodal gradient).
    pub fn grad_v_at(&self, x: f64, y: f64) -> f64 {
        self.grad_v.0.bilinear(x, y).hypot(self.grad_v.1.bilinear(x, y))
    }

    pub fn max_grad_v(&self) -> f64 {
        let mut m: f64 = 0.0;
        for idx in 0..self.v.values().len() {
            if self.v.mask().is_active(idx) {
                m = m.max(self.grad_v.0.values()[idx].hypot(self.grad_v.1.values()[idx]));
            }
        }
        m
    }

    /// Minimum 5-point Laplacian of `v⁺` over interior nodes at least
    /// `off_band` cells away from F (discrete subharmonicity check).
    pub fn min_laplacian_v_plus_off_band(&self, off_band: usize) -> f64 {
        let g = self.v.grid().clone();
        let mask = self.v.mask();
        let vplus: Vec<f64> = self.v.values().iter().map(|&x| x.max(0.0)).collect();
        let (ihx2, ihy2) = (1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy));
        let mut worst = f64::MAX;
        for j in 2..g.ny - 2 {
            for i in 2..g.nx - 2 {
                let idx = g.idx(i, j);
                if !mask.is_active(idx) || (self.dist_to_f[idx] as usize) <= off_band {
                    continue;
                }
                let all_active = [idx - 1, idx + 1, idx - g.nx, idx + g.nx]
                    .iter()
                    .all(|&k| mask.is_active(k));
                if !all_active {
                    continue;
                }
                let lap = ihx2 * (vplus[idx - 1] + vplus[idx + 1] - 2.0 * vplus[idx])
                    + ihy2 * (vplus[idx - g.nx] + vplus[idx + g.nx] - 2.0 * vplus[idx]);
                worst = worst.min(lap);
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DomainMask, Grid2D};
    use std::sync::Arc;

    fn synthetic(n: usize) -> TwoPhaseField {
        let g = Arc::new(Grid2D::new((-1.0, 1.0, -1.0, 1.0), n, n).unwrap());
        let m = DomainMask::full(g);
        let v = ScalarField::from_fn(&m, |x, _| 0.5 * x * x);
        let f = ScalarField::from_fn(&m, |_, _| 1.0);
        let gg = ScalarField::from_fn(&m, |_, _| -1.0);
        synthetic_two_phase(v, f, gg)
    }

    #[test]
    fn synthetic_provenance_and_caches() {
        let tp = synthetic(33);
        assert_eq!(tp.provenance, Provenance::Synthetic);
        assert!((tp.v_sq.at(16, 16) - tp.v.at(16, 16).powi(2)).abs() < 1e-15);
        // v = x²/2 >= 0 everywhere: no sign interface at all.
        assert!(tp.dist_to_f.iter().all(|&d| d == u8::MAX));
    }

    #[test]
    fn interface_distance_tracks_sign_change() {
        let g = Arc::new(Grid2D::new((-1.0, 1.0, -1.0, 1.0), 65, 65).unwrap());
        let m = DomainMask::full(g.clone());
        let v = ScalarField::from_fn(&m, |x, _| x);
        let f = ScalarField::from_fn(&m, |_, _| 1.0);
        let gg = ScalarField::from_fn(&m, |_, _| -1.0);
        let tp = synthetic_two_phase(v, f, gg);
        // The interface x = 0 sits at node column 32.
        for j in 0..65usize {
            for i in 0..65usize {
                let idx = g.idx(i, j);
                let expected = (i as i64 - 32).unsigned_abs().min(31) as u8;
                let got = tp.dist_to_f[idx];
                // Nodes at column 31 and 32 both touch the sign flip.
                assert!(
                    (got as i64 - expected as i64).abs() <= 1,
                    "dist at ({i},{j}): {got} vs {expected}"
                );
            }
        }
    }
}
