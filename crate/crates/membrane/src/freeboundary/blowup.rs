//! Blow-up rescalings `v_r(x) = v(rx + x₀)/r²` on a fixed unit-ball grid,
//! their circle amplitudes `T = S(r)/r²`, and degree-2 least-squares fits.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::freeboundary::{TwoPhaseField, WeissEvaluator, WeissMode};
use crate::geometry::{rasterize_domain, DomainMask, DomainSpec, Grid2D, ScalarField};

/// Least-squares degree-2 fit `a11·x² + a12·xy + a22·y²`.
#[derive(Debug, Clone, Copy)]
pub struct Degree2Fit {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
    /// `‖field − fit‖₂ / ‖field‖₂` over the fitted nodes.
    pub rel_residual: f64,
    /// `|a11 + a22| / (|a11| + |a12| + |a22|)`: zero iff trace-free (harmonic).
    pub harmonic_defect: f64,
}

/// One rescaling level.
#[derive(Debug, Clone)]
pub struct BlowupLevel {
    pub r: f64,
    /// `T = S(r)/r²`.
    pub t: f64,
    pub field: ScalarField,
    pub fit: Degree2Fit,
}

/// Which asymptotic regime the `T_j` data suggests (a desk-scale heuristic,
/// not a proof): bounded `T` goes with degree-2 solution limits, divergent
/// `T` with harmonic-polynomial limits, and decay flags a degenerate center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeLabel {
    Bounded,
    Divergent,
    Degenerate,
}

impl std::fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RegimeLabel::Bounded => "bounded (degree-2 solution regime)",
            RegimeLabel::Divergent => "divergent (harmonic polynomial regime)",
            RegimeLabel::Degenerate => "degenerate (nondegeneracy violated at this center)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct BlowupSequence {
    pub center: (f64, f64),
    pub levels: Vec<BlowupLevel>,
    pub regime: RegimeLabel,
    /// Set when the center failed the singular-point test `|∇v|(x₀) < τ`.
    pub warned_regular: bool,
}

/// Shared unit-ball grid for resampled blow-up fields.
pub fn unit_ball_mask(n: usize) -> Arc<DomainMask> {
    let g = Arc::new(Grid2D::new((-1.1, 1.1, -1.1, 1.1), n, n).unwrap());
    rasterize_domain(&DomainSpec::disk(0.0, 0.0, 1.0).unwrap(), &g)
        .expect("unit disk fits its grid")
}

pub const DEFAULT_UNIT_BALL_NODES: usize = 65;

/// Resample the blow-up family at decreasing radii.
///
/// `tau_rel` classifies the center: it is singular when `|∇v|(x₀)` is below
/// `tau_rel · max|∇v|`. A regular center only warns (blow-ups there are
/// degree-1, so rescaling by r² is the wrong normalization there); radii
/// below `4h` are rejected.
pub fn blowup(
    tp: &TwoPhaseField,
    x0: (f64, f64),
    r_list: &[f64],
    tau_rel: f64,
) -> Result<BlowupSequence> {
    if r_list.is_empty() || r_list.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::invalid("blow-up radii must be strictly decreasing"));
    }
    let h = tp.v.grid().hx.max(tp.v.grid().hy);
    if *r_list.last().unwrap() < 4.0 * h {
        return Err(Error::invalid(format!(
            "smallest blow-up radius {} is below the 4h resolution floor {}",
            r_list.last().unwrap(),
            4.0 * h
        )));
    }
    let warned_regular = tp.grad_v_at(x0.0, x0.1) >= tau_rel * tp.max_grad_v();

    let ball = unit_ball_mask(DEFAULT_UNIT_BALL_NODES);
    let ev = WeissEvaluator::new(tp, x0, WeissMode::Frozen);
    let mut levels = Vec::with_capacity(r_list.len());
    for &r in r_list {
        let field = ScalarField::from_fn(&ball, |x, y| {
            tp.v.bilinear(x0.0 + r * x, x0.1 + r * y) / (r * r)
        });
        let t = ev.s(r)? / (r * r);
        let fit = fit_degree2(&field)?;
        levels.push(BlowupLevel { r, t, field, fit });
    }
    let t_large = levels.first().unwrap().t;
    let t_small = levels.last().unwrap().t;
    let regime = if t_small > 3.0 * t_large {
        RegimeLabel::Divergent
    } else if t_small < t_large / 3.0 {
        RegimeLabel::Degenerate
    } else {
        RegimeLabel::Bounded
    };
    Ok(BlowupSequence { center: x0, levels, regime, warned_regular })
}

/// Least squares over the active nodes against `{x², xy, y²}`.
pub fn fit_degree2(field: &ScalarField) -> Result<Degree2Fit> {
    let g = field.grid().clone();
    let mask = field.mask();
    // Normal equations for the 3-parameter fit.
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    let mut norm2 = 0.0;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let idx = g.idx(i, j);
            if !mask.is_active(idx) {
                continue;
            }
            let (x, y) = (g.x(i), g.y(j));
            let basis = [x * x, x * y, y * y];
            let val = field.values()[idx];
            norm2 += val * val;
            for a in 0..3 {
                atb[a] += basis[a] * val;
                for b in 0..3 {
                    ata[a][b] += basis[a] * basis[b];
                }
            }
        }
    }
    if norm2 == 0.0 {
        return Err(Error::invalid("cannot fit the zero field"));
    }
    let coef = solve3(ata, atb).ok_or_else(|| Error::invalid("degenerate fit system"))?;
    let mut res2 = 0.0;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let idx = g.idx(i, j);
            if !mask.is_active(idx) {
                continue;
            }
            let (x, y) = (g.x(i), g.y(j));
            let fit = coef[0] * x * x + coef[1] * x * y + coef[2] * y * y;
            res2 += (field.values()[idx] - fit).powi(2);
        }
    }
    let denom = coef[0].abs() + coef[1].abs() + coef[2].abs();
    Ok(Degree2Fit {
        a11: coef[0],
        a12: coef[1],
        a22: coef[2],
        rel_residual: (res2 / norm2).sqrt(),
        harmonic_defect: if denom > 0.0 { (coef[0] + coef[2]).abs() / denom } else { 0.0 },
    })
}

/// Gaussian elimination with partial pivoting for the 3×3 normal equations.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&p, &q| a[p][col].abs().partial_cmp(&a[q][col].abs()).unwrap())?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let m = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= m * a[col][k];
            }
            b[row] -= m * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut s = b[row];
        for k in row + 1..3 {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}
