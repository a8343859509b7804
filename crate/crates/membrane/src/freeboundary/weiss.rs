//! Weiss energy `W(r)`, its error term `e(r)`, the monotone surrogate
//! `W₁(r) = W(r) + D·r^γ`, and the circle-mean amplitude `S(r)`.
//!
//! In two dimensions,
//!
//! ```text
//! W(r) = r⁻⁴ ∫_{B(x₀,r)} (|∇v|² + 2(f v⁺ + g v⁻)) − 2 r⁻⁵ ∮_{∂B(x₀,r)} v²
//! e(r) = 2 r⁻⁵ ∫_{B(x₀,r)} ((x−x₀)·∇f v⁺ + (x−x₀)·∇g v⁻)
//! S(r) = (⨍_{∂B(x₀,r)} v²)^{1/2}
//! ```
//!
//! with `v⁻ = max(−v, 0)`, so `f v⁺ + g v⁻` is the antiderivative of the
//! right-hand side `f χ_{v≥0} − g χ_{v<0}` along `v`. `W` is constant in `r`
//! exactly on degree-2 homogeneous solutions with frozen coefficients, which
//! is how this sign convention is validated.

use crate::error::{Error, Result};
use crate::freeboundary::TwoPhaseField;
use crate::geometry::{circle_integral, disk_integral, ScalarField};

/// Whether `f, g` vary over the ball or are frozen at their center values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeissMode {
    Frozen,
    Varying,
}

/// How the monotonicity constant `D` of `W₁ = W + D·r^γ` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DMode {
    Explicit(f64),
    /// `D = sup_r |e(r)|·r^{1−γ} / γ`, which makes `(D r^γ)' ≥ |e(r)|` on the
    /// sampled range — exactly the role `D` plays in the monotonicity bound.
    Calibrated,
}

#[derive(Debug, Clone, Copy)]
pub struct WeissSample {
    pub r: f64,
    pub w: f64,
    pub e: f64,
    pub w1: f64,
    pub s: f64,
    pub s_over_r2: f64,
}

/// Radial profile of the Weiss quantities at one center.
#[derive(Debug, Clone)]
pub struct WeissProfile {
    pub center: (f64, f64),
    pub mode: WeissMode,
    pub gamma: f64,
    pub d: f64,
    pub tol_w: f64,
    pub samples: Vec<WeissSample>,
    /// `W₁` nondecreasing across samples within `tol_w` (relative).
    pub monotone: bool,
    pub max_violation_rel: f64,
}

impl WeissProfile {
    /// Nondegeneracy summary: the minimum of `S(r)/r²` and whether the data
    /// decays toward zero at the smallest radii (a degenerate center).
    pub fn nondegeneracy(&self) -> (f64, bool) {
        let s0 = self
            .samples
            .iter()
            .map(|s| s.s_over_r2)
            .fold(f64::MAX, f64::min);
        let first = self.samples.first().map(|s| s.s_over_r2).unwrap_or(0.0);
        let last = self.samples.last().map(|s| s.s_over_r2).unwrap_or(0.0);
        // Samples are ordered by increasing r: decay means the small-radius
        // amplitude is well below the large-radius one.
        let decaying = first < 0.5 * last;
        (s0, decaying)
    }
}

/// Per-center evaluator with the mode-dependent integrand fields prebuilt.
pub struct WeissEvaluator<'a> {
    tp: &'a TwoPhaseField,
    x0: (f64, f64),
    bulk: ScalarField,
    err_integrand: Option<ScalarField>,
}

impl<'a> WeissEvaluator<'a> {
    pub fn new(tp: &'a TwoPhaseField, x0: (f64, f64), mode: WeissMode) -> WeissEvaluator<'a> {
        let mask = tp.v.mask();
        let n = tp.v.values().len();
        let (f0, g0) = (tp.f.bilinear(x0.0, x0.1), tp.g.bilinear(x0.0, x0.1));
        let mut bulk = vec![0.0; n];
        for idx in 0..n {
            if !mask.is_active(idx) {
                continue;
            }
            let v = tp.v.values()[idx];
            let (vp, vm) = (v.max(0.0), (-v).max(0.0));
            let (f, g) = match mode {
                WeissMode::Frozen => (f0, g0),
                WeissMode::Varying => (tp.f.values()[idx], tp.g.values()[idx]),
            };
            let gv = tp.grad_v.0.values()[idx].powi(2) + tp.grad_v.1.values()[idx].powi(2);
            bulk[idx] = gv + 2.0 * (f * vp + g * vm);
        }
        let bulk = ScalarField::from_values(mask, bulk);
        let err_integrand = match mode {
            WeissMode::Frozen => None,
            WeissMode::Varying => {
                let grid = tp.v.grid().clone();
                let mut e = vec![0.0; n];
                for j in 0..grid.ny {
                    for i in 0..grid.nx {
                        let idx = grid.idx(i, j);
                        if !mask.is_active(idx) {
                            continue;
                        }
                        let v = tp.v.values()[idx];
                        let (vp, vm) = (v.max(0.0), (-v).max(0.0));
                        let (dx, dy) = (grid.x(i) - x0.0, grid.y(j) - x0.1);
                        let xdf = dx * tp.grad_f.0.values()[idx] + dy * tp.grad_f.1.values()[idx];
                        let xdg = dx * tp.grad_g.0.values()[idx] + dy * tp.grad_g.1.values()[idx];
                        e[idx] = xdf * vp + xdg * vm;
                    }
                }
                Some(ScalarField::from_values(mask, e))
            }
        };
        WeissEvaluator { tp, x0, bulk, err_integrand }
    }

    pub fn w(&self, r: f64) -> Result<f64> {
        let bulk = disk_integral(&self.bulk, self.x0, r)?;
        let surf = circle_integral(&self.tp.v_sq, self.x0, r)?;
        Ok(bulk / r.powi(4) - 2.0 * surf / r.powi(5))
    }

    pub fn e(&self, r: f64) -> Result<f64> {
        match &self.err_integrand {
            None => Ok(0.0),
            Some(field) => Ok(2.0 * disk_integral(field, self.x0, r)? / r.powi(5)),
        }
    }

    pub fn s(&self, r: f64) -> Result<f64> {
        let surf = circle_integral(&self.tp.v_sq, self.x0, r)?;
        Ok((surf / (2.0 * std::f64::consts::PI * r)).max(0.0).sqrt())
    }
}

/// One-shot Weiss energy at radius `r`.
pub fn weiss_energy(tp: &TwoPhaseField, x0: (f64, f64), r: f64, mode: WeissMode) -> Result<f64> {
    WeissEvaluator::new(tp, x0, mode).w(r)
}

/// One-shot error term `e(r)` (varying coefficients).
pub fn error_term(tp: &TwoPhaseField, x0: (f64, f64), r: f64) -> Result<f64> {
    WeissEvaluator::new(tp, x0, WeissMode::Varying).e(r)
}

/// Circle root-mean-square `S(r)`.
pub fn sphere_average(tp: &TwoPhaseField, x0: (f64, f64), r: f64) -> Result<f64> {
    WeissEvaluator::new(tp, x0, WeissMode::Frozen).s(r)
}

pub const DEFAULT_TOL_W: f64 = 1e-2;
pub const DEFAULT_GAMMA: f64 = 0.5;

/// Sample `W, e, W₁, S` over increasing radii and record the monotonicity
/// verdict for `W₁`.
pub fn weiss_profile(
    tp: &TwoPhaseField,
    x0: (f64, f64),
    radii: &[f64],
    gamma: f64,
    d_mode: DMode,
    mode: WeissMode,
    tol_w: f64,
) -> Result<WeissProfile> {
    if radii.is_empty() || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("radii must be strictly increasing"));
    }
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::invalid("γ must lie in [0, 1)"));
    }
    let ev = WeissEvaluator::new(tp, x0, mode);
    let mut ws = Vec::with_capacity(radii.len());
    let mut es = Vec::with_capacity(radii.len());
    let mut ss = Vec::with_capacity(radii.len());
    for &r in radii {
        ws.push(ev.w(r)?);
        es.push(ev.e(r)?);
        ss.push(ev.s(r)?);
    }
    let d = match d_mode {
        DMode::Explicit(d) => {
            if d < 0.0 {
                return Err(Error::invalid("D must be non-negative"));
            }
            d
        }
        DMode::Calibrated => {
            if gamma <= 0.0 {
                return Err(Error::invalid("calibrated D needs γ > 0"));
            }
            radii
                .iter()
                .zip(&es)
                .map(|(&r, &e)| e.abs() * r.powf(1.0 - gamma) / gamma)
                .fold(0.0, f64::max)
        }
    };
    let samples: Vec<WeissSample> = radii
        .iter()
        .zip(ws.iter().zip(es.iter().zip(&ss)))
        .map(|(&r, (&w, (&e, &s)))| WeissSample {
            r,
            w,
            e,
            w1: w + d * r.powf(gamma),
            s,
            s_over_r2: s / (r * r),
        })
        .collect();
    let mut max_violation_rel: f64 = 0.0;
    for pair in samples.windows(2) {
        let drop = pair[0].w1 - pair[1].w1;
        if drop > 0.0 {
            let scale = pair[0].w1.abs().max(pair[1].w1.abs()).max(1e-300);
            max_violation_rel = max_violation_rel.max(drop / scale);
        }
    }
    Ok(WeissProfile {
        center: x0,
        mode,
        gamma,
        d,
        tol_w,
        monotone: max_violation_rel <= tol_w,
        max_violation_rel,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freeboundary::synthetic_two_phase;
    use crate::geometry::{DomainMask, Grid2D, ScalarField};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn halfplane_tp(n: usize, f0: f64) -> TwoPhaseField {
        let g = Arc::new(Grid2D::new((-0.75, 0.75, -0.75, 0.75), n, n).unwrap());
        let m = DomainMask::full(g);
        let v = ScalarField::from_fn(&m, |x, _| 0.5 * f0 * x * x);
        let f = ScalarField::from_fn(&m, |_, _| f0);
        let gg = ScalarField::from_fn(&m, |_, _| -f0);
        synthetic_two_phase(v, f, gg)
    }

    #[test]
    fn halfplane_weiss_value() {
        // Closed form: W(r) ≡ π f₀²/8 for v = (f₀/2)x₁².
        let f0 = 2.0;
        let tp = halfplane_tp(513, f0);
        for r in [0.15, 0.3, 0.5] {
            let w = weiss_energy(&tp, (0.0, 0.0), r, WeissMode::Frozen).unwrap();
            let exact = PI * f0 * f0 / 8.0;
            assert!(
                ((w - exact) / exact).abs() < 1e-3,
                "W({r}) = {w}, exact {exact}"
            );
        }
    }

    #[test]
    fn zero_field_gives_zero_energy() {
        let g = Arc::new(Grid2D::new((-1.0, 1.0, -1.0, 1.0), 65, 65).unwrap());
        let m = DomainMask::full(g);
        let z = ScalarField::zeros(&m);
        let tp = synthetic_two_phase(z.clone(), z.clone(), z);
        assert_eq!(weiss_energy(&tp, (0.0, 0.0), 0.5, WeissMode::Frozen).unwrap(), 0.0);
        assert_eq!(sphere_average(&tp, (0.0, 0.0), 0.5).unwrap(), 0.0);
    }

    #[test]
    fn frozen_error_term_vanishes_and_varying_f_matches_oracle() {
        // v = x²/2 ≥ 0 and f = 1 + x²/2 give (x·∇f)v⁺ = x⁴/2, so
        // e(r) = (2/r⁵)·∫_{B_r} x⁴/2 = (2/r⁵)·(π r⁶/16) = π r/8.
        let g = Arc::new(Grid2D::new((-0.8, 0.8, -0.8, 0.8), 513, 513).unwrap());
        let m = DomainMask::full(g);
        let v = ScalarField::from_fn(&m, |x, _| 0.5 * x * x);
        let f = ScalarField::from_fn(&m, |x, _| 1.0 + 0.5 * x * x);
        let gg = ScalarField::from_fn(&m, |_, _| -1.0);
        let tp = synthetic_two_phase(v, f, gg);
        assert_eq!(
            WeissEvaluator::new(&tp, (0.0, 0.0), WeissMode::Frozen)
                .e(0.4)
                .unwrap(),
            0.0
        );
        let r = 0.4;
        let exact = PI * r / 8.0;
        let e = error_term(&tp, (0.0, 0.0), r).unwrap();
        assert!(((e - exact) / exact).abs() < 1e-3, "e({r}) = {e}, exact {exact}");
        // Linearity in ∇f: doubling the quadratic part doubles e(r).
        let f2 = ScalarField::from_fn(&m, |x, _| 1.0 + x * x);
        let v2 = ScalarField::from_fn(&m, |x, _| 0.5 * x * x);
        let gg2 = ScalarField::from_fn(&m, |_, _| -1.0);
        let tp2 = synthetic_two_phase(v2, f2, gg2);
        let e2 = error_term(&tp2, (0.0, 0.0), r).unwrap();
        assert!(((e2 - 2.0 * e) / e2).abs() < 1e-6, "e scaling {e2} vs {}", 2.0 * e);
        // An x-odd error integrand cancels to quadrature tolerance.
        let f3 = ScalarField::from_fn(&m, |x, _| 1.0 + x);
        let v3 = ScalarField::from_fn(&m, |x, _| 0.5 * x * x);
        let gg3 = ScalarField::from_fn(&m, |_, _| -1.0);
        let tp3 = synthetic_two_phase(v3, f3, gg3);
        assert!(error_term(&tp3, (0.0, 0.0), r).unwrap().abs() < 1e-9);
    }

    #[test]
    fn sphere_average_halfplane_ratio() {
        // S(r)/r² = f₀·sqrt(3/32): the circle mean of cos⁴ is 3/8.
        let f0 = 1.7;
        let tp = halfplane_tp(513, f0);
        for r in [0.2, 0.4] {
            let s = sphere_average(&tp, (0.0, 0.0), r).unwrap();
            let exact = f0 * (3.0f64 / 32.0).sqrt();
            assert!(
                ((s / (r * r) - exact) / exact).abs() < 2e-3,
                "S(r)/r² = {} vs {exact}",
                s / (r * r)
            );
        }
    }

    #[test]
    fn profile_on_homogeneous_solution_is_flat_and_monotone() {
        let tp = halfplane_tp(257, 1.0);
        let radii: Vec<f64> = (0..8).map(|k| 0.1 + 0.05 * k as f64).collect();
        let p = weiss_profile(
            &tp,
            (0.0, 0.0),
            &radii,
            DEFAULT_GAMMA,
            DMode::Calibrated,
            WeissMode::Frozen,
            DEFAULT_TOL_W,
        )
        .unwrap();
        assert!(p.monotone, "violation {}", p.max_violation_rel);
        assert_eq!(p.d, 0.0); // frozen mode has e ≡ 0
        let (s0, decaying) = p.nondegeneracy();
        assert!(s0 > 0.0);
        assert!(!decaying);
        // S(r)/r² is r-independent on a homogeneous solution.
        let vals: Vec<f64> = p.samples.iter().map(|s| s.s_over_r2).collect();
        let spread = (vals.iter().cloned().fold(f64::MIN, f64::max)
            - vals.iter().cloned().fold(f64::MAX, f64::min))
            / vals[0];
        assert!(spread.abs() < 5e-3, "S/r² spread {spread}");
    }

    #[test]
    fn rejects_bad_radii() {
        let tp = halfplane_tp(65, 1.0);
        assert!(weiss_profile(
            &tp,
            (0.0, 0.0),
            &[0.2, 0.2],
            0.5,
            DMode::Calibrated,
            WeissMode::Frozen,
            1e-2
        )
        .is_err());
        assert!(weiss_energy(&tp, (0.0, 0.0), 5.0, WeissMode::Frozen).is_err());
    }
}
