//! Exact degree-2 homogeneous solutions of `Δv = f₀χ_{v≥0} − g₀χ_{v<0}` in
//! the plane: the half-plane solution `(f₀/2)x₁²`, the nonnegative family
//! `(a+f₀/4)x₁² + (f₀/4−a)x₂²`, and the genuinely two-phase profile with
//! 2π/3-periodic angular structure.
//!
//! Writing `v = r²·w(θ)` turns the equation into `w'' + 4w = f₀` on positive
//! arcs and `w'' + 4w = −g₀` on negative arcs, so each arc is a sinusoid in
//! `2θ` plus the constant offset `γ = f₀/4` resp. `μ = −g₀/4`:
//!
//! ```text
//! f₁(θ) = C₊·sin(2θ + D₊) + γ   (w > 0 on (0, θ₀))
//! f₂(θ) = C₋·sin(2θ + D₋) + μ   (w < 0 on (θ₀, 2π/3))
//! ```
//!
//! The five matching conditions `f₁(0) = f₁(θ₀) = f₂(θ₀) = f₂(2π/3) = 0` and
//! `f₁'(θ₀) = f₂'(θ₀)` determine `(C₊, D₊, C₋, D₋, θ₀)`; the remaining C¹
//! junction at `2π/3 ≡ 0` is implied by the arc invariant `w'²/2 + 2w² − Kw`
//! being conserved along each arc, and is verified rather than assumed.

use crate::error::{Error, Result};
use crate::freeboundary::{synthetic_two_phase, weiss_energy, TwoPhaseField, WeissMode};
use crate::geometry::{DomainMask, Grid2D, ScalarField};
use std::f64::consts::PI;
use std::sync::Arc;

const TWO_THIRDS_PI: f64 = 2.0 * PI / 3.0;

/// Which exact solution family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolutionKind {
    HalfPlane,
    Nonnegative,
    Blank,
}

/// Parameters of the two-phase angular profile.
#[derive(Debug, Clone, Copy)]
pub struct BlankParams {
    pub c_plus: f64,
    pub d_plus: f64,
    pub c_minus: f64,
    pub d_minus: f64,
    pub gamma_amp: f64,
    pub mu_amp: f64,
    pub theta0: f64,
}

/// A degree-2 homogeneous solution `v(x) = r²·w(θ)`.
#[derive(Debug, Clone)]
pub struct HomogeneousSolution2D {
    pub kind: SolutionKind,
    pub f0: f64,
    /// For the half-plane and nonnegative kinds `v ≥ 0`, so `g0` never enters
    /// the equation; it is kept for the two-phase energy integrand.
    pub g0: f64,
    /// Nonnegative-family parameter `a ∈ [−f₀/4, f₀/4]`.
    pub a: f64,
    pub blank: Option<BlankParams>,
}

/// `v = (f₀/2)x₁²`, the one-dimensional profile with `S_v = {x₁ = 0}`.
pub fn halfplane(f0: f64) -> Result<HomogeneousSolution2D> {
    if !(f0 > 0.0) {
        return Err(Error::invalid("halfplane needs f₀ > 0"));
    }
    Ok(HomogeneousSolution2D {
        kind: SolutionKind::HalfPlane,
        f0,
        g0: -f0,
        a: f0 / 4.0,
        blank: None,
    })
}

/// `v = (a+f₀/4)x₁² + (f₀/4−a)x₂²` with `−f₀/4 ≤ a ≤ f₀/4` (so `v ≥ 0`).
pub fn nonnegative(f0: f64, a: f64) -> Result<HomogeneousSolution2D> {
    if !(f0 > 0.0) {
        return Err(Error::invalid("nonnegative family needs f₀ > 0"));
    }
    if !(-f0 / 4.0..=f0 / 4.0).contains(&a) {
        return Err(Error::invalid(format!(
            "parameter a = {a} outside [−f₀/4, f₀/4] = [{}, {}]",
            -f0 / 4.0,
            f0 / 4.0
        )));
    }
    Ok(HomogeneousSolution2D { kind: SolutionKind::Nonnegative, f0, g0: -f0, a, blank: None })
}

impl HomogeneousSolution2D {
    /// Pointwise evaluation `v(x, y) = r²·w(θ)`.
    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        match self.kind {
            SolutionKind::HalfPlane => 0.5 * self.f0 * x * x,
            SolutionKind::Nonnegative => {
                (self.a + self.f0 / 4.0) * x * x + (self.f0 / 4.0 - self.a) * y * y
            }
            SolutionKind::Blank => {
                let r2 = x * x + y * y;
                if r2 == 0.0 {
                    return 0.0;
                }
                r2 * self.angular(y.atan2(x))
            }
        }
    }

    /// Angular profile `w(θ)` (2π/3-periodic for the two-phase kind).
    pub fn angular(&self, theta: f64) -> f64 {
        match self.kind {
            SolutionKind::HalfPlane => 0.5 * self.f0 * theta.cos() * theta.cos(),
            SolutionKind::Nonnegative => {
                let (s, c) = theta.sin_cos();
                (self.a + self.f0 / 4.0) * c * c + (self.f0 / 4.0 - self.a) * s * s
            }
            SolutionKind::Blank => {
                let p = self.blank.as_ref().expect("blank params");
                let t = theta.rem_euclid(TWO_THIRDS_PI);
                if t <= p.theta0 {
                    p.c_plus * (2.0 * t + p.d_plus).sin() + p.gamma_amp
                } else {
                    p.c_minus * (2.0 * t + p.d_minus).sin() + p.mu_amp
                }
            }
        }
    }

    /// Evaluate onto every node of a grid (full mask).
    pub fn evaluate_field(&self, grid: &Arc<Grid2D>) -> ScalarField {
        let mask = DomainMask::full(grid.clone());
        ScalarField::from_fn(&mask, |x, y| self.evaluate(x, y))
    }

    /// Two-phase wrapper with constant coefficient fields, for the Weiss
    /// machinery.
    pub fn as_two_phase(&self, grid: &Arc<Grid2D>) -> TwoPhaseField {
        let mask = DomainMask::full(grid.clone());
        let v = ScalarField::from_fn(&mask, |x, y| self.evaluate(x, y));
        let f = ScalarField::from_fn(&mask, |_, _| self.f0);
        let g = ScalarField::from_fn(&mask, |_, _| self.g0);
        synthetic_two_phase(v, f, g)
    }

    /// Flat key-value parameter block.
    pub fn parameter_block(&self) -> String {
        use crate::geometry::g17;
        let kind = match self.kind {
            SolutionKind::HalfPlane => "halfplane",
            SolutionKind::Nonnegative => "nonnegative",
            SolutionKind::Blank => "blank",
        };
        let mut s = format!(
            "kind = {kind}\nf0 = {}\ng0 = {}\na = {}\n",
            g17(self.f0),
            g17(self.g0),
            g17(self.a)
        );
        if let Some(p) = &self.blank {
            s.push_str(&format!(
                "C+ = {}\nD+ = {}\nC- = {}\nD- = {}\ngamma = {}\nmu = {}\ntheta0 = {}\n",
                g17(p.c_plus),
                g17(p.d_plus),
                g17(p.c_minus),
                g17(p.d_minus),
                g17(p.gamma_amp),
                g17(p.mu_amp),
                g17(p.theta0)
            ));
        }
        s
    }
}

/// Residuals of the angular matching identities on a Blank profile.
#[derive(Debug, Clone, Copy)]
pub struct BlankResiduals {
    /// `|C₊² − C₋² − (γ² − μ²)|` relative to `C₊² + C₋²`.
    pub amplitude_identity: f64,
    /// `|C₊·sin(D₊) + γ|`.
    pub phase_identity: f64,
    /// `|θ₀ − (π/2 + asin(γ/C₊))|`.
    pub theta0_identity: f64,
    /// Worst C¹ defect over the two arc junctions.
    pub c1_junction: f64,
}

pub fn blank_residuals(p: &BlankParams) -> BlankResiduals {
    let df1 = |t: f64| 2.0 * p.c_plus * (2.0 * t + p.d_plus).cos();
    let df2 = |t: f64| 2.0 * p.c_minus * (2.0 * t + p.d_minus).cos();
    let amplitude_identity = (p.c_plus.powi(2) - p.c_minus.powi(2)
        - (p.gamma_amp.powi(2) - p.mu_amp.powi(2)))
    .abs()
        / (p.c_plus.powi(2) + p.c_minus.powi(2));
    let phase_identity = (p.c_plus * p.d_plus.sin() + p.gamma_amp).abs();
    let theta0_identity =
        (p.theta0 - (PI / 2.0 + (p.gamma_amp / p.c_plus).clamp(-1.0, 1.0).asin())).abs();
    let c1_junction = (df1(p.theta0) - df2(p.theta0))
        .abs()
        .max((df2(TWO_THIRDS_PI) - df1(0.0)).abs());
    BlankResiduals { amplitude_identity, phase_identity, theta0_identity, c1_junction }
}

/// Construct the two-phase Blank profile for `(f₀, g₀)` by multistart Newton
/// root-finding on the five matching conditions, then verify every identity
/// and sign constraint before returning. Reports non-existence rather than
/// guessing: not every admissible pair supports a profile.
pub fn blank_profile(f0: f64, g0: f64) -> Result<HomogeneousSolution2D> {
    if !(f0 > 0.0 && g0 < 0.0 && f0 + g0 < 0.0) {
        return Err(Error::invalid(format!(
            "blank profile needs f₀ > 0, g₀ < 0, f₀+g₀ < 0 (got f₀={f0}, g₀={g0})"
        )));
    }
    let gamma = f0 / 4.0;
    let mu = -g0 / 4.0;

    let mut failures: Vec<String> = Vec::new();
    for k in 0..16 {
        let d_plus0 = -PI + 2.0 * PI * (k as f64 + 1.0) / 16.0;
        let start = initial_guess(gamma, mu, d_plus0);
        let Some(root) = newton(gamma, mu, start) else {
            failures.push(format!("start {k}: no convergence"));
            continue;
        };
        match canonicalize_and_verify(f0, g0, gamma, mu, root) {
            Ok(sol) => return Ok(sol),
            Err(e) => failures.push(format!("start {k}: {e}")),
        }
    }
    Err(Error::NoBlankProfile(format!(
        "f₀ = {f0}, g₀ = {g0}: all 16 starts rejected ({})",
        failures.last().cloned().unwrap_or_default()
    )))
}

fn initial_guess(gamma: f64, mu: f64, d_plus0: f64) -> [f64; 5] {
    // The reduced system suggests D₊ = −a with a ∈ (0, π/6); map the start
    // phase into that range to seed the remaining unknowns consistently.
    let a = (-d_plus0).rem_euclid(PI / 6.0).clamp(0.02, PI / 6.0 - 0.02);
    let b = a + PI / 3.0;
    [
        gamma / a.sin(),
        d_plus0,
        mu / b.sin(),
        PI / 3.0 - a,
        PI / 2.0 + a,
    ]
}

/// Matching system residual and its Jacobian in `(C₊, D₊, C₋, D₋, θ₀)`.
fn system(gamma: f64, mu: f64, x: &[f64; 5]) -> ([f64; 5], [[f64; 5]; 5]) {
    let [cp, dp, cm, dm, t0] = *x;
    let (s1, c1) = (2.0 * t0 + dp).sin_cos();
    let (s2, c2) = (2.0 * t0 + dm).sin_cos();
    let f = [
        cp * dp.sin() + gamma,
        cp * s1 + gamma,
        cm * s2 + mu,
        2.0 * cp * c1 - 2.0 * cm * c2,
        cm * (4.0 * PI / 3.0 + dm).sin() + mu,
    ];
    let mut j = [[0.0; 5]; 5];
    j[0][0] = dp.sin();
    j[0][1] = cp * dp.cos();
    j[1][0] = s1;
    j[1][1] = cp * c1;
    j[1][4] = 2.0 * cp * c1;
    j[2][2] = s2;
    j[2][3] = cm * c2;
    j[2][4] = 2.0 * cm * c2;
    j[3][0] = 2.0 * c1;
    j[3][1] = -2.0 * cp * s1;
    j[3][2] = -2.0 * c2;
    j[3][3] = 2.0 * cm * s2;
    j[3][4] = -4.0 * cp * s1 + 4.0 * cm * s2;
    j[4][2] = (4.0 * PI / 3.0 + dm).sin();
    j[4][3] = cm * (4.0 * PI / 3.0 + dm).cos();
    (f, j)
}

fn newton(gamma: f64, mu: f64, mut x: [f64; 5]) -> Option<[f64; 5]> {
    let scale = gamma.max(mu).max(1.0);
    for _ in 0..80 {
        let (f, j) = system(gamma, mu, &x);
        let fnorm = f.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if fnorm < 1e-13 * scale {
            return Some(x);
        }
        let dx = solve5(j, f)?;
        let step = dx.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let damp = if step > 1.0 { 1.0 / step } else { 1.0 };
        for i in 0..5 {
            x[i] -= damp * dx[i];
        }
        if !x.iter().all(|v| v.is_finite()) {
            return None;
        }
    }
    None
}

fn solve5(a: [[f64; 5]; 5], b: [f64; 5]) -> Option<[f64; 5]> {
    let mut m = a;
    let mut rhs = b;
    for col in 0..5 {
        let piv = (col..5).max_by(|&p, &q| m[p][col].abs().partial_cmp(&m[q][col].abs()).unwrap())?;
        if m[piv][col].abs() < 1e-14 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..5 {
            let k = m[row][col] / m[col][col];
            for cc in col..5 {
                m[row][cc] -= k * m[col][cc];
            }
            rhs[row] -= k * rhs[col];
        }
    }
    let mut x = [0.0; 5];
    for row in (0..5).rev() {
        let mut s = rhs[row];
        for cc in row + 1..5 {
            s -= m[row][cc] * x[cc];
        }
        x[row] = s / m[row][row];
    }
    Some(x)
}

fn canonicalize_and_verify(
    f0: f64,
    g0: f64,
    gamma: f64,
    mu: f64,
    mut x: [f64; 5],
) -> Result<HomogeneousSolution2D> {
    // Flip amplitudes positive (a phase shift by π leaves the sinusoid
    // intact) and wrap phases and θ0 into principal ranges.
    if x[0] < 0.0 {
        x[0] = -x[0];
        x[1] += PI;
    }
    if x[2] < 0.0 {
        x[2] = -x[2];
        x[3] += PI;
    }
    x[1] = wrap_pi(x[1]);
    x[3] = wrap_pi(x[3]);
    x[4] = x[4].rem_euclid(TWO_THIRDS_PI);
    let p = BlankParams {
        c_plus: x[0],
        d_plus: x[1],
        c_minus: x[2],
        d_minus: x[3],
        gamma_amp: gamma,
        mu_amp: mu,
        theta0: x[4],
    };
    let scale = gamma.max(mu);
    if !(p.theta0 > 1e-6 && p.theta0 < TWO_THIRDS_PI - 1e-6) {
        return Err(Error::invalid(format!("θ0 = {} outside (0, 2π/3)", p.theta0)));
    }
    if p.c_plus < gamma || p.c_minus < mu {
        return Err(Error::invalid("amplitudes below their offsets (no zero crossing)"));
    }
    let r = blank_residuals(&p);
    if r.amplitude_identity > 1e-10 {
        return Err(Error::invalid(format!(
            "amplitude identity residual {}",
            r.amplitude_identity
        )));
    }
    if r.phase_identity > 1e-10 * scale {
        return Err(Error::invalid(format!("phase identity residual {}", r.phase_identity)));
    }
    if r.theta0_identity > 1e-10 {
        return Err(Error::invalid(format!("θ0 identity residual {}", r.theta0_identity)));
    }
    if r.c1_junction > 1e-8 * scale.max(1.0) {
        return Err(Error::invalid(format!("C¹ junction defect {}", r.c1_junction)));
    }
    // Strict signs on the open arc interiors and zeros at arc endpoints.
    let f1 = |t: f64| p.c_plus * (2.0 * t + p.d_plus).sin() + p.gamma_amp;
    let f2 = |t: f64| p.c_minus * (2.0 * t + p.d_minus).sin() + p.mu_amp;
    for k in 1..64 {
        let t = p.theta0 * k as f64 / 64.0;
        if f1(t) <= 0.0 {
            return Err(Error::invalid(format!("f₁({t}) = {} not positive", f1(t))));
        }
        let t2 = p.theta0 + (TWO_THIRDS_PI - p.theta0) * k as f64 / 64.0;
        if f2(t2) >= 0.0 {
            return Err(Error::invalid(format!("f₂({t2}) = {} not negative", f2(t2))));
        }
    }
    if f1(0.0).abs() > 1e-10 * scale
        || f1(p.theta0).abs() > 1e-10 * scale
        || f2(p.theta0).abs() > 1e-10 * scale
        || f2(TWO_THIRDS_PI).abs() > 1e-10 * scale
    {
        return Err(Error::invalid("arc endpoints are not zeros"));
    }
    Ok(HomogeneousSolution2D { kind: SolutionKind::Blank, f0, g0, a: 0.0, blank: Some(p) })
}

fn wrap_pi(t: f64) -> f64 {
    let w = t.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Max 5-point residual of `Δv = f₀χ_{v≥0} − g₀χ_{v<0}` over interior nodes,
/// excluding a 2-cell band around the sign interface (the discrete Laplacian
/// of a kink is O(1/h) there by construction).
pub fn pde_residual(sol: &HomogeneousSolution2D, grid: &Arc<Grid2D>) -> f64 {
    let v = sol.evaluate_field(grid);
    let g = grid;
    let n = g.n_nodes();
    let sign: Vec<bool> = v.values().iter().map(|&x| x >= 0.0).collect();
    let mut near = vec![false; n];
    for j in 0..g.ny {
        for i in 0..g.nx {
            let idx = g.idx(i, j);
            let s0 = sign[idx];
            let flips = (i + 1 < g.nx && sign[idx + 1] != s0)
                || (j + 1 < g.ny && sign[idx + g.nx] != s0);
            if flips {
                for dj in -2i64..=2 {
                    for di in -2i64..=2 {
                        let (ii, jj) = (i as i64 + di, j as i64 + dj);
                        if ii >= 0 && jj >= 0 && (ii as usize) < g.nx && (jj as usize) < g.ny {
                            near[g.idx(ii as usize, jj as usize)] = true;
                        }
                    }
                }
            }
        }
    }
    let (ihx2, ihy2) = (1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy));
    let vv = v.values();
    let mut worst: f64 = 0.0;
    for j in 1..g.ny - 1 {
        for i in 1..g.nx - 1 {
            let idx = g.idx(i, j);
            if near[idx] {
                continue;
            }
            let lap = ihx2 * (vv[idx - 1] + vv[idx + 1] - 2.0 * vv[idx])
                + ihy2 * (vv[idx - g.nx] + vv[idx + g.nx] - 2.0 * vv[idx]);
            let rhs = if vv[idx] >= 0.0 { sol.f0 } else { -sol.g0 };
            worst = worst.max((lap - rhs).abs());
        }
    }
    worst
}

/// Relative spread `(max W − min W)/|mean W|` of the frozen-coefficient Weiss
/// energy over the given radii, on an `n × n` synthetic grid containing the
/// largest ball with margin. Also returns the sampled values.
pub fn weiss_constancy(
    sol: &HomogeneousSolution2D,
    radii: &[f64],
    n: usize,
) -> Result<(f64, Vec<f64>)> {
    if radii.is_empty() || radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::invalid("radii must be positive"));
    }
    let rmax = radii.iter().cloned().fold(0.0, f64::max);
    let half = rmax * 1.04;
    let grid = Arc::new(Grid2D::new((-half, half, -half, half), n, n)?);
    let tp = sol.as_two_phase(&grid);
    let mut ws = Vec::with_capacity(radii.len());
    for &r in radii {
        ws.push(weiss_energy(&tp, (0.0, 0.0), r, WeissMode::Frozen)?);
    }
    let wmin = ws.iter().cloned().fold(f64::MAX, f64::min);
    let wmax = ws.iter().cloned().fold(f64::MIN, f64::max);
    let mean = ws.iter().sum::<f64>() / ws.len() as f64;
    if mean.abs() < 1e-300 {
        return Err(Error::invalid("mean Weiss energy is zero"));
    }
    Ok(((wmax - wmin) / mean.abs(), ws))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halfplane_formula_and_gradient_line() {
        let s = halfplane(2.0).unwrap();
        assert_eq!(s.evaluate(1.0, 5.0), 1.0);
        for t in [-3.0, 0.0, 1.7] {
            assert_eq!(s.evaluate(0.0, t), 0.0);
            // ∇v = (f₀x₁, 0) vanishes on the whole x₂ axis.
            let eps = 1e-6;
            let dv = (s.evaluate(eps, t) - s.evaluate(-eps, t)) / (2.0 * eps);
            assert!(dv.abs() < 1e-9);
        }
        assert!(halfplane(0.0).is_err());
    }

    #[test]
    fn nonnegative_family_endpoints() {
        let f0 = 2.0;
        let hp = nonnegative(f0, f0 / 4.0).unwrap();
        for (x, y) in [(0.3, -0.8), (1.0, 0.2)] {
            assert!((hp.evaluate(x, y) - 0.5 * f0 * x * x).abs() < 1e-15);
        }
        let rot = nonnegative(f0, -f0 / 4.0).unwrap();
        assert!((rot.evaluate(0.3, -0.8) - 0.5 * f0 * 0.64).abs() < 1e-15);
        let radial = nonnegative(f0, 0.0).unwrap();
        assert!((radial.angular(0.77) - f0 / 4.0).abs() < 1e-15);
        assert!(nonnegative(f0, f0).is_err());
    }

    #[test]
    fn homogeneity_is_exact() {
        let sols = [
            halfplane(1.3).unwrap(),
            nonnegative(1.0, 0.1).unwrap(),
            blank_profile(1.0, -16.0).unwrap(),
        ];
        for s in &sols {
            for &(x, y) in &[(0.31, -0.7), (1.2, 0.45)] {
                let lam = 1.734;
                let left = s.evaluate(lam * x, lam * y);
                let right = lam * lam * s.evaluate(x, y);
                assert!((left - right).abs() <= 1e-12 * right.abs().max(1.0));
            }
        }
    }

    #[test]
    fn blank_profile_matches_reduced_system_oracle() {
        // Independent 1-d reduction: a solves γ·cot(a) = μ·cot(a + π/3) on
        // (0, π/6); then C₊ = γ/sin a, θ₀ = π/2 + a, C₋ = μ/sin(a + π/3).
        let (f0, g0) = (1.0, -16.0);
        let (gamma, mu) = (f0 / 4.0, -g0 / 4.0);
        let h =
            |a: f64| gamma * a.cos() / a.sin() - mu * (a + PI / 3.0).cos() / (a + PI / 3.0).sin();
        let lo = 1e-6;
        let hi = PI / 6.0 - 1e-6;
        let mut prev = lo;
        let mut bracket = None;
        for k in 1..=4096 {
            let t = lo + (hi - lo) * k as f64 / 4096.0;
            if h(prev).signum() != h(t).signum() {
                bracket = Some((prev, t));
                break;
            }
            prev = t;
        }
        let (mut ba, mut bb) = bracket.expect("μ/γ = 16 > 7+4√3 admits a root");
        for _ in 0..200 {
            let mid = 0.5 * (ba + bb);
            if h(ba).signum() == h(mid).signum() {
                ba = mid;
            } else {
                bb = mid;
            }
        }
        let a = 0.5 * (ba + bb);

        let sol = blank_profile(f0, g0).unwrap();
        let p = sol.blank.unwrap();
        let theta_oracle = PI / 2.0 + a;
        if (p.theta0 - theta_oracle).abs() < 1e-8 {
            assert!((p.c_plus - gamma / a.sin()).abs() < 1e-8);
            assert!((p.c_minus - mu / (a + PI / 3.0).sin()).abs() < 1e-8);
        } else {
            // The multistart may land on the second root of the reduced
            // equation; verify it sits on the same curve.
            let a2 = p.theta0 - PI / 2.0;
            assert!(a2 > 0.0 && a2 < PI / 6.0);
            assert!(h(a2).abs() < 1e-7, "θ0 root not on the reduced curve: {}", h(a2));
        }
    }

    #[test]
    fn blank_profile_identities_and_signs() {
        let sol = blank_profile(1.0, -16.0).unwrap();
        let p = sol.blank.unwrap();
        let r = blank_residuals(&p);
        assert!(r.amplitude_identity <= 1e-10);
        assert!(r.phase_identity <= 1e-10);
        assert!(r.theta0_identity <= 1e-10);
        assert!(r.c1_junction <= 1e-8);
        // Exactly 6 zeros of w on [0, 2π): sign changes over a fine sample.
        let n = 20000;
        let mut zeros = 0;
        let mut prev = sol.angular(1e-9);
        for k in 1..=n {
            let t = 2.0 * PI * k as f64 / n as f64;
            let w = sol.angular(t + 1e-9);
            if w.signum() != prev.signum() {
                zeros += 1;
            }
            prev = w;
        }
        assert_eq!(zeros, 6, "expected 6 angular zeros");
    }

    #[test]
    fn blank_profile_existence_boundary() {
        // Two-phase profiles exist only when −g₀/f₀ ≥ 7 + 4√3 ≈ 13.93.
        assert!(blank_profile(1.0, -16.0).is_ok());
        assert!(blank_profile(1.0, -14.0).is_ok());
        assert!(matches!(blank_profile(1.0, -13.0), Err(Error::NoBlankProfile(_))));
        // f₀ + g₀ = 0 violates the admissibility precondition outright.
        assert!(matches!(blank_profile(1.0, -1.0), Err(Error::InvalidInput(_))));
        assert!(blank_profile(-1.0, -16.0).is_err());
    }

    #[test]
    fn pde_residual_exact_off_the_kink_band() {
        // Off the excluded band every kind is piecewise quadratic in (x, y)
        // (r²sin(2θ+D) = 2xy·cos D + (x²−y²)·sin D), so the 5-point stencil
        // is exact and the residual is pure roundoff at any resolution.
        let g129 = Arc::new(Grid2D::new((-1.2, 1.2, -1.2, 1.2), 129, 129).unwrap());
        assert!(pde_residual(&halfplane(2.0).unwrap(), &g129) < 1e-10);
        assert!(pde_residual(&nonnegative(1.0, 0.2).unwrap(), &g129) < 1e-10);
        let blank = blank_profile(1.0, -16.0).unwrap();
        let g257 = Arc::new(Grid2D::new((-1.2, 1.2, -1.2, 1.2), 257, 257).unwrap());
        assert!(pde_residual(&blank, &g129) < 1e-8);
        assert!(pde_residual(&blank, &g257) < 1e-8);
        // λ-rescaled input keeps the residual at rounding level (homogeneity).
        let fine = Arc::new(Grid2D::new((-0.3, 0.3, -0.3, 0.3), 129, 129).unwrap());
        assert!(pde_residual(&blank, &fine) < 1e-8);
    }

    #[test]
    fn weiss_constancy_of_exact_solutions() {
        let radii: Vec<f64> = (0..5).map(|k| 0.1 + 0.1 * k as f64).collect();
        let (spread, ws) = weiss_constancy(&halfplane(2.0).unwrap(), &radii, 257).unwrap();
        let exact = PI * 4.0 / 8.0;
        assert!(spread < 1e-3, "halfplane spread {spread}");
        assert!(((ws[0] - exact) / exact).abs() < 1e-3);
        let (spread_nn, _) =
            weiss_constancy(&nonnegative(1.0, 0.15).unwrap(), &radii, 257).unwrap();
        assert!(spread_nn < 1e-3, "nonnegative spread {spread_nn}");
    }
}
